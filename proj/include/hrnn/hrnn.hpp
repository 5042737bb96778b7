#pragma once

// Umbrella header: the full headline-classification toolkit.

#include "hrnn/checkpoint.hpp"
#include "hrnn/cli.hpp"
#include "hrnn/embedding.hpp"
#include "hrnn/errors.hpp"
#include "hrnn/evaluation.hpp"
#include "hrnn/model.hpp"
#include "hrnn/recurrent.hpp"
#include "hrnn/rng.hpp"
#include "hrnn/tensor.hpp"
#include "hrnn/text.hpp"
