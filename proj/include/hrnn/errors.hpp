#pragma once

#include <stdexcept>
#include <string>

namespace hrnn {

// Shape or dimension mismatch between tensors.
struct shape_error : std::runtime_error {
  explicit shape_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file (dataset, embedding file, checkpoint, config).
struct parse_error : std::runtime_error {
  explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration value or combination.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite value where a finite one is required (loss, gradient).
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hrnn
