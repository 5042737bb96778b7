#pragma once

// Dataset ingestion, tokenization, vocabularies, pretrained-vector loading,
// and padded mini-batch encoding.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "hrnn/errors.hpp"
#include "hrnn/tensor.hpp"

namespace hrnn {

// Default sequence caps applied at encode time. Headlines are short; anything
// longer is truncated.
inline constexpr std::size_t kMaxTokensPerHeadline = 30;
inline constexpr std::size_t kMaxCharsPerWord = 24;

// Lowercases and splits on every maximal run of non-alphanumeric bytes.
inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string word;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      word.push_back(static_cast<char>(std::tolower(c)));
    } else if (!word.empty()) {
      tokens.push_back(std::move(word));
      word.clear();
    }
  }
  if (!word.empty()) tokens.push_back(std::move(word));
  return tokens;
}

struct HeadlineExample {
  std::string raw_text;
  std::vector<std::string> tokens;  // lowercased, non-empty for loaded data
  int label = 0;                    // 1 = clickbait
};

inline HeadlineExample make_example(std::string text, int label) {
  HeadlineExample ex;
  ex.tokens = tokenize(text);
  ex.raw_text = std::move(text);
  ex.label = label;
  return ex;
}

// Token and character id maps. Ids are dense; 0 and 1 are reserved in both
// maps for padding and unknowns. Corpus tokens are alphanumeric-only, so the
// reserved sentinels can never collide with them.
struct Vocabulary {
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;

  std::vector<std::string> id_to_word;  // [0]="<pad>", [1]="<unk>"
  std::vector<char> id_to_char;         // [0], [1] are placeholder bytes
  std::unordered_map<std::string, std::int32_t> word_to_id;
  std::unordered_map<char, std::int32_t> char_to_id;

  std::size_t word_count() const { return id_to_word.size(); }
  std::size_t char_count() const { return id_to_char.size(); }

  std::int32_t word_id(const std::string& w) const {
    auto it = word_to_id.find(w);
    return it == word_to_id.end() ? kUnk : it->second;
  }
  std::int32_t char_id(char c) const {
    auto it = char_to_id.find(c);
    return it == char_to_id.end() ? kUnk : it->second;
  }
};

// Assigns word ids to tokens with frequency >= min_count and char ids to every
// character seen in any token. Order: descending frequency, ties lexicographic,
// so rebuilding from the same corpus gives identical ids.
inline Vocabulary build_vocab(const std::vector<HeadlineExample>& corpus,
                              std::size_t min_count = 1) {
  if (corpus.empty()) throw config_error("build_vocab: empty corpus");

  std::map<std::string, std::size_t> word_freq;
  std::map<char, std::size_t> char_freq;
  for (const auto& ex : corpus) {
    for (const auto& tok : ex.tokens) {
      ++word_freq[tok];
      for (char c : tok) ++char_freq[c];
    }
  }

  auto by_freq_then_key = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };

  Vocabulary vocab;
  vocab.id_to_word = {"<pad>", "<unk>"};
  vocab.id_to_char = {'\0', '\1'};

  std::vector<std::pair<std::string, std::size_t>> words(word_freq.begin(),
                                                         word_freq.end());
  std::sort(words.begin(), words.end(), by_freq_then_key);
  for (const auto& [tok, freq] : words) {
    if (freq < min_count) continue;
    vocab.word_to_id.emplace(tok, static_cast<std::int32_t>(vocab.id_to_word.size()));
    vocab.id_to_word.push_back(tok);
  }

  std::vector<std::pair<char, std::size_t>> chars(char_freq.begin(), char_freq.end());
  std::sort(chars.begin(), chars.end(), by_freq_then_key);
  for (const auto& [c, freq] : chars) {
    vocab.char_to_id.emplace(c, static_cast<std::int32_t>(vocab.id_to_char.size()));
    vocab.id_to_char.push_back(c);
  }
  return vocab;
}

// Tab-separated dataset: `<label 0|1> <TAB> <headline>`, one per line, `#`
// comment lines and blank lines ignored.
inline std::vector<HeadlineExample> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open dataset file: " + path);

  std::vector<HeadlineExample> examples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw parse_error(path + ":" + std::to_string(line_no) +
                        ": expected <label>\\t<headline>");
    }
    const std::string label_field = line.substr(0, tab);
    int label;
    if (label_field == "0") label = 0;
    else if (label_field == "1") label = 1;
    else {
      throw parse_error(path + ":" + std::to_string(line_no) + ": label '" +
                        label_field + "' is not 0 or 1");
    }
    auto ex = make_example(line.substr(tab + 1), label);
    if (ex.tokens.empty()) {
      throw parse_error(path + ":" + std::to_string(line_no) +
                        ": headline has no tokens");
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

// Fixed-width word vectors keyed by token.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<real_t>> rows;
  double coverage = 0.0;  // |vocab ∩ file| / |vocab|, reserved ids excluded

  const std::vector<real_t>* find(const std::string& token) const {
    auto it = rows.find(token);
    return it == rows.end() ? nullptr : &it->second;
  }
};

namespace detail {
inline double parse_component(const std::string& field, const std::string& path,
                              std::size_t line_no) {
  double value;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw parse_error(path + ":" + std::to_string(line_no) +
                      ": non-numeric vector component '" + field + "'");
  }
  return value;
}
}  // namespace detail

// Loads the text vector format: first line `<vocab_size> <dim>`, then one
// `<token> <v1> ... <v_dim>` per line. Only vocabulary words are kept; words
// missing from the file are represented by the zero vector downstream, and the
// character channel is what carries signal for them.
inline EmbeddingTable load_pretrained_embeddings(const std::string& path,
                                                 const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open embedding file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw parse_error(path + ":1: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::size_t declared_count = 0, dim = 0;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> declared_count >> dim) || dim == 0 || (header >> extra)) {
      throw parse_error(path + ":1: malformed header, expected '<count> <dim>'");
    }
  }

  EmbeddingTable table;
  table.dim = dim;
  std::size_t line_no = 1;
  std::vector<std::string> fields;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    fields.clear();
    std::istringstream split(line);
    std::string field;
    while (split >> field) fields.push_back(std::move(field));
    if (fields.size() != dim + 1) {
      throw parse_error(path + ":" + std::to_string(line_no) + ": expected token + " +
                        std::to_string(dim) + " components, got " +
                        std::to_string(fields.empty() ? 0 : fields.size() - 1));
    }
    std::vector<real_t> vec(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      vec[i] = static_cast<real_t>(detail::parse_component(fields[i + 1], path, line_no));
    }
    if (vocab.word_to_id.count(fields[0])) {
      table.rows[fields[0]] = std::move(vec);
    }
  }

  const std::size_t vocab_words = vocab.word_count() - 2;  // minus pad/unk
  table.coverage = vocab_words == 0
                       ? 0.0
                       : static_cast<double>(table.rows.size()) /
                             static_cast<double>(vocab_words);
  return table;
}

// One padded mini-batch. T and C are the batch maxima after the caps;
// word_mask[i*T + t] = 1 iff t < word_lengths[i], and masked positions hold
// pad ids.
struct EncodedBatch {
  std::size_t batch = 0;       // B
  std::size_t max_tokens = 0;  // T
  std::size_t max_chars = 0;   // C

  std::vector<std::int32_t> word_ids;     // [B*T]
  std::vector<std::int32_t> char_ids;     // [B*T*C]
  std::vector<std::uint8_t> word_mask;    // [B*T]
  std::vector<std::size_t> word_lengths;  // [B]
  std::vector<std::size_t> char_lengths;  // [B*T], 0 at padded word positions
  std::vector<int> labels;                // [B]
};

inline EncodedBatch encode_batch(const std::vector<const HeadlineExample*>& examples,
                                 const Vocabulary& vocab,
                                 std::size_t max_tokens_cap = kMaxTokensPerHeadline,
                                 std::size_t max_chars_cap = kMaxCharsPerWord) {
  if (examples.empty()) throw config_error("encode_batch: empty batch");

  std::size_t max_t = 0, max_c = 0;
  for (const auto* ex : examples) {
    if (ex->tokens.empty()) {
      throw config_error("encode_batch: headline has no tokens: \"" + ex->raw_text +
                         "\"");
    }
    max_t = std::max(max_t, std::min(ex->tokens.size(), max_tokens_cap));
    for (const auto& tok : ex->tokens) {
      max_c = std::max(max_c, std::min(tok.size(), max_chars_cap));
    }
  }

  EncodedBatch b;
  b.batch = examples.size();
  b.max_tokens = max_t;
  b.max_chars = max_c;
  b.word_ids.assign(b.batch * max_t, Vocabulary::kPad);
  b.char_ids.assign(b.batch * max_t * max_c, Vocabulary::kPad);
  b.word_mask.assign(b.batch * max_t, 0);
  b.word_lengths.resize(b.batch);
  b.char_lengths.assign(b.batch * max_t, 0);
  b.labels.resize(b.batch);

  for (std::size_t i = 0; i < b.batch; ++i) {
    const auto& ex = *examples[i];
    const std::size_t t_len = std::min(ex.tokens.size(), max_tokens_cap);
    b.word_lengths[i] = t_len;
    b.labels[i] = ex.label;
    for (std::size_t t = 0; t < t_len; ++t) {
      const auto& tok = ex.tokens[t];
      b.word_ids[i * max_t + t] = vocab.word_id(tok);
      b.word_mask[i * max_t + t] = 1;
      const std::size_t c_len = std::min(tok.size(), max_chars_cap);
      b.char_lengths[i * max_t + t] = c_len;
      for (std::size_t c = 0; c < c_len; ++c) {
        b.char_ids[(i * max_t + t) * max_c + c] = vocab.char_id(tok[c]);
      }
    }
  }
  return b;
}

inline EncodedBatch encode_batch(const std::vector<HeadlineExample>& examples,
                                 const Vocabulary& vocab,
                                 std::size_t max_tokens_cap = kMaxTokensPerHeadline,
                                 std::size_t max_chars_cap = kMaxCharsPerWord) {
  std::vector<const HeadlineExample*> ptrs;
  ptrs.reserve(examples.size());
  for (const auto& ex : examples) ptrs.push_back(&ex);
  return encode_batch(ptrs, vocab, max_tokens_cap, max_chars_cap);
}

}  // namespace hrnn
