#include "absa/vocab.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "absa/error.hpp"
#include "absa/random.hpp"

namespace absa {

Vocabulary::Vocabulary() {
  add(kPadToken);
  add(kUnkToken);
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < 2 || tokens[0] != kPadToken || tokens[1] != kUnkToken)
    throw FormatError("vocabulary must start with the reserved tokens");
  Vocabulary v;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    if (v.contains(tokens[i]))
      throw FormatError("duplicate vocabulary token '" + tokens[i] + "'");
    v.add(tokens[i]);
  }
  return v;
}

int Vocabulary::index_of(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end() || it->second == kPad) return kUnk;
  return it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return index_.count(token) != 0;
}

int Vocabulary::add(const std::string& token) {
  auto [it, inserted] = index_.emplace(token, size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus,
                            int max_size) {
  if (max_size < 1) throw ArgumentError("max_size must be at least 1");
  std::map<std::string, std::int64_t> counts;
  for (const auto& sentence : corpus)
    for (const auto& token : sentence)
      if (token != kPadToken && token != kUnkToken) ++counts[token];

  std::vector<std::pair<std::string, std::int64_t>> ranked(counts.begin(),
                                                           counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  if (ranked.size() > static_cast<std::size_t>(max_size)) ranked.resize(max_size);

  Vocabulary vocab;
  for (const auto& [token, count] : ranked) vocab.add(token);
  return vocab;
}

Matrix random_init(const Vocabulary& vocab, int dim, std::uint64_t seed,
                   double scale) {
  if (dim < 1) throw ArgumentError("embedding dimension must be at least 1");
  Matrix m(vocab.size(), dim);
  Rng rng(seed);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = rng.uniform(-scale, scale);
  m.row(kPad).setZero();
  return m;
}

namespace {

bool parse_real(std::string_view field, double& out) {
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
      ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r')
      ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

bool is_header(const std::vector<std::string_view>& fields) {
  if (fields.size() != 2) return false;
  for (auto f : fields) {
    if (f.empty() || !std::all_of(f.begin(), f.end(),
                                  [](char c) { return c >= '0' && c <= '9'; }))
      return false;
  }
  return true;
}

}  // namespace

PretrainedLoad load_pretrained(std::istream& stream, const Vocabulary& vocab,
                               std::uint64_t seed, double scale) {
  std::string line;
  std::size_t line_no = 0;
  int dim = -1;
  std::vector<std::pair<int, std::vector<double>>> rows;
  std::vector<bool> found(vocab.size(), false);
  while (std::getline(stream, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (line_no == 1 && is_header(fields)) continue;
    if (fields.size() < 2)
      throw FormatError("embedding line " + std::to_string(line_no) +
                        ": expected a token followed by values");
    const int width = static_cast<int>(fields.size()) - 1;
    if (dim < 0) {
      dim = width;
    } else if (width != dim) {
      throw FormatError("embedding line " + std::to_string(line_no) + ": got " +
                        std::to_string(width) + " values, expected " +
                        std::to_string(dim));
    }
    std::vector<double> values(dim);
    for (int k = 0; k < dim; ++k) {
      if (!parse_real(fields[k + 1], values[k]))
        throw FormatError("embedding line " + std::to_string(line_no) +
                          ": non-numeric field '" + std::string(fields[k + 1]) +
                          "'");
    }
    const std::string token(fields[0]);
    if (!vocab.contains(token)) continue;
    const int idx = vocab.index_of(token);
    if (idx == kPad || idx == kUnk || found[idx]) continue;
    found[idx] = true;
    rows.emplace_back(idx, std::move(values));
  }
  if (dim < 0) throw FormatError("embedding stream contains no vectors");

  PretrainedLoad result{random_init(vocab, dim, seed, scale), 0.0};
  for (auto& [idx, values] : rows)
    for (int k = 0; k < dim; ++k) result.embeddings(idx, k) = values[k];
  const int candidates = vocab.size() - 2;
  result.coverage = candidates > 0 ? static_cast<double>(rows.size()) / candidates
                                   : 1.0;
  return result;
}

PretrainedLoad load_pretrained_file(const std::string& path,
                                    const Vocabulary& vocab, std::uint64_t seed,
                                    double scale) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open embedding file " + path);
  return load_pretrained(in, vocab, seed, scale);
}

EncodedSentence encode(const std::vector<std::string>& tokens,
                       const Vocabulary& vocab, int max_len) {
  if (max_len < 1) throw ArgumentError("max_len must be at least 1");
  EncodedSentence out;
  out.indices.assign(max_len, kPad);
  out.true_length = std::min(static_cast<int>(tokens.size()), max_len);
  for (int i = 0; i < out.true_length; ++i) out.indices[i] = vocab.index_of(tokens[i]);
  return out;
}

std::vector<std::string> decode(const EncodedSentence& sentence,
                                const Vocabulary& vocab) {
  std::vector<std::string> out;
  for (int idx : sentence.indices)
    if (idx != kPad) out.push_back(vocab.token(idx));
  return out;
}

}  // namespace absa
