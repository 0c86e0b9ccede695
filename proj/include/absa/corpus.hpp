#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace absa {

// ENTITY#ATTRIBUTE, both parts matching [A-Z0-9_]+.
class AspectLabel {
 public:
  AspectLabel(std::string entity, std::string attribute);

  // Parses the canonical "ENTITY#ATTRIBUTE" form; throws ParseError.
  static AspectLabel parse(std::string_view canonical);

  const std::string& entity() const { return entity_; }
  const std::string& attribute() const { return attribute_; }
  std::string canonical() const { return entity_ + "#" + attribute_; }

  auto operator<=>(const AspectLabel&) const = default;

 private:
  std::string entity_;
  std::string attribute_;
};

enum class Polarity { positive = 0, negative = 1, neutral = 2 };

inline constexpr int kPolarityCount = 3;

std::string_view to_string(Polarity p);
// Throws ParseError for anything outside {positive, negative, neutral}.
Polarity parse_polarity(std::string_view s);

// Polarity is absent on aspect-only prediction files.
struct Opinion {
  AspectLabel category;
  std::optional<Polarity> polarity;

  bool operator==(const Opinion&) const = default;
};

struct Sentence {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;
  std::vector<Opinion> opinions;

  bool operator==(const Sentence&) const = default;
};

struct Dataset {
  std::string language;
  std::string domain;
  std::vector<Sentence> sentences;

  bool operator==(const Dataset&) const = default;
  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
};

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
};

// Whitespace split, lowercasing, and detachment of leading/trailing
// punctuation as single-character tokens.
class DefaultTokenizer : public Tokenizer {
 public:
  std::vector<std::string> tokenize(std::string_view text) const override;
};

// Placeholder for a Chinese word segmenter. Always throws; feed
// pre-segmented, space-separated text through DefaultTokenizer instead.
class ChineseSegmenter : public Tokenizer {
 public:
  std::vector<std::string> tokenize(std::string_view text) const override;
};

std::vector<std::string> tokenize(std::string_view text);

// UTF-8 aware lowercasing for ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic. Other code points pass through unchanged.
std::string to_lower_utf8(std::string_view text);

// Parses a SemEval ABSA document. Every <sentence> element anywhere in the
// tree becomes one Sentence. Throws ParseError; never returns partial data.
Dataset parse_semeval_xml(std::string_view document,
                          const Tokenizer& tokenizer = DefaultTokenizer{});
Dataset read_semeval_file(const std::string& path,
                          const Tokenizer& tokenizer = DefaultTokenizer{});

std::string write_semeval_xml(const Dataset& dataset);
void write_semeval_file(const std::string& path, const Dataset& dataset);

// Validation receives round(fraction * N) sentences; both parts keep the
// source order.
std::pair<Dataset, Dataset> split_train_validation(const Dataset& dataset,
                                                   double fraction,
                                                   std::uint64_t seed);

}  // namespace absa
