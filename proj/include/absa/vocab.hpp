#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace absa {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr int kPad = 0;
inline constexpr int kUnk = 1;
inline constexpr const char* kPadToken = "<pad>";
inline constexpr const char* kUnkToken = "<unk>";

// Dense token -> index map with PAD at 0 and UNK at 1.
class Vocabulary {
 public:
  Vocabulary();

  // Rebuilds a vocabulary from its index-ordered token list (as stored in a
  // model manifest). The first two entries must be the reserved tokens.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  int index_of(const std::string& token) const;
  bool contains(const std::string& token) const;
  const std::string& token(int index) const { return tokens_.at(index); }
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Appends a token unless present; returns its index.
  int add(const std::string& token);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// Keeps the max_size most frequent tokens; ties go to the lexicographically
// smaller token.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus,
                            int max_size = 10000);

// Uniform [-scale, scale] rows, PAD row zero.
Matrix random_init(const Vocabulary& vocab, int dim, std::uint64_t seed,
                   double scale = 0.25);

struct PretrainedLoad {
  Matrix embeddings;
  double coverage = 0.0;  // found / (V - 2)
};

// GloVe-style text: "token v1 ... vk" per line. An optional leading
// "<count> <dim>" header line is skipped. Rows for tokens missing from the
// stream fall back to random_init with the same seed.
PretrainedLoad load_pretrained(std::istream& stream, const Vocabulary& vocab,
                               std::uint64_t seed, double scale = 0.25);
PretrainedLoad load_pretrained_file(const std::string& path,
                                    const Vocabulary& vocab, std::uint64_t seed,
                                    double scale = 0.25);

struct EncodedSentence {
  std::vector<int> indices;  // padded to max_len
  int true_length = 0;
};

EncodedSentence encode(const std::vector<std::string>& tokens,
                       const Vocabulary& vocab, int max_len = 100);

// Inverse of encode for in-vocabulary input; PAD positions are dropped.
std::vector<std::string> decode(const EncodedSentence& sentence,
                                const Vocabulary& vocab);

}  // namespace absa
