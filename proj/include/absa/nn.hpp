#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absa/random.hpp"
#include "absa/vocab.hpp"

namespace absa::nn {

enum class Pooling { max, max_avg };
enum class AspectInput { none, shared, separate };

std::string to_string(Pooling p);
Pooling parse_pooling(const std::string& s);
std::string to_string(AspectInput a);
AspectInput parse_aspect_input(const std::string& s);

// `count` filters of `width` tokens over d-column input rows. Filter j is
// weights.row(j), a flattened width x d window in row-major order.
struct ConvFilterBank {
  int width = 0;
  Matrix weights;
  Vector bias;

  int count() const { return static_cast<int>(weights.rows()); }
  int input_dim() const {
    return width > 0 ? static_cast<int>(weights.cols()) / width : 0;
  }
};

struct FeatureMap {
  std::vector<double> values;
  int argmax_index = 0;
};

// Pre-activation feature maps: column j of the (n-h+1) x count result is the
// map of filter j. Throws ShapeError if the input is shorter than the filter.
Matrix convolve(const Matrix& input, const ConvFilterBank& bank);

// Column-wise view of convolve(), with argmax recorded on the ReLU output.
std::vector<FeatureMap> feature_maps(const Matrix& input,
                                     const ConvFilterBank& bank);

Vector relu(const Vector& v);

struct MaxPooled {
  double value;
  int index;
};

// Smallest index wins ties.
MaxPooled max_over_time(std::span<const double> values);
// Mean over the first `valid` entries (all entries when valid <= 0).
double avg_over_time(std::span<const double> values, int valid = 0);

Vector softmax(const Vector& logits);

inline constexpr double kLogEpsilon = 1e-12;
double cross_entropy(const Vector& pred, const Vector& target);

struct Architecture {
  int vocab_size = 0;
  int embedding_dim = 300;
  // Separate aspect token space; ignored unless aspect_input == separate.
  int aspect_vocab_size = 0;
  int aspect_dim = 300;
  int classes = 2;
  std::vector<int> widths{3, 4, 5};
  int filters = 100;
  Pooling pooling = Pooling::max;
  AspectInput aspect_input = AspectInput::none;
};

struct ModelParams {
  Matrix word_embeddings;    // V x k
  Matrix aspect_embeddings;  // Va x ka, empty unless aspect_input == separate
  std::vector<ConvFilterBank> banks;
  Matrix output_weights;  // pooled_width x classes
  Vector output_bias;     // classes
  Pooling pooling = Pooling::max;
  AspectInput aspect_input = AspectInput::none;
  // Bumped on every optimizer step; traces from older versions are stale.
  std::uint64_t version = 0;

  int word_dim() const { return static_cast<int>(word_embeddings.cols()); }
  int aspect_dim() const;
  int input_dim() const { return word_dim() + aspect_dim(); }
  int pooled_width() const;
  int classes() const { return static_cast<int>(output_bias.size()); }
  const Matrix& aspect_table() const {
    return aspect_input == AspectInput::shared ? word_embeddings
                                               : aspect_embeddings;
  }
};

// Embedding rows uniform in [-embedding_scale, embedding_scale] (PAD zero),
// filters and output layer Glorot-uniform.
ModelParams init_params(const Architecture& arch, std::uint64_t seed,
                        double embedding_scale = 0.25);

ModelParams zeros_like(const ModelParams& params);

// Every trainable array, in serialization order.
struct ParamArray {
  std::string name;
  double* data;
  Eigen::Index rows;
  Eigen::Index cols;
  bool embedding_table;
  std::size_t size() const { return static_cast<std::size_t>(rows * cols); }
};
std::vector<ParamArray> parameter_arrays(ModelParams& params);

struct ConstParamArray {
  std::string name;
  const double* data;
  Eigen::Index rows;
  Eigen::Index cols;
  bool embedding_table;
  std::size_t size() const { return static_cast<std::size_t>(rows * cols); }
};
std::vector<ConstParamArray> parameter_arrays(const ModelParams& params);

bool all_finite(const ModelParams& params);

// Rounds every parameter to the nearest float so that the float32 model
// format stores it exactly.
void round_to_float(ModelParams& params);

struct Example {
  EncodedSentence sentence;
  // Rows of the aspect table averaged into the aspect vector. Empty gives a
  // zero aspect vector.
  std::vector<int> aspect_tokens;
};

Vector aspect_vector(const ModelParams& params, const std::vector<int>& tokens);

// Row i = [word embedding of token i | aspect_vector], PAD rows included.
Matrix build_input(const EncodedSentence& sentence, const Matrix& word_embeddings,
                   const Vector& aspect_vector);
Matrix build_input(const ModelParams& params, const Example& example);

class DropoutPlan {
 public:
  // Identity whatever the rate.
  static DropoutPlan inference(double rate = 0.0) { return DropoutPlan(rate, nullptr); }
  // Inverted dropout: kept units scale by 1 / (1 - rate).
  static DropoutPlan train(double rate, Rng& rng) { return DropoutPlan(rate, &rng); }

  bool training() const { return rng_ != nullptr; }
  double rate() const { return rate_; }
  Rng* rng() const { return rng_; }

 private:
  DropoutPlan(double rate, Rng* rng);
  double rate_;
  Rng* rng_;
};

struct ForwardTrace {
  const ModelParams* params = nullptr;
  std::uint64_t version = 0;
  Example example;
  Matrix input;
  std::vector<Matrix> pre_activations;  // per bank
  std::vector<std::vector<int>> argmax;  // per bank, per filter
  std::vector<int> avg_counts;           // per bank
  Vector pooled;
  Vector mask;  // empty when dropout is the identity
  Vector dropped;
  Vector probs;
};

// embed -> concat aspect -> convolve -> relu -> pool -> dropout -> affine
// -> softmax.
ForwardTrace forward(const ModelParams& params, const Example& example,
                     const DropoutPlan& plan);

Vector predict(const ModelParams& params, const Example& example);

// Adds the gradient of cross_entropy(forward(...), target) to `grads`.
// Throws UsageError on a trace from different or since-updated params.
void backward(const ModelParams& params, const ForwardTrace& trace,
              const Vector& target, ModelParams& grads);

ModelParams backward(const ModelParams& params, const ForwardTrace& trace,
                     const Vector& target);

struct AdadeltaState {
  ModelParams mean_sq_grad;
  ModelParams mean_sq_delta;
  double rho = 0.95;
  double epsilon = 1e-6;
};

AdadeltaState make_adadelta(const ModelParams& params, double rho = 0.95,
                            double epsilon = 1e-6);

// One Adadelta update on every scalar. PAD rows of embedding tables are
// never touched. Throws TrainingError on a non-finite gradient.
void adadelta_step(ModelParams& params, const ModelParams& grads,
                   AdadeltaState& state);

struct GradientCheckOptions {
  double epsilon = 1e-4;
  // Per-array cap on checked scalars; 0 checks everything.
  std::size_t max_per_array = 0;
  std::uint64_t seed = 0;
};

// Worst |analytic - numeric| / max(1, |analytic|) over the checked scalars,
// with the numeric side from central differences of the inference loss.
double compare_gradients(const ModelParams& params, const Example& example,
                         const Vector& target, const ModelParams& analytic,
                         const GradientCheckOptions& options = {});

double gradient_check(const ModelParams& params, const Example& example,
                      const Vector& target,
                      const GradientCheckOptions& options = {});

}  // namespace absa::nn
