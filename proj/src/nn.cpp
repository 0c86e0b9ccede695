#include "absa/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absa/error.hpp"

namespace absa::nn {

namespace {

using WindowMap = Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>;

// Row i of the map is the flattened window x_{i..i+h-1}; rows overlap in
// memory since the input is row-major.
WindowMap windows(const Matrix& input, int width) {
  const Eigen::Index n_windows = input.rows() - width + 1;
  return WindowMap(input.data(), n_windows, width * input.cols(),
                   Eigen::OuterStride<>(input.cols()));
}

void glorot(Matrix& m, int fan_in, int fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = rng.uniform(-limit, limit);
}

template <typename Array, typename P>
std::vector<Array> arrays_of(P& p) {
  std::vector<Array> out;
  out.push_back({"word_embeddings", p.word_embeddings.data(),
                 p.word_embeddings.rows(), p.word_embeddings.cols(), true});
  if (p.aspect_input == AspectInput::separate)
    out.push_back({"aspect_embeddings", p.aspect_embeddings.data(),
                   p.aspect_embeddings.rows(), p.aspect_embeddings.cols(), true});
  for (std::size_t b = 0; b < p.banks.size(); ++b) {
    auto& bank = p.banks[b];
    const std::string prefix = "conv" + std::to_string(bank.width) + ".";
    out.push_back({prefix + "weights", bank.weights.data(), bank.weights.rows(),
                   bank.weights.cols(), false});
    out.push_back({prefix + "bias", bank.bias.data(), bank.bias.size(), 1, false});
  }
  out.push_back({"output.weights", p.output_weights.data(),
                 p.output_weights.rows(), p.output_weights.cols(), false});
  out.push_back({"output.bias", p.output_bias.data(), p.output_bias.size(), 1,
                 false});
  return out;
}

void check_finite(const ModelParams& grads) {
  for (const auto& a : parameter_arrays(grads)) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!std::isfinite(a.data[i]))
        throw TrainingError("non-finite gradient in " + a.name + " at offset " +
                            std::to_string(i));
    }
  }
}

double inference_loss(const ModelParams& params, const Example& example,
                      const Vector& target) {
  return cross_entropy(predict(params, example), target);
}

}  // namespace

std::string to_string(Pooling p) { return p == Pooling::max ? "max" : "max+avg"; }

Pooling parse_pooling(const std::string& s) {
  if (s == "max") return Pooling::max;
  if (s == "max+avg") return Pooling::max_avg;
  throw ArgumentError("unknown pooling '" + s + "' (expected max or max+avg)");
}

std::string to_string(AspectInput a) {
  switch (a) {
    case AspectInput::none: return "none";
    case AspectInput::shared: return "shared";
    case AspectInput::separate: return "separate";
  }
  return "?";
}

AspectInput parse_aspect_input(const std::string& s) {
  if (s == "none") return AspectInput::none;
  if (s == "shared") return AspectInput::shared;
  if (s == "separate") return AspectInput::separate;
  throw ArgumentError("unknown aspect embedding mode '" + s + "'");
}

Matrix convolve(const Matrix& input, const ConvFilterBank& bank) {
  if (bank.width < 1 || input.rows() < bank.width)
    throw ShapeError("convolve: input has " + std::to_string(input.rows()) +
                     " rows, filter width is " + std::to_string(bank.width));
  if (bank.weights.cols() != bank.width * input.cols() ||
      bank.bias.size() != bank.weights.rows())
    throw ShapeError("convolve: filter bank shape does not match input width " +
                     std::to_string(input.cols()));
  Matrix out = windows(input, bank.width) * bank.weights.transpose();
  out.rowwise() += bank.bias.transpose();
  return out;
}

std::vector<FeatureMap> feature_maps(const Matrix& input,
                                     const ConvFilterBank& bank) {
  const Matrix pre = convolve(input, bank);
  std::vector<FeatureMap> maps(pre.cols());
  for (Eigen::Index j = 0; j < pre.cols(); ++j) {
    auto& fm = maps[j];
    fm.values.resize(pre.rows());
    for (Eigen::Index i = 0; i < pre.rows(); ++i) fm.values[i] = pre(i, j);
    std::vector<double> activated(fm.values);
    for (auto& v : activated) v = std::max(0.0, v);
    fm.argmax_index = max_over_time(activated).index;
  }
  return maps;
}

Vector relu(const Vector& v) { return v.cwiseMax(0.0); }

MaxPooled max_over_time(std::span<const double> values) {
  if (values.empty()) throw ShapeError("max_over_time: empty feature map");
  MaxPooled best{values[0], 0};
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > best.value) best = {values[i], static_cast<int>(i)};
  }
  return best;
}

double avg_over_time(std::span<const double> values, int valid) {
  if (values.empty()) throw ShapeError("avg_over_time: empty feature map");
  const std::size_t count =
      valid <= 0 ? values.size()
                 : std::min(values.size(), static_cast<std::size_t>(valid));
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) sum += values[i];
  return sum / static_cast<double>(count);
}

Vector softmax(const Vector& logits) {
  const double top = logits.maxCoeff();
  Vector e = (logits.array() - top).exp();
  return e / e.sum();
}

double cross_entropy(const Vector& pred, const Vector& target) {
  if (pred.size() != target.size())
    throw ShapeError("cross_entropy: prediction has " +
                     std::to_string(pred.size()) + " classes, target has " +
                     std::to_string(target.size()));
  double loss = 0.0;
  for (Eigen::Index j = 0; j < pred.size(); ++j) {
    if (target[j] != 0.0) loss -= target[j] * std::log(pred[j] + kLogEpsilon);
  }
  return loss;
}

int ModelParams::aspect_dim() const {
  switch (aspect_input) {
    case AspectInput::none: return 0;
    case AspectInput::shared: return word_dim();
    case AspectInput::separate: return static_cast<int>(aspect_embeddings.cols());
  }
  return 0;
}

int ModelParams::pooled_width() const {
  int total = 0;
  for (const auto& b : banks) total += b.count();
  return pooling == Pooling::max_avg ? 2 * total : total;
}

ModelParams init_params(const Architecture& arch, std::uint64_t seed,
                        double embedding_scale) {
  if (arch.vocab_size < 2 || arch.embedding_dim < 1 || arch.classes < 1 ||
      arch.filters < 1 || arch.widths.empty())
    throw ArgumentError("init_params: degenerate architecture");
  Rng rng(seed);
  ModelParams p;
  p.pooling = arch.pooling;
  p.aspect_input = arch.aspect_input;

  auto embedding_table = [&](int rows, int cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i)
      m.data()[i] = rng.uniform(-embedding_scale, embedding_scale);
    m.row(kPad).setZero();
    return m;
  };
  p.word_embeddings = embedding_table(arch.vocab_size, arch.embedding_dim);
  if (arch.aspect_input == AspectInput::separate) {
    if (arch.aspect_vocab_size < 2 || arch.aspect_dim < 1)
      throw ArgumentError("init_params: degenerate aspect space");
    p.aspect_embeddings = embedding_table(arch.aspect_vocab_size, arch.aspect_dim);
  }

  const int d = p.input_dim();
  for (int width : arch.widths) {
    if (width < 1) throw ArgumentError("init_params: filter width must be >= 1");
    ConvFilterBank bank;
    bank.width = width;
    bank.weights.resize(arch.filters, width * d);
    glorot(bank.weights, width * d, arch.filters, rng);
    bank.bias = Vector::Zero(arch.filters);
    p.banks.push_back(std::move(bank));
  }
  p.output_weights.resize(p.pooled_width(), arch.classes);
  glorot(p.output_weights, p.pooled_width(), arch.classes, rng);
  p.output_bias = Vector::Zero(arch.classes);
  return p;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams z;
  z.pooling = params.pooling;
  z.aspect_input = params.aspect_input;
  z.word_embeddings = Matrix::Zero(params.word_embeddings.rows(),
                                   params.word_embeddings.cols());
  z.aspect_embeddings = Matrix::Zero(params.aspect_embeddings.rows(),
                                     params.aspect_embeddings.cols());
  for (const auto& b : params.banks) {
    ConvFilterBank zb;
    zb.width = b.width;
    zb.weights = Matrix::Zero(b.weights.rows(), b.weights.cols());
    zb.bias = Vector::Zero(b.bias.size());
    z.banks.push_back(std::move(zb));
  }
  z.output_weights = Matrix::Zero(params.output_weights.rows(),
                                  params.output_weights.cols());
  z.output_bias = Vector::Zero(params.output_bias.size());
  return z;
}

std::vector<ParamArray> parameter_arrays(ModelParams& params) {
  return arrays_of<ParamArray>(params);
}

std::vector<ConstParamArray> parameter_arrays(const ModelParams& params) {
  return arrays_of<ConstParamArray>(params);
}

bool all_finite(const ModelParams& params) {
  for (const auto& a : parameter_arrays(params))
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!std::isfinite(a.data[i])) return false;
  return true;
}

void round_to_float(ModelParams& params) {
  for (auto& a : parameter_arrays(params))
    for (std::size_t i = 0; i < a.size(); ++i)
      a.data[i] = static_cast<double>(static_cast<float>(a.data[i]));
}

Vector aspect_vector(const ModelParams& params, const std::vector<int>& tokens) {
  const int dim = params.aspect_dim();
  Vector v = Vector::Zero(dim);
  if (dim == 0 || tokens.empty()) return v;
  const Matrix& table = params.aspect_table();
  for (int t : tokens) {
    if (t < 0 || t >= table.rows())
      throw ShapeError("aspect token index " + std::to_string(t) +
                       " outside the aspect table");
    v += table.row(t).transpose();
  }
  return v / static_cast<double>(tokens.size());
}

Matrix build_input(const EncodedSentence& sentence, const Matrix& word_embeddings,
                   const Vector& aspect_vector) {
  const auto& idx = sentence.indices;
  const auto k = word_embeddings.cols();
  const auto ka = aspect_vector.size();
  Matrix x(static_cast<Eigen::Index>(idx.size()), k + ka);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= word_embeddings.rows())
      throw ShapeError("build_input: token index " + std::to_string(idx[i]) +
                       " outside the embedding table");
    x.row(i).head(k) = word_embeddings.row(idx[i]);
  }
  if (ka > 0) x.rightCols(ka).rowwise() = aspect_vector.transpose();
  return x;
}

Matrix build_input(const ModelParams& params, const Example& example) {
  if (params.aspect_input == AspectInput::none && !example.aspect_tokens.empty())
    throw ShapeError("build_input: aspect tokens given to a model without aspect input");
  return build_input(example.sentence, params.word_embeddings,
                     aspect_vector(params, example.aspect_tokens));
}

DropoutPlan::DropoutPlan(double rate, Rng* rng) : rate_(rate), rng_(rng) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw ArgumentError("dropout rate must lie in [0, 1)");
}

ForwardTrace forward(const ModelParams& params, const Example& example,
                     const DropoutPlan& plan) {
  ForwardTrace t;
  t.params = &params;
  t.version = params.version;
  t.example = example;
  t.input = build_input(params, example);

  const int n_banks = static_cast<int>(params.banks.size());
  int total_filters = 0;
  for (const auto& b : params.banks) total_filters += b.count();
  if (params.pooled_width() != params.output_weights.rows())
    throw ShapeError("forward: pooled width " +
                     std::to_string(params.pooled_width()) +
                     " does not match output layer input " +
                     std::to_string(params.output_weights.rows()));

  t.pooled.resize(params.pooled_width());
  t.pre_activations.reserve(n_banks);
  t.argmax.resize(n_banks);
  t.avg_counts.resize(n_banks);
  int offset = 0;
  for (int b = 0; b < n_banks; ++b) {
    const auto& bank = params.banks[b];
    if (bank.weights.cols() != bank.width * t.input.cols())
      throw ShapeError("forward: bank " + std::to_string(bank.width) +
                       " expects input width " +
                       std::to_string(bank.input_dim()) + ", got " +
                       std::to_string(t.input.cols()));
    t.pre_activations.push_back(convolve(t.input, bank));
    const Matrix& pre = t.pre_activations.back();
    const auto n_windows = static_cast<int>(pre.rows());
    const int avg_count =
        std::clamp(example.sentence.true_length - bank.width + 1, 1, n_windows);
    t.avg_counts[b] = avg_count;
    auto& arg = t.argmax[b];
    arg.resize(bank.count());
    for (int j = 0; j < bank.count(); ++j) {
      double best = std::max(0.0, pre(0, j));
      int best_i = 0;
      for (int i = 1; i < n_windows; ++i) {
        const double v = std::max(0.0, pre(i, j));
        if (v > best) {
          best = v;
          best_i = i;
        }
      }
      arg[j] = best_i;
      t.pooled[offset + j] = best;
      if (params.pooling == Pooling::max_avg) {
        double sum = 0.0;
        for (int i = 0; i < avg_count; ++i) sum += std::max(0.0, pre(i, j));
        t.pooled[total_filters + offset + j] = sum / avg_count;
      }
    }
    offset += bank.count();
  }

  if (plan.training() && plan.rate() > 0.0) {
    t.mask.resize(t.pooled.size());
    const double keep_scale = 1.0 / (1.0 - plan.rate());
    for (Eigen::Index i = 0; i < t.mask.size(); ++i)
      t.mask[i] = plan.rng()->uniform01() < plan.rate() ? 0.0 : keep_scale;
    t.dropped = t.pooled.cwiseProduct(t.mask);
  } else {
    t.dropped = t.pooled;
  }

  const Vector logits =
      params.output_weights.transpose() * t.dropped + params.output_bias;
  t.probs = softmax(logits);
  return t;
}

Vector predict(const ModelParams& params, const Example& example) {
  return forward(params, example, DropoutPlan::inference()).probs;
}

void backward(const ModelParams& params, const ForwardTrace& trace,
              const Vector& target, ModelParams& grads) {
  if (trace.params != &params || trace.version != params.version)
    throw UsageError("backward: trace does not belong to these parameters");
  if (target.size() != trace.probs.size())
    throw ShapeError("backward: target has " + std::to_string(target.size()) +
                     " classes, model has " + std::to_string(trace.probs.size()));
  if (grads.banks.size() != params.banks.size() ||
      grads.output_weights.rows() != params.output_weights.rows() ||
      grads.word_embeddings.rows() != params.word_embeddings.rows())
    throw ShapeError("backward: gradient buffer shape mismatch");

  // dL/dlogit_k for L = -sum_j t_j log(p_j + eps), exact in eps.
  const Vector& p = trace.probs;
  Vector ratio(p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j)
    ratio[j] = target[j] * p[j] / (p[j] + kLogEpsilon);
  const Vector dlogits = p * ratio.sum() - ratio;

  grads.output_weights.noalias() += trace.dropped * dlogits.transpose();
  grads.output_bias += dlogits;
  Vector dpooled = params.output_weights * dlogits;
  if (trace.mask.size() > 0) dpooled = dpooled.cwiseProduct(trace.mask);

  int total_filters = 0;
  for (const auto& b : params.banks) total_filters += b.count();

  Matrix dinput = Matrix::Zero(trace.input.rows(), trace.input.cols());
  const Eigen::Index d = trace.input.cols();
  int offset = 0;
  for (std::size_t b = 0; b < params.banks.size(); ++b) {
    const auto& bank = params.banks[b];
    auto& gbank = grads.banks[b];
    const Matrix& pre = trace.pre_activations[b];
    const WindowMap win = windows(trace.input, bank.width);
    const Eigen::Index span = bank.width * d;

    if (params.pooling == Pooling::max) {
      // Only the argmax window of each filter receives gradient.
      for (int j = 0; j < bank.count(); ++j) {
        const int i = trace.argmax[b][j];
        const double g = dpooled[offset + j];
        if (g == 0.0 || pre(i, j) <= 0.0) continue;
        gbank.weights.row(j) += g * win.row(i);
        gbank.bias[j] += g;
        Eigen::Map<Eigen::RowVectorXd> dwin(dinput.data() + i * d, span);
        dwin += g * bank.weights.row(j);
      }
    } else {
      Matrix dpre = Matrix::Zero(pre.rows(), pre.cols());
      const int count = trace.avg_counts[b];
      for (int j = 0; j < bank.count(); ++j) {
        const int am = trace.argmax[b][j];
        if (pre(am, j) > 0.0) dpre(am, j) += dpooled[offset + j];
        const double g_avg = dpooled[total_filters + offset + j] / count;
        for (int i = 0; i < count; ++i)
          if (pre(i, j) > 0.0) dpre(i, j) += g_avg;
      }
      gbank.weights.noalias() += dpre.transpose() * win;
      gbank.bias += dpre.colwise().sum().transpose();
      const Matrix dwin = dpre * bank.weights;
      for (Eigen::Index i = 0; i < dwin.rows(); ++i) {
        Eigen::Map<Eigen::RowVectorXd> dst(dinput.data() + i * d, span);
        dst += dwin.row(i);
      }
    }
    offset += bank.count();
  }

  const int k = params.word_dim();
  const auto& idx = trace.example.sentence.indices;
  for (std::size_t i = 0; i < idx.size(); ++i)
    grads.word_embeddings.row(idx[i]) += dinput.row(i).head(k);

  const int ka = params.aspect_dim();
  const auto& tokens = trace.example.aspect_tokens;
  if (ka > 0 && !tokens.empty()) {
    const Eigen::RowVectorXd dav =
        dinput.rightCols(ka).colwise().sum() / static_cast<double>(tokens.size());
    Matrix& table = params.aspect_input == AspectInput::shared
                        ? grads.word_embeddings
                        : grads.aspect_embeddings;
    for (int tok : tokens) table.row(tok) += dav;
  }
}

ModelParams backward(const ModelParams& params, const ForwardTrace& trace,
                     const Vector& target) {
  ModelParams grads = zeros_like(params);
  backward(params, trace, target, grads);
  return grads;
}

AdadeltaState make_adadelta(const ModelParams& params, double rho,
                            double epsilon) {
  return AdadeltaState{zeros_like(params), zeros_like(params), rho, epsilon};
}

void adadelta_step(ModelParams& params, const ModelParams& grads,
                   AdadeltaState& state) {
  check_finite(grads);
  auto p_arrays = parameter_arrays(params);
  const auto g_arrays = parameter_arrays(grads);
  auto sq_g = parameter_arrays(state.mean_sq_grad);
  auto sq_d = parameter_arrays(state.mean_sq_delta);
  if (g_arrays.size() != p_arrays.size() || sq_g.size() != p_arrays.size() ||
      sq_d.size() != p_arrays.size())
    throw ShapeError("adadelta_step: parameter layout mismatch");
  const double rho = state.rho;
  const double eps = state.epsilon;
  for (std::size_t a = 0; a < p_arrays.size(); ++a) {
    if (g_arrays[a].size() != p_arrays[a].size() ||
        sq_g[a].size() != p_arrays[a].size())
      throw ShapeError("adadelta_step: shape mismatch in " + p_arrays[a].name);
    const std::size_t start =
        p_arrays[a].embedding_table ? static_cast<std::size_t>(p_arrays[a].cols) : 0;
    double* x = p_arrays[a].data;
    const double* g = g_arrays[a].data;
    double* eg = sq_g[a].data;
    double* ed = sq_d[a].data;
    for (std::size_t i = start; i < p_arrays[a].size(); ++i) {
      eg[i] = rho * eg[i] + (1.0 - rho) * g[i] * g[i];
      const double delta = -std::sqrt(ed[i] + eps) / std::sqrt(eg[i] + eps) * g[i];
      ed[i] = rho * ed[i] + (1.0 - rho) * delta * delta;
      x[i] += delta;
    }
  }
  ++params.version;
}

double compare_gradients(const ModelParams& params, const Example& example,
                         const Vector& target, const ModelParams& analytic,
                         const GradientCheckOptions& options) {
  ModelParams probe = params;
  auto arrays = parameter_arrays(probe);
  const auto expected = parameter_arrays(analytic);
  if (expected.size() != arrays.size())
    throw ShapeError("compare_gradients: gradient layout mismatch");
  Rng rng(options.seed);
  double worst = 0.0;
  for (std::size_t a = 0; a < arrays.size(); ++a) {
    std::vector<std::size_t> positions(arrays[a].size());
    std::iota(positions.begin(), positions.end(), 0);
    if (options.max_per_array > 0 && positions.size() > options.max_per_array) {
      rng.shuffle(positions);
      positions.resize(options.max_per_array);
      std::sort(positions.begin(), positions.end());
    }
    for (std::size_t i : positions) {
      double& x = arrays[a].data[i];
      const double saved = x;
      x = saved + options.epsilon;
      const double up = inference_loss(probe, example, target);
      x = saved - options.epsilon;
      const double down = inference_loss(probe, example, target);
      x = saved;
      const double numeric = (up - down) / (2.0 * options.epsilon);
      const double exact = expected[a].data[i];
      worst = std::max(worst,
                       std::abs(exact - numeric) / std::max(1.0, std::abs(exact)));
    }
  }
  return worst;
}

double gradient_check(const ModelParams& params, const Example& example,
                      const Vector& target, const GradientCheckOptions& options) {
  const ForwardTrace trace = forward(params, example, DropoutPlan::inference());
  const ModelParams grads = backward(params, trace, target);
  return compare_gradients(params, example, target, grads, options);
}

}  // namespace absa::nn
