#include "absa/train.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "absa/error.hpp"
#include "absa/random.hpp"

namespace absa {

double mean_loss(const nn::ModelParams& params,
                 const std::vector<TrainingExample>& examples) {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : examples)
    total += nn::cross_entropy(nn::predict(params, ex.input), ex.target);
  return total / static_cast<double>(examples.size());
}

namespace {

void scale_gradients(nn::ModelParams& grads, double factor) {
  for (auto& a : nn::parameter_arrays(grads))
    for (std::size_t i = 0; i < a.size(); ++i) a.data[i] *= factor;
}

void zero_gradients(nn::ModelParams& grads) {
  for (auto& a : nn::parameter_arrays(grads)) std::fill(a.data, a.data + a.size(), 0.0);
}

}  // namespace

TrainingResult train_network(nn::ModelParams params,
                             const std::vector<TrainingExample>& train,
                             const std::vector<TrainingExample>& valid,
                             const TrainerOptions& options,
                             const MetricFn& metric,
                             const EpochCallback& on_epoch) {
  if (train.empty()) throw ArgumentError("training set is empty");
  if (options.batch_size < 1 || options.epochs < 1)
    throw ArgumentError("batch size and epoch count must be positive");

  Rng rng(options.seed);
  auto state = nn::make_adadelta(params, options.rho, options.epsilon);
  nn::ModelParams grads = nn::zeros_like(params);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  TrainingResult result;
  result.best = params;
  double best_valid = std::numeric_limits<double>::infinity();
  int stale_epochs = 0;

  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(options.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(options.batch_size));
      zero_gradients(grads);
      for (std::size_t b = start; b < end; ++b) {
        const auto& ex = train[order[b]];
        const auto trace =
            nn::forward(params, ex.input, nn::DropoutPlan::train(options.dropout, rng));
        epoch_loss += nn::cross_entropy(trace.probs, ex.target);
        nn::backward(params, trace, ex.target, grads);
      }
      scale_gradients(grads, 1.0 / static_cast<double>(end - start));
      ++batches;
      try {
        nn::adadelta_step(params, grads, state);
      } catch (const TrainingError& e) {
        throw TrainingError("epoch " + std::to_string(epoch) + ": " + e.what());
      }
    }

    EpochRecord record;
    record.epoch = epoch;
    record.batches = batches;
    record.train_loss = epoch_loss / static_cast<double>(train.size());
    record.valid_loss = mean_loss(params, valid);
    if (metric) record.valid_metric = metric(params);
    record.improved = valid.empty() || record.valid_loss < best_valid;
    if (record.improved) {
      best_valid = record.valid_loss;
      result.best = params;
      result.best_epoch = epoch;
      stale_epochs = 0;
    } else {
      ++stale_epochs;
    }
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);
    if (stale_epochs >= options.patience) break;
  }

  nn::round_to_float(result.best);
  result.best.version = 0;
  return result;
}

}  // namespace absa
