#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "absa/nn.hpp"

namespace absa {

struct TrainingExample {
  nn::Example input;
  Vector target;
};

struct TrainerOptions {
  int batch_size = 10;
  int epochs = 15;
  int patience = 3;
  double dropout = 0.5;
  double rho = 0.95;
  double epsilon = 1e-6;
  std::uint64_t seed = 1;
};

struct EpochRecord {
  int epoch = 0;
  int batches = 0;
  double train_loss = 0.0;
  double valid_loss = 0.0;
  double valid_metric = 0.0;
  bool improved = false;
};

struct TrainingResult {
  nn::ModelParams best;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
};

// Task-specific validation score, reported per epoch (not used for stopping).
using MetricFn = std::function<double(const nn::ModelParams&)>;
using EpochCallback = std::function<void(const EpochRecord&)>;

double mean_loss(const nn::ModelParams& params,
                 const std::vector<TrainingExample>& examples);

// Shuffled mini-batch Adadelta with batch-averaged gradients. Keeps the
// snapshot with the lowest validation loss and stops after `patience`
// epochs without improvement. With no validation data every epoch counts
// as an improvement. The returned snapshot is rounded to float precision.
TrainingResult train_network(nn::ModelParams params,
                             const std::vector<TrainingExample>& train,
                             const std::vector<TrainingExample>& valid,
                             const TrainerOptions& options,
                             const MetricFn& metric = {},
                             const EpochCallback& on_epoch = {});

}  // namespace absa
