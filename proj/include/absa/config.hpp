#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "absa/nn.hpp"

namespace absa {

enum class Task { aspect, sentiment };

// Every knob of an experiment. Defaults are the published hyperparameters;
// any field can be overridden from a JSON config file or the command line.
struct ExperimentConfig {
  std::string language = "en";
  std::string domain;

  int batch_size = 10;
  int max_len = 100;
  int embedding_dim = 300;
  double dropout = 0.5;
  int filters = 100;
  std::vector<int> aspect_filter_widths{3, 4, 5};
  std::vector<int> sentiment_filter_widths{4, 5, 6};
  int epochs = 15;
  int patience = 3;
  int min_count = 5;
  double validation_fraction = 0.2;
  int vocab_size = 10000;
  std::uint64_t seed = 1;

  nn::Pooling pooling = nn::Pooling::max;
  // "auto" resolves to shared for English and separate otherwise.
  std::string aspect_embedding = "auto";
  // Separate-space aspect width; 0 means embedding_dim.
  int aspect_dim = 0;
  // Ablation: feed a zero aspect vector to the polarity model.
  bool zero_aspect_vector = false;

  std::optional<std::string> pretrained;
  double init_scale = 0.25;
  double adadelta_rho = 0.95;
  double adadelta_epsilon = 1e-6;
  int threshold_resolution = 100;

  const std::vector<int>& filter_widths(Task task) const {
    return task == Task::aspect ? aspect_filter_widths : sentiment_filter_widths;
  }
  nn::AspectInput resolved_aspect_input() const;
  int resolved_aspect_dim() const {
    return aspect_dim > 0 ? aspect_dim : embedding_dim;
  }

  // Throws UsageError naming the offending field.
  void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
// Unknown keys are rejected; missing keys keep their defaults.
void from_json(const nlohmann::json& j, ExperimentConfig& c);

ExperimentConfig load_config_file(const std::string& path);

}  // namespace absa
