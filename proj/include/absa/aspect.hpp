#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "absa/config.hpp"
#include "absa/corpus.hpp"
#include "absa/metrics.hpp"
#include "absa/train.hpp"
#include "absa/vocab.hpp"

namespace absa {

// Output classes of the detection model: kept aspects in canonical order,
// then OTHER (rare aspects), then NONE (no aspect).
struct AspectInventory {
  struct Entry {
    AspectLabel label;
    int count;
  };

  std::vector<Entry> kept;
  std::vector<Entry> other_members;
  std::optional<AspectLabel> most_frequent_replaced;
  int min_count = 5;

  int class_count() const { return static_cast<int>(kept.size()) + 2; }
  int other_class() const { return static_cast<int>(kept.size()); }
  int none_class() const { return static_cast<int>(kept.size()) + 1; }

  // Kept index, OTHER for a replaced aspect, nullopt if never seen.
  std::optional<int> class_of(const AspectLabel& label) const;
  std::string class_name(int index) const;
};

AspectInventory build_inventory(const Dataset& train, int min_count = 5);

void to_json(nlohmann::json& j, const AspectInventory& inv);
void from_json(const nlohmann::json& j, AspectInventory& inv);

struct TargetStats {
  std::size_t unseen_aspects = 0;
};

// 1/n on each of the n distinct classes present; NONE = 1 for a sentence
// with no opinions. Aspects unseen at training time count toward OTHER.
Vector make_target(const Sentence& sentence, const AspectInventory& inventory,
                   TargetStats* stats = nullptr);

// Thresholds i / resolution for i = 1 .. resolution / 2.
std::vector<double> threshold_grid(int resolution = 100);

// Classes with p >= tau, OTHER mapped to its designated replacement, NONE
// dropped.
AspectSet aspects_from_probs(const Vector& probs, double tau,
                             const AspectInventory& inventory);

struct ThresholdChoice {
  double threshold = 0.0;
  Slot1Score score;
};

// Maximizes micro-F1 over the grid; the smallest threshold wins ties.
ThresholdChoice select_threshold_from_probs(const std::vector<Vector>& probs,
                                            const std::vector<AspectSet>& gold,
                                            const AspectInventory& inventory,
                                            int resolution = 100);

struct AspectModel {
  ExperimentConfig config;
  Vocabulary vocab;
  AspectInventory inventory;
  nn::ModelParams params;
  double threshold = 0.5;

  nn::Example example(const Sentence& sentence) const;
  Vector probabilities(const Sentence& sentence) const;
};

ThresholdChoice select_threshold(const AspectModel& model, const Dataset& valid,
                                 int resolution = 100);

AspectSet predict_aspects(const AspectModel& model, const Sentence& sentence,
                          double tau);
AspectSet predict_aspects(const AspectModel& model, const Sentence& sentence);

Slot1Score evaluate_aspects(const AspectModel& model, const Dataset& gold);

struct AspectTrainingResult {
  AspectModel model;
  std::vector<EpochRecord> history;
  ThresholdChoice validation;
  double pretrained_coverage = 0.0;
  std::size_t unseen_valid_aspects = 0;
};

// Throws ArgumentError on an empty training set. An empty validation set
// disables early stopping, and the threshold is then tuned on the training
// set instead.
AspectTrainingResult train_aspect_model(const Dataset& train,
                                        const Dataset& valid,
                                        const ExperimentConfig& config,
                                        const EpochCallback& on_epoch = {});

void save_aspect_model(const std::filesystem::path& dir, const AspectModel& model);
AspectModel load_aspect_model(const std::filesystem::path& dir);

}  // namespace absa
