#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "absa/aspect.hpp"
#include "absa/config.hpp"
#include "absa/corpus.hpp"
#include "absa/metrics.hpp"
#include "absa/nn.hpp"
#include "absa/train.hpp"
#include "absa/vocab.hpp"

namespace absa {

// FOOD#STYLE_OPTIONS -> ["food", "style", "options"].
std::vector<std::string> aspect_tokens(const AspectLabel& label);

// Where aspect tokens are embedded. In shared mode lookups resolve in the
// word vocabulary and `vocab` is unused.
struct AspectTokenSpace {
  nn::AspectInput mode = nn::AspectInput::separate;
  Vocabulary vocab;
};

struct PolarityExample {
  EncodedSentence sentence;
  AspectLabel aspect;
  Polarity gold;
};

// One example per (sentence, opinion). Throws ArgumentError on an opinion
// without a polarity.
std::vector<PolarityExample> polarity_examples(const Dataset& dataset,
                                               const Vocabulary& vocab,
                                               int max_len);

Vector polarity_target(Polarity p);

// Argmax with ties resolved in the order positive, negative, neutral.
Polarity argmax_polarity(const Vector& probs);

struct SentimentModel {
  ExperimentConfig config;
  Vocabulary vocab;
  AspectTokenSpace aspect_space;
  std::vector<AspectLabel> aspects;  // raw training label set
  nn::ModelParams params;

  // Rows of the aspect table for the label's tokens (UNK for unknown
  // tokens); empty when the aspect vector is ablated.
  std::vector<int> aspect_token_indices(const AspectLabel& label) const;
  nn::Example example(const EncodedSentence& sentence, const AspectLabel& label) const;
  nn::Example example(const Sentence& sentence, const AspectLabel& label) const;
};

Vector aspect_vector(const SentimentModel& model, const AspectLabel& label);

struct PolarityPrediction {
  Polarity polarity;
  Vector probs;
};

PolarityPrediction predict_polarity(const SentimentModel& model,
                                    const Sentence& sentence,
                                    const AspectLabel& aspect);

// Gold-aspect protocol: every opinion of `gold` that carries a polarity.
Slot3Score evaluate_polarity(const SentimentModel& model, const Dataset& gold);

// Pipeline protocol: aspects come from the detection model. A gold opinion
// is correct only if its aspect was detected and its polarity matches.
Slot3Score evaluate_polarity_pipeline(const SentimentModel& model,
                                      const AspectModel& detector,
                                      const Dataset& gold);

// Fills the polarity of every opinion already present in `dataset`.
Dataset annotate_polarity(const SentimentModel& model, Dataset dataset);

struct SentimentTrainingResult {
  SentimentModel model;
  std::vector<EpochRecord> history;
  std::optional<Slot3Score> validation;
  double pretrained_coverage = 0.0;
};

SentimentTrainingResult train_sentiment_model(const Dataset& train,
                                              const Dataset& valid,
                                              const ExperimentConfig& config,
                                              const EpochCallback& on_epoch = {});

void save_sentiment_model(const std::filesystem::path& dir,
                          const SentimentModel& model);
SentimentModel load_sentiment_model(const std::filesystem::path& dir);

}  // namespace absa
