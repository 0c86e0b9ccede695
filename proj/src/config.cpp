#include "absa/config.hpp"

#include <fstream>
#include <set>

#include "absa/error.hpp"

namespace absa {

using nlohmann::json;

nn::AspectInput ExperimentConfig::resolved_aspect_input() const {
  if (aspect_embedding == "auto")
    return language == "en" ? nn::AspectInput::shared : nn::AspectInput::separate;
  return nn::parse_aspect_input(aspect_embedding);
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw UsageError("config: " + field + " " + why);
  };
  if (batch_size < 1) fail("batch_size", "must be >= 1");
  if (max_len < 1) fail("max_len", "must be >= 1");
  if (embedding_dim < 1) fail("embedding_dim", "must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout", "must lie in [0, 1)");
  if (filters < 1) fail("filters", "must be >= 1");
  for (const auto* widths : {&aspect_filter_widths, &sentiment_filter_widths}) {
    if (widths->empty()) fail("filter widths", "must not be empty");
    for (int w : *widths)
      if (w < 1 || w > max_len) fail("filter widths", "must lie in [1, max_len]");
  }
  if (epochs < 1) fail("epochs", "must be >= 1");
  if (patience < 1) fail("patience", "must be >= 1");
  if (min_count < 1) fail("min_count", "must be >= 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    fail("validation_fraction", "must lie in (0, 1)");
  if (vocab_size < 1) fail("vocab_size", "must be >= 1");
  if (aspect_dim < 0) fail("aspect_dim", "must be >= 0");
  if (!(init_scale > 0.0)) fail("init_scale", "must be positive");
  if (!(adadelta_rho > 0.0 && adadelta_rho < 1.0))
    fail("adadelta_rho", "must lie in (0, 1)");
  if (!(adadelta_epsilon > 0.0)) fail("adadelta_epsilon", "must be positive");
  if (threshold_resolution < 2) fail("threshold_resolution", "must be >= 2");
  if (aspect_embedding != "auto") {
    try {
      if (nn::parse_aspect_input(aspect_embedding) == nn::AspectInput::none)
        fail("aspect_embedding", "must be auto, shared or separate");
    } catch (const ArgumentError&) {
      fail("aspect_embedding", "must be auto, shared or separate");
    }
  }
  if (resolved_aspect_input() == nn::AspectInput::shared && aspect_dim > 0 &&
      aspect_dim != embedding_dim)
    fail("aspect_dim", "must equal embedding_dim in shared mode");
}

void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"language", c.language},
           {"domain", c.domain},
           {"batch_size", c.batch_size},
           {"max_len", c.max_len},
           {"embedding_dim", c.embedding_dim},
           {"dropout", c.dropout},
           {"filters", c.filters},
           {"aspect_filter_widths", c.aspect_filter_widths},
           {"sentiment_filter_widths", c.sentiment_filter_widths},
           {"epochs", c.epochs},
           {"patience", c.patience},
           {"min_count", c.min_count},
           {"validation_fraction", c.validation_fraction},
           {"vocab_size", c.vocab_size},
           {"seed", c.seed},
           {"pooling", nn::to_string(c.pooling)},
           {"aspect_embedding", c.aspect_embedding},
           {"aspect_dim", c.aspect_dim},
           {"zero_aspect_vector", c.zero_aspect_vector},
           {"pretrained", c.pretrained ? json(*c.pretrained) : json(nullptr)},
           {"init_scale", c.init_scale},
           {"adadelta_rho", c.adadelta_rho},
           {"adadelta_epsilon", c.adadelta_epsilon},
           {"threshold_resolution", c.threshold_resolution}};
}

void from_json(const json& j, ExperimentConfig& c) {
  if (!j.is_object()) throw UsageError("config: expected a JSON object");
  static const std::set<std::string> known = {
      "language", "domain", "batch_size", "max_len", "embedding_dim", "dropout",
      "filters", "aspect_filter_widths", "sentiment_filter_widths", "epochs",
      "patience", "min_count", "validation_fraction", "vocab_size", "seed",
      "pooling", "aspect_embedding", "aspect_dim", "zero_aspect_vector",
      "pretrained", "init_scale", "adadelta_rho", "adadelta_epsilon",
      "threshold_resolution"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw UsageError("config: unknown key '" + key + "'");

  try {
    auto read = [&j](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    read("language", c.language);
    read("domain", c.domain);
    read("batch_size", c.batch_size);
    read("max_len", c.max_len);
    read("embedding_dim", c.embedding_dim);
    read("dropout", c.dropout);
    read("filters", c.filters);
    read("aspect_filter_widths", c.aspect_filter_widths);
    read("sentiment_filter_widths", c.sentiment_filter_widths);
    read("epochs", c.epochs);
    read("patience", c.patience);
    read("min_count", c.min_count);
    read("validation_fraction", c.validation_fraction);
    read("vocab_size", c.vocab_size);
    read("seed", c.seed);
    read("aspect_embedding", c.aspect_embedding);
    read("aspect_dim", c.aspect_dim);
    read("zero_aspect_vector", c.zero_aspect_vector);
    read("init_scale", c.init_scale);
    read("adadelta_rho", c.adadelta_rho);
    read("adadelta_epsilon", c.adadelta_epsilon);
    read("threshold_resolution", c.threshold_resolution);
    if (j.contains("pooling")) c.pooling = nn::parse_pooling(j.at("pooling").get<std::string>());
    if (j.contains("pretrained")) {
      if (j.at("pretrained").is_null()) {
        c.pretrained.reset();
      } else {
        c.pretrained = j.at("pretrained").get<std::string>();
      }
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  } catch (const ArgumentError& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  ExperimentConfig c = j.get<ExperimentConfig>();
  c.validate();
  return c;
}

}  // namespace absa
