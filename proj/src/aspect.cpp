#include "absa/aspect.hpp"

#include <algorithm>
#include <map>

#include "absa/error.hpp"
#include "absa/model_io.hpp"
#include "absa/random.hpp"

namespace absa {

using nlohmann::json;

namespace {

constexpr const char* kOtherName = "OTHER";
constexpr const char* kNoneName = "NONE";

std::vector<TrainingExample> make_examples(const AspectModel& model,
                                           const Dataset& data,
                                           TargetStats* stats) {
  std::vector<TrainingExample> out;
  out.reserve(data.size());
  for (const auto& s : data.sentences)
    out.push_back({model.example(s), make_target(s, model.inventory, stats)});
  return out;
}

std::vector<Vector> probability_table(const AspectModel& model,
                                      const Dataset& data) {
  std::vector<Vector> probs;
  probs.reserve(data.size());
  for (const auto& s : data.sentences) probs.push_back(model.probabilities(s));
  return probs;
}

}  // namespace

std::optional<int> AspectInventory::class_of(const AspectLabel& label) const {
  auto it = std::lower_bound(kept.begin(), kept.end(), label,
                             [](const Entry& e, const AspectLabel& l) { return e.label < l; });
  if (it != kept.end() && it->label == label)
    return static_cast<int>(it - kept.begin());
  for (const auto& e : other_members)
    if (e.label == label) return other_class();
  return std::nullopt;
}

std::string AspectInventory::class_name(int index) const {
  if (index >= 0 && index < static_cast<int>(kept.size()))
    return kept[index].label.canonical();
  if (index == other_class()) return kOtherName;
  if (index == none_class()) return kNoneName;
  throw ArgumentError("class index " + std::to_string(index) + " out of range");
}

AspectInventory build_inventory(const Dataset& train, int min_count) {
  if (train.empty()) throw ArgumentError("build_inventory: empty training set");
  if (min_count < 1) throw ArgumentError("build_inventory: min_count must be >= 1");
  std::map<AspectLabel, int> counts;
  for (const auto& s : train.sentences)
    for (const auto& o : s.opinions) ++counts[o.category];

  AspectInventory inv;
  inv.min_count = min_count;
  for (const auto& [label, count] : counts)
    (count >= min_count ? inv.kept : inv.other_members).push_back({label, count});
  // counts is ordered, so the first strict maximum is lexicographically least.
  const AspectInventory::Entry* best = nullptr;
  for (const auto& e : inv.other_members)
    if (!best || e.count > best->count) best = &e;
  if (best) inv.most_frequent_replaced = best->label;
  return inv;
}

void to_json(json& j, const AspectInventory& inv) {
  auto entries = [](const std::vector<AspectInventory::Entry>& v) {
    json a = json::array();
    for (const auto& e : v)
      a.push_back({{"aspect", e.label.canonical()}, {"count", e.count}});
    return a;
  };
  j = json{{"min_count", inv.min_count},
           {"kept", entries(inv.kept)},
           {"other", entries(inv.other_members)},
           {"replacement", inv.most_frequent_replaced
                               ? json(inv.most_frequent_replaced->canonical())
                               : json(nullptr)},
           {"classes", inv.class_count()}};
}

void from_json(const json& j, AspectInventory& inv) {
  auto entries = [](const json& a) {
    std::vector<AspectInventory::Entry> v;
    for (const auto& e : a)
      v.push_back({AspectLabel::parse(e.at("aspect").get<std::string>()),
                   e.at("count").get<int>()});
    return v;
  };
  inv.min_count = j.at("min_count").get<int>();
  inv.kept = entries(j.at("kept"));
  inv.other_members = entries(j.at("other"));
  if (!std::is_sorted(inv.kept.begin(), inv.kept.end(),
                      [](const auto& a, const auto& b) { return a.label < b.label; }))
    throw FormatError("inventory: kept aspects must be in canonical order");
  inv.most_frequent_replaced.reset();
  if (!j.at("replacement").is_null())
    inv.most_frequent_replaced =
        AspectLabel::parse(j.at("replacement").get<std::string>());
}

Vector make_target(const Sentence& sentence, const AspectInventory& inventory,
                   TargetStats* stats) {
  Vector target = Vector::Zero(inventory.class_count());
  std::vector<int> classes;
  for (const auto& o : sentence.opinions) {
    auto c = inventory.class_of(o.category);
    if (!c) {
      if (stats) ++stats->unseen_aspects;
      c = inventory.other_class();
    }
    if (std::find(classes.begin(), classes.end(), *c) == classes.end())
      classes.push_back(*c);
  }
  if (classes.empty()) {
    target[inventory.none_class()] = 1.0;
    return target;
  }
  const double share = 1.0 / static_cast<double>(classes.size());
  for (int c : classes) target[c] = share;
  return target;
}

std::vector<double> threshold_grid(int resolution) {
  if (resolution < 2) throw ArgumentError("threshold grid resolution must be >= 2");
  std::vector<double> grid;
  for (int i = 1; i <= resolution / 2; ++i)
    grid.push_back(static_cast<double>(i) / static_cast<double>(resolution));
  return grid;
}

AspectSet aspects_from_probs(const Vector& probs, double tau,
                             const AspectInventory& inventory) {
  if (probs.size() != inventory.class_count())
    throw ShapeError("aspects_from_probs: probability vector has " +
                     std::to_string(probs.size()) + " entries, inventory has " +
                     std::to_string(inventory.class_count()) + " classes");
  AspectSet out;
  for (int c = 0; c < inventory.class_count(); ++c) {
    if (probs[c] < tau || c == inventory.none_class()) continue;
    if (c == inventory.other_class()) {
      if (inventory.most_frequent_replaced)
        out.insert(*inventory.most_frequent_replaced);
    } else {
      out.insert(inventory.kept[c].label);
    }
  }
  return out;
}

ThresholdChoice select_threshold_from_probs(const std::vector<Vector>& probs,
                                            const std::vector<AspectSet>& gold,
                                            const AspectInventory& inventory,
                                            int resolution) {
  if (probs.empty()) throw ArgumentError("select_threshold: empty validation set");
  if (probs.size() != gold.size())
    throw ArgumentError("select_threshold: probability table and gold sets differ in length");
  ThresholdChoice best;
  bool first = true;
  for (double tau : threshold_grid(resolution)) {
    std::vector<AspectSet> pred;
    pred.reserve(probs.size());
    for (const auto& p : probs) pred.push_back(aspects_from_probs(p, tau, inventory));
    const Slot1Score score = micro_f1(gold, pred);
    if (first || score.f1 > best.score.f1) {
      best = {tau, score};
      first = false;
    }
  }
  return best;
}

nn::Example AspectModel::example(const Sentence& sentence) const {
  return {encode(sentence.tokens, vocab, config.max_len), {}};
}

Vector AspectModel::probabilities(const Sentence& sentence) const {
  return nn::predict(params, example(sentence));
}

ThresholdChoice select_threshold(const AspectModel& model, const Dataset& valid,
                                 int resolution) {
  if (valid.empty()) throw ArgumentError("select_threshold: empty validation set");
  return select_threshold_from_probs(probability_table(model, valid),
                                     gold_aspect_sets(valid), model.inventory,
                                     resolution);
}

AspectSet predict_aspects(const AspectModel& model, const Sentence& sentence,
                          double tau) {
  return aspects_from_probs(model.probabilities(sentence), tau, model.inventory);
}

AspectSet predict_aspects(const AspectModel& model, const Sentence& sentence) {
  return predict_aspects(model, sentence, model.threshold);
}

Slot1Score evaluate_aspects(const AspectModel& model, const Dataset& gold) {
  std::vector<AspectSet> pred;
  pred.reserve(gold.size());
  for (const auto& s : gold.sentences) pred.push_back(predict_aspects(model, s));
  return micro_f1(gold_aspect_sets(gold), pred);
}

AspectTrainingResult train_aspect_model(const Dataset& train,
                                        const Dataset& valid,
                                        const ExperimentConfig& config,
                                        const EpochCallback& on_epoch) {
  if (train.empty()) throw ArgumentError("train_aspect_model: empty training set");
  config.validate();

  AspectTrainingResult result;
  AspectModel& model = result.model;
  model.config = config;
  model.inventory = build_inventory(train, config.min_count);

  std::vector<std::vector<std::string>> corpus;
  for (const auto& s : train.sentences) corpus.push_back(s.tokens);
  model.vocab = build_vocabulary(corpus, config.vocab_size);

  nn::Architecture arch;
  arch.vocab_size = model.vocab.size();
  arch.embedding_dim = config.embedding_dim;
  arch.classes = model.inventory.class_count();
  arch.widths = config.aspect_filter_widths;
  arch.filters = config.filters;
  arch.pooling = config.pooling;
  arch.aspect_input = nn::AspectInput::none;
  model.params = nn::init_params(arch, derive_seed(config.seed, 1), config.init_scale);
  if (config.pretrained) {
    auto loaded = load_pretrained_file(*config.pretrained, model.vocab,
                                       derive_seed(config.seed, 2), config.init_scale);
    if (loaded.embeddings.cols() != config.embedding_dim)
      throw FormatError("pretrained vectors have dimension " +
                        std::to_string(loaded.embeddings.cols()) +
                        ", config says " + std::to_string(config.embedding_dim));
    model.params.word_embeddings = std::move(loaded.embeddings);
    result.pretrained_coverage = loaded.coverage;
  }

  TargetStats valid_stats;
  const auto train_examples = make_examples(model, train, nullptr);
  const auto valid_examples = make_examples(model, valid, &valid_stats);
  result.unseen_valid_aspects = valid_stats.unseen_aspects;

  const auto valid_gold = gold_aspect_sets(valid);
  MetricFn metric;
  if (!valid.empty()) {
    metric = [&](const nn::ModelParams& params) {
      std::vector<Vector> probs;
      probs.reserve(valid_examples.size());
      for (const auto& ex : valid_examples) probs.push_back(nn::predict(params, ex.input));
      return select_threshold_from_probs(probs, valid_gold, model.inventory,
                                         config.threshold_resolution)
          .score.f1;
    };
  }

  TrainerOptions options;
  options.batch_size = config.batch_size;
  options.epochs = config.epochs;
  options.patience = config.patience;
  options.dropout = config.dropout;
  options.rho = config.adadelta_rho;
  options.epsilon = config.adadelta_epsilon;
  options.seed = derive_seed(config.seed, 3);
  TrainingResult trained = train_network(std::move(model.params), train_examples,
                                         valid_examples, options, metric, on_epoch);
  model.params = std::move(trained.best);
  result.history = std::move(trained.history);

  const Dataset& tuning = valid.empty() ? train : valid;
  result.validation = select_threshold(model, tuning, config.threshold_resolution);
  model.threshold = result.validation.threshold;
  return result;
}

void save_aspect_model(const std::filesystem::path& dir, const AspectModel& model) {
  json meta;
  meta["task"] = "aspect";
  meta["config"] = model.config;
  meta["vocabulary"] = model.vocab.tokens();
  meta["inventory"] = model.inventory;
  meta["threshold"] = model.threshold;
  save_model(dir, meta, model.params);
}

AspectModel load_aspect_model(const std::filesystem::path& dir) {
  ModelBundle bundle = load_model(dir);
  AspectModel model;
  try {
    const json& meta = bundle.metadata;
    if (meta.at("task").get<std::string>() != "aspect")
      throw FormatError("model in " + dir.string() + " is not an aspect model");
    model.config = meta.at("config").get<ExperimentConfig>();
    model.vocab =
        Vocabulary::from_tokens(meta.at("vocabulary").get<std::vector<std::string>>());
    model.inventory = meta.at("inventory").get<AspectInventory>();
    model.threshold = meta.at("threshold").get<double>();
  } catch (const json::exception& e) {
    throw FormatError("manifest metadata: " + std::string(e.what()));
  } catch (const ParseError& e) {
    throw FormatError("manifest metadata: " + std::string(e.what()));
  } catch (const UsageError& e) {
    throw FormatError("manifest metadata: " + std::string(e.what()));
  }
  model.params = std::move(bundle.params);
  if (model.params.word_embeddings.rows() != model.vocab.size() ||
      model.params.classes() != model.inventory.class_count() ||
      model.params.aspect_input != nn::AspectInput::none)
    throw FormatError("model in " + dir.string() +
                      " is inconsistent with its vocabulary or inventory");
  return model;
}

}  // namespace absa
