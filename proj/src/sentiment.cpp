#include "absa/sentiment.hpp"

#include <algorithm>
#include <set>

#include "absa/error.hpp"
#include "absa/model_io.hpp"
#include "absa/random.hpp"

namespace absa {

using nlohmann::json;

namespace {

std::vector<std::string> split_lower(const std::string& part) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= part.size()) {
    const std::size_t end = std::min(part.find('_', start), part.size());
    if (end > start) out.push_back(to_lower_utf8(part.substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

std::vector<TrainingExample> to_training(const SentimentModel& model,
                                         const std::vector<PolarityExample>& examples) {
  std::vector<TrainingExample> out;
  out.reserve(examples.size());
  for (const auto& ex : examples)
    out.push_back({model.example(ex.sentence, ex.aspect), polarity_target(ex.gold)});
  return out;
}

}  // namespace

std::vector<std::string> aspect_tokens(const AspectLabel& label) {
  auto tokens = split_lower(label.entity());
  auto attribute = split_lower(label.attribute());
  tokens.insert(tokens.end(), attribute.begin(), attribute.end());
  return tokens;
}

std::vector<PolarityExample> polarity_examples(const Dataset& dataset,
                                               const Vocabulary& vocab,
                                               int max_len) {
  std::vector<PolarityExample> out;
  for (const auto& s : dataset.sentences) {
    if (s.opinions.empty()) continue;
    const EncodedSentence encoded = encode(s.tokens, vocab, max_len);
    for (const auto& o : s.opinions) {
      if (!o.polarity)
        throw ArgumentError("sentence " + s.id + ": opinion " +
                            o.category.canonical() + " has no polarity");
      out.push_back({encoded, o.category, *o.polarity});
    }
  }
  return out;
}

Vector polarity_target(Polarity p) {
  Vector t = Vector::Zero(kPolarityCount);
  t[static_cast<int>(p)] = 1.0;
  return t;
}

Polarity argmax_polarity(const Vector& probs) {
  if (probs.size() != kPolarityCount)
    throw ShapeError("polarity distribution must have 3 entries");
  int best = 0;
  for (int c = 1; c < kPolarityCount; ++c)
    if (probs[c] > probs[best]) best = c;
  return static_cast<Polarity>(best);
}

std::vector<int> SentimentModel::aspect_token_indices(const AspectLabel& label) const {
  std::vector<int> out;
  if (config.zero_aspect_vector) return out;
  const Vocabulary& space =
      aspect_space.mode == nn::AspectInput::shared ? vocab : aspect_space.vocab;
  for (const auto& tok : aspect_tokens(label)) out.push_back(space.index_of(tok));
  return out;
}

nn::Example SentimentModel::example(const EncodedSentence& sentence,
                                    const AspectLabel& label) const {
  return {sentence, aspect_token_indices(label)};
}

nn::Example SentimentModel::example(const Sentence& sentence,
                                    const AspectLabel& label) const {
  return example(encode(sentence.tokens, vocab, config.max_len), label);
}

Vector aspect_vector(const SentimentModel& model, const AspectLabel& label) {
  return nn::aspect_vector(model.params, model.aspect_token_indices(label));
}

PolarityPrediction predict_polarity(const SentimentModel& model,
                                    const Sentence& sentence,
                                    const AspectLabel& aspect) {
  Vector probs = nn::predict(model.params, model.example(sentence, aspect));
  return {argmax_polarity(probs), std::move(probs)};
}

Slot3Score evaluate_polarity(const SentimentModel& model, const Dataset& gold) {
  std::vector<Polarity> expected;
  std::vector<Polarity> predicted;
  for (const auto& s : gold.sentences) {
    if (s.opinions.empty()) continue;
    const EncodedSentence encoded = encode(s.tokens, model.vocab, model.config.max_len);
    for (const auto& o : s.opinions) {
      if (!o.polarity) continue;
      expected.push_back(*o.polarity);
      predicted.push_back(argmax_polarity(
          nn::predict(model.params, model.example(encoded, o.category))));
    }
  }
  return accuracy(expected, predicted);
}

Slot3Score evaluate_polarity_pipeline(const SentimentModel& model,
                                      const AspectModel& detector,
                                      const Dataset& gold) {
  std::vector<Polarity> expected;
  std::vector<Polarity> predicted;
  for (const auto& s : gold.sentences) {
    const AspectSet detected = predict_aspects(detector, s);
    for (const auto& o : s.opinions) {
      if (!o.polarity) continue;
      expected.push_back(*o.polarity);
      if (detected.count(o.category)) {
        predicted.push_back(predict_polarity(model, s, o.category).polarity);
      } else {
        // Undetected aspect: scored as wrong whatever the gold label is.
        predicted.push_back(static_cast<Polarity>(
            (static_cast<int>(*o.polarity) + 1) % kPolarityCount));
      }
    }
  }
  return accuracy(expected, predicted);
}

Dataset annotate_polarity(const SentimentModel& model, Dataset dataset) {
  for (auto& s : dataset.sentences) {
    if (s.opinions.empty()) continue;
    const EncodedSentence encoded = encode(s.tokens, model.vocab, model.config.max_len);
    for (auto& o : s.opinions)
      o.polarity = argmax_polarity(
          nn::predict(model.params, model.example(encoded, o.category)));
  }
  return dataset;
}

SentimentTrainingResult train_sentiment_model(const Dataset& train,
                                              const Dataset& valid,
                                              const ExperimentConfig& config,
                                              const EpochCallback& on_epoch) {
  config.validate();
  SentimentTrainingResult result;
  SentimentModel& model = result.model;
  model.config = config;
  model.aspect_space.mode = config.resolved_aspect_input();

  std::set<AspectLabel> labels;
  for (const auto& s : train.sentences)
    for (const auto& o : s.opinions) labels.insert(o.category);
  model.aspects.assign(labels.begin(), labels.end());

  // Shared mode counts aspect tokens as corpus tokens so that they get rows
  // in the word table.
  std::vector<std::vector<std::string>> corpus;
  for (const auto& s : train.sentences) {
    corpus.push_back(s.tokens);
    if (model.aspect_space.mode == nn::AspectInput::shared)
      for (const auto& o : s.opinions) corpus.push_back(aspect_tokens(o.category));
  }
  model.vocab = build_vocabulary(corpus, config.vocab_size);
  if (model.aspect_space.mode == nn::AspectInput::separate) {
    std::vector<std::vector<std::string>> aspect_corpus;
    for (const auto& label : model.aspects) aspect_corpus.push_back(aspect_tokens(label));
    model.aspect_space.vocab = build_vocabulary(aspect_corpus, 1 << 20);
  }

  const auto train_examples = polarity_examples(train, model.vocab, config.max_len);
  if (train_examples.empty())
    throw ArgumentError("train_sentiment_model: no opinions in the training set");
  const auto valid_examples = polarity_examples(valid, model.vocab, config.max_len);

  nn::Architecture arch;
  arch.vocab_size = model.vocab.size();
  arch.embedding_dim = config.embedding_dim;
  arch.aspect_input = model.aspect_space.mode;
  arch.aspect_vocab_size = model.aspect_space.vocab.size();
  arch.aspect_dim = config.resolved_aspect_dim();
  arch.classes = kPolarityCount;
  arch.widths = config.sentiment_filter_widths;
  arch.filters = config.filters;
  arch.pooling = config.pooling;
  model.params = nn::init_params(arch, derive_seed(config.seed, 11), config.init_scale);
  if (config.pretrained) {
    auto loaded = load_pretrained_file(*config.pretrained, model.vocab,
                                       derive_seed(config.seed, 12), config.init_scale);
    if (loaded.embeddings.cols() != config.embedding_dim)
      throw FormatError("pretrained vectors have dimension " +
                        std::to_string(loaded.embeddings.cols()) +
                        ", config says " + std::to_string(config.embedding_dim));
    model.params.word_embeddings = std::move(loaded.embeddings);
    result.pretrained_coverage = loaded.coverage;
  }

  const auto train_set = to_training(model, train_examples);
  const auto valid_set = to_training(model, valid_examples);
  MetricFn metric;
  if (!valid_set.empty()) {
    metric = [&valid_set](const nn::ModelParams& params) {
      std::size_t correct = 0;
      for (const auto& ex : valid_set)
        if (argmax_polarity(nn::predict(params, ex.input)) ==
            argmax_polarity(ex.target))
          ++correct;
      return static_cast<double>(correct) / static_cast<double>(valid_set.size());
    };
  }

  TrainerOptions options;
  options.batch_size = config.batch_size;
  options.epochs = config.epochs;
  options.patience = config.patience;
  options.dropout = config.dropout;
  options.rho = config.adadelta_rho;
  options.epsilon = config.adadelta_epsilon;
  options.seed = derive_seed(config.seed, 13);
  TrainingResult trained = train_network(std::move(model.params), train_set,
                                         valid_set, options, metric, on_epoch);
  model.params = std::move(trained.best);
  result.history = std::move(trained.history);
  if (!valid_examples.empty()) result.validation = evaluate_polarity(model, valid);
  return result;
}

void save_sentiment_model(const std::filesystem::path& dir,
                          const SentimentModel& model) {
  json meta;
  meta["task"] = "sentiment";
  meta["config"] = model.config;
  meta["vocabulary"] = model.vocab.tokens();
  meta["aspect_mode"] = nn::to_string(model.aspect_space.mode);
  meta["aspect_vocabulary"] = model.aspect_space.vocab.tokens();
  json aspects = json::array();
  for (const auto& a : model.aspects) aspects.push_back(a.canonical());
  meta["aspects"] = aspects;
  meta["classes"] = {"positive", "negative", "neutral"};
  save_model(dir, meta, model.params);
}

SentimentModel load_sentiment_model(const std::filesystem::path& dir) {
  ModelBundle bundle = load_model(dir);
  SentimentModel model;
  try {
    const json& meta = bundle.metadata;
    if (meta.at("task").get<std::string>() != "sentiment")
      throw FormatError("model in " + dir.string() + " is not a sentiment model");
    model.config = meta.at("config").get<ExperimentConfig>();
    model.vocab =
        Vocabulary::from_tokens(meta.at("vocabulary").get<std::vector<std::string>>());
    model.aspect_space.mode =
        nn::parse_aspect_input(meta.at("aspect_mode").get<std::string>());
    model.aspect_space.vocab = Vocabulary::from_tokens(
        meta.at("aspect_vocabulary").get<std::vector<std::string>>());
    for (const auto& a : meta.at("aspects"))
      model.aspects.push_back(AspectLabel::parse(a.get<std::string>()));
  } catch (const json::exception& e) {
    throw FormatError("manifest metadata: " + std::string(e.what()));
  } catch (const ParseError& e) {
    throw FormatError("manifest metadata: " + std::string(e.what()));
  } catch (const UsageError& e) {
    throw FormatError("manifest metadata: " + std::string(e.what()));
  } catch (const ArgumentError& e) {
    throw FormatError("manifest metadata: " + std::string(e.what()));
  }
  model.params = std::move(bundle.params);
  const bool separate = model.aspect_space.mode == nn::AspectInput::separate;
  if (model.params.word_embeddings.rows() != model.vocab.size() ||
      model.params.classes() != kPolarityCount ||
      model.params.aspect_input != model.aspect_space.mode ||
      (separate && model.params.aspect_embeddings.rows() != model.aspect_space.vocab.size()))
    throw FormatError("model in " + dir.string() +
                      " is inconsistent with its vocabularies");
  return model;
}

}  // namespace absa
