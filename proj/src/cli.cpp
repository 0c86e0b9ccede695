#include "absa/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "absa/aspect.hpp"
#include "absa/config.hpp"
#include "absa/corpus.hpp"
#include "absa/error.hpp"
#include "absa/gradcheck.hpp"
#include "absa/metrics.hpp"
#include "absa/random.hpp"
#include "absa/sentiment.hpp"

namespace absa {

using nlohmann::json;

namespace {

constexpr double kGradientTolerance = 1e-4;

json score_json(const Slot1Score& s) {
  return {{"true_positives", s.true_positives},
          {"false_positives", s.false_positives},
          {"false_negatives", s.false_negatives},
          {"precision", s.precision},
          {"recall", s.recall},
          {"f1", s.f1}};
}

json score_json(const Slot3Score& s) {
  return {{"correct", s.correct}, {"total", s.total}, {"accuracy", s.accuracy}};
}

json epoch_json(const EpochRecord& r) {
  return {{"epoch", r.epoch},
          {"train_loss", r.train_loss},
          {"valid_loss", r.valid_loss},
          {"valid_metric", r.valid_metric},
          {"improved", r.improved}};
}

void write_history(const std::filesystem::path& path,
                   const std::vector<EpochRecord>& history) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  for (const auto& r : history) out << epoch_json(r).dump() << '\n';
}

// Flags layered over an optional config file.
struct TrainFlags {
  std::string train;
  std::string valid;
  std::string config;
  std::string out;
  std::string embeddings;
  std::string language;
  std::string domain;
  std::string pooling;
  std::string aspect_embedding;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<int> max_len;
  std::optional<int> embedding_dim;
  std::optional<int> filters;
  std::optional<int> min_count;
  std::optional<int> aspect_dim;
  std::optional<double> dropout;
  bool zero_aspect_vector = false;
  bool quiet = false;

  ExperimentConfig resolve() const {
    ExperimentConfig c = config.empty() ? ExperimentConfig{} : load_config_file(config);
    if (!embeddings.empty()) c.pretrained = embeddings;
    if (!language.empty()) c.language = language;
    if (!domain.empty()) c.domain = domain;
    if (!pooling.empty()) {
      try {
        c.pooling = nn::parse_pooling(pooling);
      } catch (const ArgumentError& e) {
        throw UsageError(e.what());
      }
    }
    if (!aspect_embedding.empty()) c.aspect_embedding = aspect_embedding;
    if (seed) c.seed = *seed;
    if (epochs) c.epochs = *epochs;
    if (batch_size) c.batch_size = *batch_size;
    if (max_len) c.max_len = *max_len;
    if (embedding_dim) c.embedding_dim = *embedding_dim;
    if (filters) c.filters = *filters;
    if (min_count) c.min_count = *min_count;
    if (aspect_dim) c.aspect_dim = *aspect_dim;
    if (dropout) c.dropout = *dropout;
    if (zero_aspect_vector) c.zero_aspect_vector = true;
    c.validate();
    return c;
  }
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--train", f.train, "Training corpus (SemEval XML)")->required();
  cmd->add_option("--valid", f.valid,
                  "Validation corpus; default: split off validation_fraction of --train");
  cmd->add_option("--config", f.config, "Experiment config (JSON)");
  cmd->add_option("--out", f.out, "Model output directory")->required();
  cmd->add_option("--embeddings", f.embeddings, "Pre-trained vectors (GloVe text)");
  cmd->add_option("--language", f.language);
  cmd->add_option("--domain", f.domain);
  cmd->add_option("--pooling", f.pooling, "max or max+avg");
  cmd->add_option("--aspect-embedding", f.aspect_embedding, "auto, shared or separate");
  cmd->add_option("--seed", f.seed);
  cmd->add_option("--epochs", f.epochs);
  cmd->add_option("--batch-size", f.batch_size);
  cmd->add_option("--max-len", f.max_len);
  cmd->add_option("--embedding-dim", f.embedding_dim);
  cmd->add_option("--filters", f.filters);
  cmd->add_option("--min-count", f.min_count);
  cmd->add_option("--aspect-dim", f.aspect_dim);
  cmd->add_option("--dropout", f.dropout);
  cmd->add_flag("--zero-aspect-vector", f.zero_aspect_vector,
                "Ablation: feed a zero aspect vector to the polarity model");
  cmd->add_flag("--quiet", f.quiet, "No per-epoch progress on stderr");
}

std::pair<Dataset, Dataset> load_training_data(const TrainFlags& f,
                                               const ExperimentConfig& c) {
  Dataset train = read_semeval_file(f.train);
  train.language = c.language;
  train.domain = c.domain;
  if (!f.valid.empty()) {
    Dataset valid = read_semeval_file(f.valid);
    valid.language = c.language;
    valid.domain = c.domain;
    return {std::move(train), std::move(valid)};
  }
  return split_train_validation(train, c.validation_fraction,
                                derive_seed(c.seed, 0));
}

EpochCallback progress(bool quiet, std::ostream& err) {
  if (quiet) return {};
  return [&err](const EpochRecord& r) { err << epoch_json(r).dump() << std::endl; };
}

int train_aspect(const TrainFlags& f, std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = f.resolve();
  auto [train, valid] = load_training_data(f, config);
  auto result = train_aspect_model(train, valid, config, progress(f.quiet, err));
  save_aspect_model(f.out, result.model);
  write_history(std::filesystem::path(f.out) / "history.jsonl", result.history);
  json summary = {{"task", "aspect"},
                  {"train_sentences", train.size()},
                  {"valid_sentences", valid.size()},
                  {"classes", result.model.inventory.class_count()},
                  {"epochs_run", result.history.size()},
                  {"threshold", result.model.threshold},
                  {"validation", score_json(result.validation.score)}};
  if (config.pretrained) summary["pretrained_coverage"] = result.pretrained_coverage;
  out << summary.dump() << '\n';
  return 0;
}

int train_sentiment(const TrainFlags& f, std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = f.resolve();
  auto [train, valid] = load_training_data(f, config);
  auto result = train_sentiment_model(train, valid, config, progress(f.quiet, err));
  save_sentiment_model(f.out, result.model);
  write_history(std::filesystem::path(f.out) / "history.jsonl", result.history);
  json summary = {{"task", "sentiment"},
                  {"train_sentences", train.size()},
                  {"valid_sentences", valid.size()},
                  {"aspect_embedding", nn::to_string(result.model.aspect_space.mode)},
                  {"epochs_run", result.history.size()}};
  if (result.validation) summary["validation"] = score_json(*result.validation);
  if (config.pretrained) summary["pretrained_coverage"] = result.pretrained_coverage;
  out << summary.dump() << '\n';
  return 0;
}

void emit_corpus(const std::string& path, const Dataset& data, std::ostream& out) {
  if (path.empty()) {
    out << write_semeval_xml(data);
  } else {
    write_semeval_file(path, data);
  }
}

Dataset with_predicted_aspects(const AspectModel& model, Dataset data) {
  for (auto& s : data.sentences) {
    s.opinions.clear();
    for (const auto& label : predict_aspects(model, s))
      s.opinions.push_back({label, std::nullopt});
  }
  return data;
}

int gradient_check_command(const std::string& task_name, std::uint64_t seed,
                           const std::string& pooling,
                           const std::string& aspect_embedding, std::ostream& out) {
  Task task;
  if (task_name == "aspect") {
    task = Task::aspect;
  } else if (task_name == "sentiment") {
    task = Task::sentiment;
  } else {
    throw UsageError("--task must be aspect or sentiment");
  }
  nn::Pooling pool;
  nn::AspectInput mode;
  try {
    pool = nn::parse_pooling(pooling);
    mode = nn::parse_aspect_input(aspect_embedding);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  if (task == Task::sentiment && mode == nn::AspectInput::none)
    throw UsageError("--aspect-embedding must be shared or separate");
  const auto problem = toy_gradient_problem(task, seed, pool, mode);
  const double worst = nn::gradient_check(problem.params, problem.example, problem.target);
  const bool pass = worst < kGradientTolerance;
  out << json{{"task", task_name},
              {"seed", seed},
              {"pooling", pooling},
              {"max_relative_error", worst},
              {"tolerance", kGradientTolerance},
              {"pass", pass}}
             .dump()
      << '\n';
  return pass ? 0 : 1;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"CNN aspect category detection and aspect sentiment polarity", "absa"};
  app.require_subcommand(1);

  TrainFlags aspect_flags;
  auto* train_aspect_cmd = app.add_subcommand("train-aspect", "Train the aspect detector");
  add_train_flags(train_aspect_cmd, aspect_flags);

  TrainFlags sentiment_flags;
  auto* train_sentiment_cmd =
      app.add_subcommand("train-sentiment", "Train the aspect polarity classifier");
  add_train_flags(train_sentiment_cmd, sentiment_flags);

  std::string model_dir, input_path, output_path, test_path, aspect_model_dir;
  std::optional<double> threshold;
  auto* predict_aspect_cmd =
      app.add_subcommand("predict-aspect", "Write predicted aspect categories as XML");
  predict_aspect_cmd->add_option("--model", model_dir)->required();
  predict_aspect_cmd->add_option("--input", input_path)->required();
  predict_aspect_cmd->add_option("--out", output_path, "Output XML (default stdout)");
  predict_aspect_cmd->add_option("--threshold", threshold, "Override the tuned threshold");

  bool pipeline = false;
  auto* predict_polarity_cmd = app.add_subcommand(
      "predict-polarity", "Fill polarities on the input's opinions (or detected aspects)");
  predict_polarity_cmd->add_option("--model", model_dir)->required();
  predict_polarity_cmd->add_option("--input", input_path)->required();
  predict_polarity_cmd->add_option("--out", output_path, "Output XML (default stdout)");
  predict_polarity_cmd->add_option("--aspect-model", aspect_model_dir,
                                   "Detect aspects first instead of using the input's");

  auto* evaluate_aspect_cmd =
      app.add_subcommand("evaluate-aspect", "Micro-F1 of the aspect detector");
  evaluate_aspect_cmd->add_option("--model", model_dir)->required();
  evaluate_aspect_cmd->add_option("--test", test_path)->required();
  evaluate_aspect_cmd->add_option("--threshold", threshold);

  auto* evaluate_polarity_cmd =
      app.add_subcommand("evaluate-polarity", "Accuracy of the polarity classifier");
  evaluate_polarity_cmd->add_option("--model", model_dir)->required();
  evaluate_polarity_cmd->add_option("--test", test_path)->required();
  evaluate_polarity_cmd->add_flag("--pipeline", pipeline,
                                  "Score on detected rather than gold aspects");
  evaluate_polarity_cmd->add_option("--aspect-model", aspect_model_dir);

  int resolution = 100;
  bool write_back = false;
  auto* tune_cmd = app.add_subcommand("tune-threshold",
                                      "Pick the F1-maximizing threshold on a corpus");
  tune_cmd->add_option("--model", model_dir)->required();
  tune_cmd->add_option("--valid", test_path)->required();
  tune_cmd->add_option("--resolution", resolution, "Grid is i/resolution, i <= resolution/2");
  tune_cmd->add_flag("--write", write_back, "Store the threshold in the model");

  std::string train_path;
  std::optional<int> min_count;
  auto* inventory_cmd =
      app.add_subcommand("inspect-inventory", "Print the aspect inventory as JSON");
  auto* inv_model = inventory_cmd->add_option("--model", model_dir);
  auto* inv_train = inventory_cmd->add_option("--train", train_path);
  inv_model->excludes(inv_train);
  inventory_cmd->add_option("--min-count", min_count);

  std::string task_name;
  std::uint64_t seed = 1;
  std::string pooling = "max";
  std::string aspect_embedding = "separate";
  auto* gradient_cmd = app.add_subcommand(
      "gradient-check", "Compare backprop with finite differences on a toy model");
  gradient_cmd->add_option("--task", task_name, "aspect or sentiment")->required();
  gradient_cmd->add_option("--seed", seed);
  gradient_cmd->add_option("--pooling", pooling);
  gradient_cmd->add_option("--aspect-embedding", aspect_embedding);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (train_aspect_cmd->parsed()) return train_aspect(aspect_flags, out, err);
    if (train_sentiment_cmd->parsed()) return train_sentiment(sentiment_flags, out, err);

    if (predict_aspect_cmd->parsed()) {
      const AspectModel model = load_aspect_model(model_dir);
      Dataset data = read_semeval_file(input_path);
      for (auto& s : data.sentences) {
        s.opinions.clear();
        for (const auto& label : predict_aspects(model, s, threshold.value_or(model.threshold)))
          s.opinions.push_back({label, std::nullopt});
      }
      emit_corpus(output_path, data, out);
      return 0;
    }

    if (predict_polarity_cmd->parsed()) {
      const SentimentModel model = load_sentiment_model(model_dir);
      Dataset data = read_semeval_file(input_path);
      if (!aspect_model_dir.empty())
        data = with_predicted_aspects(load_aspect_model(aspect_model_dir), std::move(data));
      emit_corpus(output_path, annotate_polarity(model, std::move(data)), out);
      return 0;
    }

    if (evaluate_aspect_cmd->parsed()) {
      AspectModel model = load_aspect_model(model_dir);
      if (threshold) model.threshold = *threshold;
      out << score_json(evaluate_aspects(model, read_semeval_file(test_path))).dump()
          << '\n';
      return 0;
    }

    if (evaluate_polarity_cmd->parsed()) {
      const SentimentModel model = load_sentiment_model(model_dir);
      const Dataset gold = read_semeval_file(test_path);
      if (pipeline) {
        if (aspect_model_dir.empty())
          throw UsageError("--pipeline requires --aspect-model");
        const AspectModel detector = load_aspect_model(aspect_model_dir);
        out << score_json(evaluate_polarity_pipeline(model, detector, gold)).dump() << '\n';
      } else {
        out << score_json(evaluate_polarity(model, gold)).dump() << '\n';
      }
      return 0;
    }

    if (tune_cmd->parsed()) {
      AspectModel model = load_aspect_model(model_dir);
      const auto choice = select_threshold(model, read_semeval_file(test_path), resolution);
      if (write_back) {
        model.threshold = choice.threshold;
        save_aspect_model(model_dir, model);
      }
      out << json{{"threshold", choice.threshold}, {"score", score_json(choice.score)}}.dump()
          << '\n';
      return 0;
    }

    if (inventory_cmd->parsed()) {
      AspectInventory inv;
      if (!model_dir.empty()) {
        inv = load_aspect_model(model_dir).inventory;
      } else if (!train_path.empty()) {
        inv = build_inventory(read_semeval_file(train_path), min_count.value_or(5));
      } else {
        throw UsageError("inspect-inventory needs --model or --train");
      }
      out << json(inv).dump(2) << '\n';
      return 0;
    }

    if (gradient_cmd->parsed())
      return gradient_check_command(task_name, seed, pooling, aspect_embedding, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace absa
