#include <doctest.h>

#include "absa/random.hpp"
#include "absa/train.hpp"

using namespace absa;

namespace {

nn::Architecture arch() {
  nn::Architecture a;
  a.vocab_size = 12;
  a.embedding_dim = 6;
  a.filters = 4;
  a.widths = {2, 3};
  a.classes = 3;
  return a;
}

std::vector<TrainingExample> examples(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TrainingExample> out;
  for (int i = 0; i < count; ++i) {
    TrainingExample ex;
    const int cls = static_cast<int>(rng.below(3));
    std::vector<int> toks;
    for (int k = 0; k < 6; ++k) toks.push_back(5 + static_cast<int>(rng.below(7)));
    toks[rng.below(6)] = 2 + cls;  // class cue
    ex.input.sentence.indices = toks;
    ex.input.sentence.indices.resize(8, kPad);
    ex.input.sentence.true_length = 6;
    ex.target = Vector::Zero(3);
    ex.target[cls] = 1.0;
    out.push_back(ex);
  }
  return out;
}

}  // namespace

TEST_CASE("training is deterministic for a fixed seed") {
  const auto train = examples(25, 1);
  const auto valid = examples(10, 2);
  TrainerOptions opts;
  opts.epochs = 4;
  const auto a = train_network(nn::init_params(arch(), 3), train, valid, opts);
  const auto b = train_network(nn::init_params(arch(), 3), train, valid, opts);
  CHECK(a.best.word_embeddings == b.best.word_embeddings);
  CHECK(a.best.output_weights == b.best.output_weights);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i)
    CHECK(a.history[i].train_loss == b.history[i].train_loss);

  opts.seed = 2;
  const auto c = train_network(nn::init_params(arch(), 3), train, valid, opts);
  CHECK(c.best.output_weights != a.best.output_weights);
}

TEST_CASE("training learns a separable task and keeps the best snapshot") {
  const auto train = examples(60, 4);
  const auto valid = examples(20, 5);
  TrainerOptions opts;
  opts.epochs = 12;
  opts.dropout = 0.0;
  int callbacks = 0;
  const auto r = train_network(nn::init_params(arch(), 9, 0.5), train, valid, opts,
                               {}, [&](const EpochRecord&) { ++callbacks; });
  REQUIRE(!r.history.empty());
  CHECK(callbacks == static_cast<int>(r.history.size()));
  CHECK(r.history.back().train_loss < r.history.front().train_loss);

  double best = r.history.front().valid_loss;
  int best_epoch = r.history.front().epoch;
  for (const auto& e : r.history)
    if (e.valid_loss < best) {
      best = e.valid_loss;
      best_epoch = e.epoch;
    }
  CHECK(r.best_epoch == best_epoch);
  CHECK(mean_loss(r.best, valid) == doctest::Approx(best).epsilon(1e-4));
  CHECK(r.best.version == 0);

  // Float-representable after training.
  for (const auto& a : nn::parameter_arrays(r.best))
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(static_cast<double>(static_cast<float>(a.data[i])) == a.data[i]);
}

TEST_CASE("early stopping honours patience") {
  const auto train = examples(25, 6);
  const auto valid = examples(25, 7);
  TrainerOptions opts;
  opts.epochs = 40;
  opts.patience = 2;
  const auto r = train_network(nn::init_params(arch(), 1), train, valid, opts);
  int since = 0;
  for (std::size_t i = 0; i < r.history.size(); ++i) {
    since = r.history[i].improved ? 0 : since + 1;
    if (i + 1 < r.history.size()) CHECK(since < 2);
  }
  if (static_cast<int>(r.history.size()) < opts.epochs) CHECK(since == 2);
}

TEST_CASE("the last mini-batch may be short") {
  TrainerOptions opts;
  opts.epochs = 2;
  const auto r = train_network(nn::init_params(arch(), 1), examples(25, 3), {}, opts);
  for (const auto& e : r.history) CHECK(e.batches == 3);
  opts.batch_size = 25;
  CHECK(train_network(nn::init_params(arch(), 1), examples(25, 3), {}, opts).history[0].batches == 1);
}

TEST_CASE("empty validation trains every epoch") {
  const auto train = examples(25, 8);
  TrainerOptions opts;
  opts.epochs = 3;
  const auto r = train_network(nn::init_params(arch(), 1), train, {}, opts);
  CHECK(r.history.size() == 3);
  for (const auto& e : r.history) CHECK(e.improved);
  CHECK(r.best_epoch == 3);
}
