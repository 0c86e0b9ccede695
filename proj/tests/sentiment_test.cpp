#include <doctest.h>

#include <filesystem>

#include "absa/error.hpp"
#include "absa/gradcheck.hpp"
#include "absa/sentiment.hpp"
#include "synthetic.hpp"

using namespace absa;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.embedding_dim = 12;
  cfg.filters = 6;
  cfg.max_len = 20;
  cfg.epochs = 2;
  return cfg;
}

}  // namespace

TEST_CASE("aspect tokens") {
  using V = std::vector<std::string>;
  CHECK(aspect_tokens(AspectLabel{"FOOD", "STYLE_OPTIONS"}) == V{"food", "style", "options"});
  CHECK(aspect_tokens(AspectLabel{"SERVICE", "GENERAL"}) == V{"service", "general"});
  CHECK(aspect_tokens(AspectLabel{"LAPTOP", "OPERATION_PERFORMANCE"}) ==
        V{"laptop", "operation", "performance"});
}

TEST_CASE("polarity targets and argmax ties") {
  CHECK(polarity_target(Polarity::negative) == Eigen::Vector3d(0, 1, 0));
  CHECK(argmax_polarity(Eigen::Vector3d(0.4, 0.4, 0.2)) == Polarity::positive);
  CHECK(argmax_polarity(Eigen::Vector3d(0.2, 0.4, 0.4)) == Polarity::negative);
  CHECK(argmax_polarity(Eigen::Vector3d(0.3, 0.3, 0.4)) == Polarity::neutral);
  CHECK(argmax_polarity(Vector::Constant(3, 1.0 / 3)) == Polarity::positive);
}

TEST_CASE("input rows concatenate the word and aspect vectors") {
  Vocabulary vocab;
  for (auto w : {"the", "food", "was", "great"}) vocab.add(w);
  const Matrix words = random_init(vocab, 300, 4);
  const Vector av = 0.5 * (words.row(vocab.index_of("food")) + words.row(vocab.index_of("great"))).transpose();
  const auto enc = encode({"the", "food", "was", "great"}, vocab, 100);
  const Matrix x = nn::build_input(enc, words, av);
  CHECK(x.rows() == 100);
  CHECK(x.cols() == 600);
  for (int i = 0; i < 100; ++i) {
    if (i >= 4) CHECK(x.row(i).head(300).isZero(0.0));
    CHECK(x.row(i).tail(300) == av.transpose());
  }
  CHECK(x.row(1).head(300) == words.row(vocab.index_of("food")));
}

TEST_CASE("aspect vector is the mean embedding in the chosen space") {
  const auto train = synthetic::polarity_corpus(60, 1);
  const AspectLabel prices{"FOOD", "PRICES"};

  ExperimentConfig shared = small_config();
  shared.aspect_embedding = "shared";
  const auto s = train_sentiment_model(train, {}, shared).model;
  CHECK(s.params.aspect_input == nn::AspectInput::shared);
  REQUIRE(s.vocab.contains("prices"));
  const Vector expected_shared = 0.5 * (s.params.word_embeddings.row(s.vocab.index_of("food")) +
                                        s.params.word_embeddings.row(s.vocab.index_of("prices")))
                                           .transpose();
  CHECK(aspect_vector(s, prices).isApprox(expected_shared, 1e-15));

  ExperimentConfig separate = small_config();
  separate.aspect_embedding = "separate";
  separate.aspect_dim = 5;
  const auto m = train_sentiment_model(train, {}, separate).model;
  CHECK(m.params.aspect_input == nn::AspectInput::separate);
  CHECK(m.params.aspect_embeddings.cols() == 5);
  CHECK(m.params.input_dim() == 17);
  const auto& av = m.aspect_space.vocab;
  const Vector expected_sep = 0.5 * (m.params.aspect_embeddings.row(av.index_of("food")) +
                                     m.params.aspect_embeddings.row(av.index_of("prices")))
                                        .transpose();
  CHECK(aspect_vector(m, prices).isApprox(expected_sep, 1e-15));

  ExperimentConfig ablated = small_config();
  ablated.zero_aspect_vector = true;
  const auto z = train_sentiment_model(train, {}, ablated).model;
  CHECK(aspect_vector(z, prices).isZero(0.0));
}

TEST_CASE("aspect vector is linear in the embedding table") {
  auto prob = toy_gradient_problem(Task::sentiment, 2, nn::Pooling::max, nn::AspectInput::separate);
  const std::vector<int> toks{1, 3, 4};
  const Vector v = nn::aspect_vector(prob.params, toks);
  nn::ModelParams scaled = prob.params;
  scaled.aspect_embeddings *= 3.0;
  CHECK(nn::aspect_vector(scaled, toks).isApprox(3.0 * v));
}

TEST_CASE("polarity examples") {
  const auto d = synthetic::polarity_corpus(30, 2);
  Vocabulary vocab = build_vocabulary({{"superb"}}, 100);
  const auto ex = polarity_examples(d, vocab, 20);
  CHECK(ex.size() == 30);
  for (const auto& e : ex) CHECK(e.sentence.indices.size() == 20);

  Dataset bad = d;
  bad.sentences[0].opinions[0].polarity.reset();
  CHECK_THROWS_AS(polarity_examples(bad, vocab, 20), ArgumentError);
}

TEST_CASE("sentiment model round trip and evaluation") {
  const auto train = synthetic::polarity_corpus(80, 3);
  const auto test = synthetic::polarity_corpus(30, 4);
  ExperimentConfig cfg = small_config();
  cfg.language = "es";
  const auto r = train_sentiment_model(train, test, cfg);
  CHECK(r.model.params.aspect_input == nn::AspectInput::separate);
  REQUIRE(r.validation.has_value());
  CHECK(r.validation->total == 30);

  const auto dir = std::filesystem::temp_directory_path() / "absa_sentiment_test_model";
  std::filesystem::remove_all(dir);
  save_sentiment_model(dir, r.model);
  const auto loaded = load_sentiment_model(dir);
  CHECK(loaded.aspect_space.mode == r.model.aspect_space.mode);
  CHECK(loaded.aspects == r.model.aspects);
  const auto a = evaluate_polarity(r.model, test);
  const auto b = evaluate_polarity(loaded, test);
  CHECK(a.correct == b.correct);
  CHECK(a.total == 30);

  const auto annotated = annotate_polarity(loaded, test);
  for (std::size_t i = 0; i < test.sentences.size(); ++i)
    for (std::size_t k = 0; k < test.sentences[i].opinions.size(); ++k) {
      const auto& o = annotated.sentences[i].opinions[k];
      REQUIRE(o.polarity.has_value());
      CHECK(*o.polarity ==
            predict_polarity(loaded, test.sentences[i], o.category).polarity);
    }
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(train_sentiment_model(Dataset{}, test, cfg), ArgumentError);
}
