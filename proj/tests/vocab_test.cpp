#include <doctest.h>

#include <sstream>

#include "absa/error.hpp"
#include "absa/random.hpp"
#include "absa/vocab.hpp"

using namespace absa;

TEST_CASE("build_vocabulary orders by frequency then lexicographically") {
  const Vocabulary v = build_vocabulary({{"a", "b", "a"}}, 10);
  CHECK(v.size() == 4);
  CHECK(v.token(kPad) == kPadToken);
  CHECK(v.token(kUnk) == kUnkToken);
  CHECK(v.index_of("a") == 2);
  CHECK(v.index_of("b") == 3);

  const Vocabulary tie = build_vocabulary({{"b", "a"}}, 1);
  CHECK(tie.size() == 3);
  CHECK(tie.contains("a"));
  CHECK_FALSE(tie.contains("b"));

  CHECK(build_vocabulary({}, 10).size() == 2);
  CHECK_THROWS_AS(build_vocabulary({}, 0), ArgumentError);
}

TEST_CASE("vocabulary cap of 10000 excludes the reserved tokens") {
  std::vector<std::string> tokens;
  for (int i = 0; i < 15000; ++i) tokens.push_back("w" + std::to_string(i));
  CHECK(build_vocabulary({tokens}, 10000).size() == 10002);
}

TEST_CASE("reserved indices are never assigned to corpus tokens") {
  const Vocabulary v = build_vocabulary({{kPadToken, "x", kUnkToken}}, 10);
  CHECK(v.size() == 3);
  CHECK(v.index_of(kPadToken) == kUnk);
}

TEST_CASE("random_init") {
  const Vocabulary v = build_vocabulary({{"a", "b", "c"}}, 10);
  const Matrix m1 = random_init(v, 5, 42, 0.25);
  const Matrix m2 = random_init(v, 5, 42, 0.25);
  CHECK(m1 == m2);
  CHECK(m1.rows() == v.size());
  CHECK(m1.row(kPad).isZero(0.0));
  CHECK(m1.cwiseAbs().maxCoeff() <= 0.25);
  CHECK(m1.allFinite());

  std::vector<std::string> big;
  for (int i = 0; i < 10000; ++i) big.push_back("t" + std::to_string(i));
  const Matrix full = random_init(build_vocabulary({big}), 300, 1);
  CHECK(full.rows() == 10002);
  CHECK(full.cols() == 300);
}

TEST_CASE("load_pretrained") {
  const Vocabulary v = build_vocabulary({{"a", "b"}}, 10);
  SUBCASE("partial coverage") {
    std::istringstream in("a 1.0 2.0 3.0\nzzz 0 0 0\n");
    const auto loaded = load_pretrained(in, v, 3);
    CHECK(loaded.coverage == doctest::Approx(0.5));
    CHECK(loaded.embeddings.row(v.index_of("a")) ==
          Eigen::RowVector3d(1.0, 2.0, 3.0));
    const Matrix fallback = random_init(v, 3, 3);
    CHECK(loaded.embeddings.row(v.index_of("b")) == fallback.row(v.index_of("b")));
    CHECK(loaded.embeddings.row(kPad).isZero(0.0));
  }
  SUBCASE("full coverage, header line skipped") {
    std::istringstream in("2 2\na 1 2\nb 3 4\n");
    const auto loaded = load_pretrained(in, v, 3);
    CHECK(loaded.coverage == 1.0);
    CHECK(loaded.embeddings.cols() == 2);
  }
  SUBCASE("inconsistent dimensionality") {
    std::istringstream in("a 1.0 2.0\nb 1.0\n");
    try {
      load_pretrained(in, v, 3);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("non-numeric field") {
    std::istringstream in("a 1.0 2.0\nb 1.0 x2\n");
    CHECK_THROWS_AS(load_pretrained(in, v, 3), FormatError);
  }
  SUBCASE("coverage is monotone in added lines") {
    std::vector<std::string> words;
    for (int i = 0; i < 30; ++i) words.push_back("w" + std::to_string(i));
    const Vocabulary big = build_vocabulary({words}, 100);
    Rng rng(9);
    std::string stream;
    double last = 0.0;
    for (int i = 0; i < 40; ++i) {
      stream += "w" + std::to_string(rng.below(45)) + " 0.5 0.25\n";
      std::istringstream in(stream);
      const double cov = load_pretrained(in, big, 1).coverage;
      CHECK(cov >= last);
      last = cov;
    }
  }
}

TEST_CASE("encode") {
  const Vocabulary v = build_vocabulary({{"a", "a", "b"}}, 10);
  SUBCASE("padding") {
    const auto e = encode({"a"}, v, 4);
    CHECK(e.indices == std::vector<int>{2, 0, 0, 0});
    CHECK(e.true_length == 1);
  }
  SUBCASE("truncation keeps the start") {
    std::vector<std::string> tokens(120, "b");
    tokens[0] = "a";
    const auto e = encode(tokens, v, 100);
    CHECK(e.indices.size() == 100);
    CHECK(e.true_length == 100);
    CHECK(e.indices[0] == 2);
  }
  SUBCASE("unknown token") {
    CHECK(encode({"zzz", "a"}, v, 3).indices == std::vector<int>{kUnk, 2, kPad});
  }
  SUBCASE("decode inverts encode on in-vocabulary input") {
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::string> tokens;
      const auto len = rng.below(9);
      for (std::uint64_t i = 0; i < len; ++i) tokens.push_back(rng.below(2) ? "a" : "b");
      const auto e = encode(tokens, v, 8);
      CHECK(decode(e, v) == tokens);
      for (std::size_t i = e.true_length; i < e.indices.size(); ++i)
        CHECK(e.indices[i] == kPad);
    }
  }
  CHECK_THROWS_AS(encode({"a"}, v, 0), ArgumentError);
}
