#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "absa/cli.hpp"
#include "absa/corpus.hpp"
#include "synthetic.hpp"

using namespace absa;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "absa");
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

struct Workdir {
  fs::path root;
  Workdir() : root(fs::temp_directory_path() / "absa_cli_test") {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workdir() { fs::remove_all(root); }
  std::string operator/(const std::string& name) const { return (root / name).string(); }
};

const std::vector<std::string> kSmall{"--embedding-dim", "12", "--filters", "6",
                                      "--max-len", "20", "--epochs", "2", "--quiet"};

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("end to end through the command line") {
  Workdir w;
  write_semeval_file(w / "train.xml", synthetic::detection_corpus(80, 1));
  write_semeval_file(w / "test.xml", synthetic::detection_corpus(20, 2));
  write_semeval_file(w / "ptrain.xml", synthetic::polarity_corpus(80, 3));
  write_semeval_file(w / "ptest.xml", synthetic::polarity_corpus(20, 4));

  auto r = run(concat({"train-aspect", "--train", w / "train.xml", "--out", w / "am",
                       "--min-count", "3"},
                      kSmall));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  auto summary = nlohmann::json::parse(r.out);
  CHECK(summary["task"] == "aspect");
  CHECK(summary["train_sentences"] == 64);
  CHECK(summary["valid_sentences"] == 16);
  CHECK(fs::exists(w / "am/manifest"));
  CHECK(fs::exists(w / "am/params.bin"));
  CHECK(fs::exists(w / "am/history.jsonl"));

  r = run({"evaluate-aspect", "--model", w / "am", "--test", w / "test.xml"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto score = nlohmann::json::parse(r.out);
  CHECK(score.contains("f1"));

  r = run({"predict-aspect", "--model", w / "am", "--input", w / "test.xml", "--out",
           w / "pred.xml"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(read_semeval_file(w / "pred.xml").size() == 20);

  r = run({"tune-threshold", "--model", w / "am", "--valid", w / "test.xml", "--write"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const double tau = nlohmann::json::parse(r.out)["threshold"];
  CHECK(tau >= 0.01);
  CHECK(tau <= 0.5);

  r = run({"inspect-inventory", "--model", w / "am"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(nlohmann::json::parse(r.out).contains("kept"));

  r = run(concat({"train-sentiment", "--train", w / "ptrain.xml", "--valid", w / "ptest.xml",
                  "--out", w / "sm"},
                 kSmall));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(nlohmann::json::parse(r.out)["aspect_embedding"] == "shared");

  r = run({"evaluate-polarity", "--model", w / "sm", "--test", w / "ptest.xml"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(nlohmann::json::parse(r.out)["total"] == 20);

  r = run({"predict-polarity", "--model", w / "sm", "--input", w / "ptest.xml"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("polarity=") != std::string::npos);

  r = run({"evaluate-polarity", "--model", w / "sm", "--test", w / "test.xml", "--pipeline"});
  CHECK(r.code == 2);
}

TEST_CASE("training progress goes to stderr as JSON lines") {
  Workdir w;
  write_semeval_file(w / "train.xml", synthetic::detection_corpus(40, 1));
  std::vector<std::string> args{"train-aspect", "--train", w / "train.xml", "--out", w / "m",
                                "--embedding-dim", "8", "--filters", "4", "--max-len", "16",
                                "--epochs", "2", "--min-count", "2"};
  const auto r = run(args);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  std::istringstream lines(r.err);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("epoch"));
    ++count;
  }
  CHECK(count >= 1);
}

TEST_CASE("usage and runtime errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"train-aspect", "--bogus"}).code == 2);
  CHECK(run({"gradient-check", "--task", "neither"}).code == 2);
  CHECK(run({"inspect-inventory"}).code == 2);

  const auto missing = run({"evaluate-aspect", "--model", "/nonexistent/model", "--test",
                            "/nonexistent/test.xml"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("error") != std::string::npos);

  Workdir w;
  std::ofstream(w / "bad.xml") << "<sentences><sentence id=\"1\">";
  const auto bad = run({"inspect-inventory", "--train", w / "bad.xml"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("line") != std::string::npos);
}

TEST_CASE("gradient check command") {
  for (std::string task : {"aspect", "sentiment"}) {
    const auto r = run({"gradient-check", "--task", task, "--seed", "3"});
    REQUIRE_MESSAGE(r.code == 0, r.out);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["pass"] == true);
    CHECK(j["max_relative_error"].get<double>() < 1e-4);
  }
  const auto avg = run({"gradient-check", "--task", "sentiment", "--pooling", "max+avg",
                        "--aspect-embedding", "shared"});
  CHECK(avg.code == 0);
}
