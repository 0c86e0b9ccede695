#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "absa/error.hpp"
#include "absa/model_io.hpp"
#include "absa/random.hpp"

using namespace absa;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("absa_model_io_" + name);
  fs::remove_all(p);
  return p;
}

nn::ModelParams sample(nn::Pooling pooling, nn::AspectInput aspect) {
  nn::Architecture a;
  a.vocab_size = 30;
  a.embedding_dim = 7;
  a.aspect_vocab_size = 9;
  a.aspect_dim = 5;
  a.filters = 6;
  a.widths = {2, 4};
  a.classes = 4;
  a.pooling = pooling;
  a.aspect_input = aspect;
  nn::ModelParams p = nn::init_params(a, 17);
  nn::round_to_float(p);
  return p;
}

}  // namespace

TEST_CASE("round trip is bitwise exact") {
  for (auto pooling : {nn::Pooling::max, nn::Pooling::max_avg})
    for (auto aspect : {nn::AspectInput::none, nn::AspectInput::shared,
                        nn::AspectInput::separate}) {
      const auto dir = scratch("rt");
      const auto p = sample(pooling, aspect);
      save_model(dir, {{"task", "test"}}, p);
      const auto bundle = load_model(dir);
      CHECK(bundle.metadata["task"] == "test");
      CHECK(bundle.params.pooling == pooling);
      CHECK(bundle.params.aspect_input == aspect);
      const auto before = nn::parameter_arrays(p);
      const auto after = nn::parameter_arrays(bundle.params);
      REQUIRE(before.size() == after.size());
      for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(before[i].name == after[i].name);
        REQUIRE(before[i].size() == after[i].size());
        CHECK(std::equal(before[i].data, before[i].data + before[i].size(), after[i].data));
      }
      fs::remove_all(dir);
    }
}

TEST_CASE("params file size matches the manifest") {
  const auto dir = scratch("size");
  const auto p = sample(nn::Pooling::max, nn::AspectInput::separate);
  save_model(dir, {}, p);
  std::ifstream in(dir / kManifestFile);
  const auto manifest = nlohmann::json::parse(in);
  std::size_t floats = 0;
  for (const auto& a : nn::parameter_arrays(p)) floats += a.size();
  CHECK(manifest["total_floats"] == floats);
  CHECK(fs::file_size(dir / kParamsFile) == floats * 4);
  CHECK(manifest["format_version"] == kModelFormatVersion);
  fs::remove_all(dir);
}

TEST_CASE("corrupt models are rejected") {
  const auto p = sample(nn::Pooling::max, nn::AspectInput::none);

  SUBCASE("truncated params") {
    const auto dir = scratch("trunc");
    save_model(dir, {}, p);
    fs::resize_file(dir / kParamsFile, fs::file_size(dir / kParamsFile) - 4);
    CHECK_THROWS_AS(load_model(dir), FormatError);
    fs::remove_all(dir);
  }
  SUBCASE("trailing bytes") {
    const auto dir = scratch("extra");
    save_model(dir, {}, p);
    std::ofstream(dir / kParamsFile, std::ios::app | std::ios::binary) << "xxxx";
    CHECK_THROWS_AS(load_model(dir), FormatError);
    fs::remove_all(dir);
  }
  SUBCASE("unknown version") {
    const auto dir = scratch("version");
    save_model(dir, {}, p);
    nlohmann::json m;
    {
      std::ifstream in(dir / kManifestFile);
      m = nlohmann::json::parse(in);
    }
    m["format_version"] = 99;
    std::ofstream(dir / kManifestFile) << m.dump();
    CHECK_THROWS_AS(load_model(dir), FormatError);
    fs::remove_all(dir);
  }
  SUBCASE("garbage manifest") {
    const auto dir = scratch("garbage");
    save_model(dir, {}, p);
    std::ofstream(dir / kManifestFile) << "{not json";
    CHECK_THROWS_AS(load_model(dir), FormatError);
    fs::remove_all(dir);
  }
  SUBCASE("missing directory") {
    CHECK_THROWS_AS(load_model(scratch("absent")), FormatError);
  }
}
