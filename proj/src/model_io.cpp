#include "absa/model_io.hpp"

#include <bit>
#include <limits>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "absa/error.hpp"

namespace absa {

using nlohmann::json;

namespace {

static_assert(std::numeric_limits<float>::is_iec559);

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) |
           (v >> 24);
  }
  return v;
}

json pooled_layout(const nn::ModelParams& p) {
  json layout = json::array();
  int offset = 0;
  auto add = [&](const std::string& kind) {
    for (const auto& b : p.banks) {
      layout.push_back({{"offset", offset},
                        {"width", b.width},
                        {"filters", b.count()},
                        {"pooling", kind}});
      offset += b.count();
    }
  };
  add("max");
  if (p.pooling == nn::Pooling::max_avg) add("avg");
  return layout;
}

json shape_of(const Matrix& m) { return json::array({m.rows(), m.cols()}); }

std::pair<Eigen::Index, Eigen::Index> read_shape(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer() || j[0].get<long long>() < 0 ||
      j[1].get<long long>() < 0)
    throw FormatError(std::string("manifest: bad shape for ") + what);
  return {j[0].get<Eigen::Index>(), j[1].get<Eigen::Index>()};
}

}  // namespace

void save_model(const std::filesystem::path& dir, const json& metadata,
                const nn::ModelParams& params) {
  std::filesystem::create_directories(dir);
  json manifest;
  manifest["format_version"] = kModelFormatVersion;
  manifest["pooling"] = nn::to_string(params.pooling);
  manifest["aspect_input"] = nn::to_string(params.aspect_input);
  manifest["word_embeddings"] = shape_of(params.word_embeddings);
  manifest["aspect_embeddings"] = shape_of(params.aspect_embeddings);
  json banks = json::array();
  for (const auto& b : params.banks)
    banks.push_back({{"width", b.width}, {"filters", b.count()}});
  manifest["banks"] = banks;
  manifest["classes"] = params.classes();
  manifest["pooled_width"] = params.pooled_width();
  manifest["pooled_layout"] = pooled_layout(params);
  json arrays = json::array();
  std::size_t total = 0;
  for (const auto& a : nn::parameter_arrays(params)) {
    arrays.push_back({{"name", a.name}, {"shape", {a.rows, a.cols}}});
    total += a.size();
  }
  manifest["arrays"] = arrays;
  manifest["total_floats"] = total;
  manifest["metadata"] = metadata;

  {
    std::ofstream out(dir / kManifestFile, std::ios::binary);
    if (!out) throw UsageError("cannot write " + (dir / kManifestFile).string());
    out << manifest.dump(2) << '\n';
  }
  std::ofstream out(dir / kParamsFile, std::ios::binary);
  if (!out) throw UsageError("cannot write " + (dir / kParamsFile).string());
  std::vector<char> buffer;
  for (const auto& a : nn::parameter_arrays(params)) {
    buffer.resize(a.size() * 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto bits = to_little_endian(
          std::bit_cast<std::uint32_t>(static_cast<float>(a.data[i])));
      std::memcpy(buffer.data() + 4 * i, &bits, 4);
    }
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  }
  if (!out) throw Error("failed writing " + (dir / kParamsFile).string());
}

ModelBundle load_model(const std::filesystem::path& dir) {
  std::ifstream min(dir / kManifestFile);
  if (!min) throw FormatError("model directory " + dir.string() + " has no manifest");
  json manifest;
  try {
    min >> manifest;
  } catch (const json::exception& e) {
    throw FormatError("manifest: " + std::string(e.what()));
  }

  ModelBundle bundle;
  try {
    if (manifest.at("format_version").get<int>() != kModelFormatVersion)
      throw FormatError("manifest: unsupported format version " +
                        manifest.at("format_version").dump());
    nn::ModelParams& p = bundle.params;
    p.pooling = nn::parse_pooling(manifest.at("pooling").get<std::string>());
    p.aspect_input =
        nn::parse_aspect_input(manifest.at("aspect_input").get<std::string>());
    auto [v, k] = read_shape(manifest.at("word_embeddings"), "word_embeddings");
    p.word_embeddings = Matrix::Zero(v, k);
    auto [va, ka] = read_shape(manifest.at("aspect_embeddings"), "aspect_embeddings");
    p.aspect_embeddings = Matrix::Zero(va, ka);
    if (p.aspect_input == nn::AspectInput::separate && (va < 2 || ka < 1))
      throw FormatError("manifest: separate aspect space without a table");
    const int d = p.input_dim();
    for (const auto& b : manifest.at("banks")) {
      nn::ConvFilterBank bank;
      bank.width = b.at("width").get<int>();
      const int m = b.at("filters").get<int>();
      if (bank.width < 1 || m < 1) throw FormatError("manifest: bad filter bank");
      bank.weights = Matrix::Zero(m, bank.width * d);
      bank.bias = Vector::Zero(m);
      p.banks.push_back(std::move(bank));
    }
    const int classes = manifest.at("classes").get<int>();
    if (classes < 1) throw FormatError("manifest: bad class count");
    p.output_weights = Matrix::Zero(p.pooled_width(), classes);
    p.output_bias = Vector::Zero(classes);
    if (manifest.at("pooled_width").get<int>() != p.pooled_width())
      throw FormatError("manifest: pooled width disagrees with filter banks");

    const auto& declared = manifest.at("arrays");
    auto arrays = nn::parameter_arrays(p);
    if (declared.size() != arrays.size())
      throw FormatError("manifest: array list does not match architecture");
    std::size_t total = 0;
    for (std::size_t i = 0; i < arrays.size(); ++i) {
      const auto [r, c] = read_shape(declared[i].at("shape"), "array");
      if (declared[i].at("name").get<std::string>() != arrays[i].name ||
          r != arrays[i].rows || c != arrays[i].cols)
        throw FormatError("manifest: array " + std::to_string(i) + " ('" +
                          declared[i].at("name").get<std::string>() +
                          "') does not match architecture");
      total += arrays[i].size();
    }

    std::ifstream pin(dir / kParamsFile, std::ios::binary);
    if (!pin) throw FormatError("model directory " + dir.string() + " has no params.bin");
    std::ostringstream raw;
    raw << pin.rdbuf();
    const std::string bytes = raw.str();
    if (bytes.size() != total * 4)
      throw FormatError("params.bin holds " + std::to_string(bytes.size()) +
                        " bytes, manifest declares " + std::to_string(total * 4));
    std::size_t pos = 0;
    for (auto& a : arrays) {
      for (std::size_t i = 0; i < a.size(); ++i, pos += 4) {
        std::uint32_t bits;
        std::memcpy(&bits, bytes.data() + pos, 4);
        a.data[i] = static_cast<double>(std::bit_cast<float>(to_little_endian(bits)));
      }
    }
    bundle.metadata = manifest.value("metadata", json::object());
  } catch (const json::exception& e) {
    throw FormatError("manifest: " + std::string(e.what()));
  } catch (const ArgumentError& e) {
    throw FormatError("manifest: " + std::string(e.what()));
  }
  return bundle;
}

}  // namespace absa
