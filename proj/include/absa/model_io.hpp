#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "absa/nn.hpp"

namespace absa {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kManifestFile = "manifest";
inline constexpr const char* kParamsFile = "params.bin";

struct ModelBundle {
  nlohmann::json metadata;  // task-specific part of the manifest
  nn::ModelParams params;
};

// Writes `dir/manifest` (JSON: shapes, array order, pooled layout, format
// version, plus `metadata`) and `dir/params.bin` (little-endian float32,
// arrays concatenated in manifest order, row-major). Creates `dir`.
void save_model(const std::filesystem::path& dir, const nlohmann::json& metadata,
                const nn::ModelParams& params);

// Throws FormatError on a missing file, unknown format version, shape
// inconsistency, or a params.bin whose length disagrees with the manifest.
ModelBundle load_model(const std::filesystem::path& dir);

}  // namespace absa
