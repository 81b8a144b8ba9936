#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "riscore/llm_gateway.hpp"
#include "riscore/reconstructor.hpp"

namespace riscore {

struct EndpointConfig {
  std::string base_url;
  std::string api_key;
  std::string model;
  int timeout_s = 120;
};

struct DatasetPaths {
  std::filesystem::path train;
  std::filesystem::path test;
};

/// Everything a pipeline command needs. Relative paths in the file are
/// resolved against the file's directory; "${NAME}" in any string value is
/// replaced from the environment. Missing API keys fall back to
/// RISCORE_API_KEY.
struct RunConfig {
  std::filesystem::path work_dir;
  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::uint64_t> seed;

  EndpointConfig chat;
  EndpointConfig embedding;
  EndpointConfig classifier;
  std::string classifier_kind = "chat";  // "chat" or "zero-shot"

  std::map<std::string, ModelConfig> models;
  std::string generator_model;
  std::string evaluator_model;
  std::string classifier_model;

  std::map<std::string, DatasetPaths> datasets;  // "brainteaser", "riddlesense"
  std::optional<std::filesystem::path> fewshot_pairs;
  std::optional<std::filesystem::path> explanations;
  std::optional<std::filesystem::path> wordnet_index;
  std::optional<std::filesystem::path> wordnet_data;

  double dedup_threshold = 0.9;
  ReconMode reconstruction_mode = ReconMode::ZS;
  std::size_t max_in_flight = 4;
  std::size_t embed_batch = 32;

  [[nodiscard]] ModelRegistry registry() const { return ModelRegistry(models); }
  /// Default params for the tag with the run seed attached.
  [[nodiscard]] GeneratorConfig generator_for(const std::string& model_tag) const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_env();

/// Replaces every "${NAME}". Throws Config for an unset variable or an
/// unterminated reference.
std::string interpolate_env(std::string_view s, const EnvLookup& env);

RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir,
                           const EnvLookup& env = process_env());

/// Throws Config on unreadable or invalid files.
RunConfig load_run_config(const std::filesystem::path& path, const EnvLookup& env = process_env());

}  // namespace riscore
