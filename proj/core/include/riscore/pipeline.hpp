#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "riscore/corpus.hpp"
#include "riscore/embedder.hpp"
#include "riscore/evaluator.hpp"
#include "riscore/llm_gateway.hpp"
#include "riscore/run_config.hpp"

namespace riscore {

struct PipelineOptions {
  /// {"chat": <MockChatBackend script>, "embeddings": <MockEmbeddingBackend spec>}.
  /// When set, no stage touches the network.
  std::optional<nlohmann::json> mock_script;
  std::ostream* log = nullptr;  // JSON lines; stderr when null
  Sleeper sleeper = real_sleeper();
};

struct RunArgs {
  std::string dataset = "brainteaser";
  Strategy strategy = Strategy::Riscore;
  std::size_t shots = 4;
  std::optional<Selection> selection;  // implied by fs-rand / fs-sim, else sim
  std::optional<std::string> resume;   // run id of an interrupted run
};

/// Work directory layout:
///   <work>/<dataset>/ingested_{train,test}.jsonl, {train,test}.jsonl,
///     rejects.jsonl, stats.json, dedup_removed.jsonl, reconstructions.jsonl,
///     reconstruction_rejects.jsonl, distractors.jsonl, distract_skipped.jsonl,
///     generated.jsonl, assemble_skipped.jsonl, pairs.jsonl
///   <work>/embeddings.jsonl
///   <work>/runs/run-NNNN/{meta.json,records.jsonl,report.json}
/// Every stage reads only files written by earlier stages and writes its own
/// outputs atomically, so reruns with warm caches are idempotent.
class Pipeline {
 public:
  explicit Pipeline(RunConfig config, PipelineOptions options = {});
  ~Pipeline();

  nlohmann::json ingest(const std::optional<std::string>& dataset = std::nullopt);
  nlohmann::json dedup(std::optional<double> threshold = std::nullopt);
  nlohmann::json embed();
  nlohmann::json reconstruct(const std::optional<std::string>& dataset = std::nullopt);
  nlohmann::json distract(const std::optional<std::string>& dataset = std::nullopt);
  nlohmann::json assemble(const std::optional<std::string>& dataset = std::nullopt);
  /// Returns the run directory.
  std::filesystem::path run(const RunArgs& args);
  /// Table over every finished run. Throws InvalidArgument("no records")
  /// when there is nothing to report.
  std::string report();

  /// Requests that crossed the network (chat and embeddings).
  [[nodiscard]] std::size_t network_calls() const;
  [[nodiscard]] const RunConfig& config() const noexcept { return config_; }

 private:
  struct Services;

  std::vector<std::string> datasets(const std::optional<std::string>& only) const;
  std::filesystem::path dir(const std::string& dataset) const;
  void log(const std::string& event, nlohmann::json fields = nlohmann::json::object()) const;
  Services& services();
  EmbeddingLookup embed_riddles(const std::vector<Riddle>& riddles);

  RunConfig config_;
  PipelineOptions options_;
  std::unique_ptr<Services> services_;
};

Source dataset_source(const std::string& dataset);

}  // namespace riscore
