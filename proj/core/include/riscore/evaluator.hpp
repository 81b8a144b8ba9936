#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "riscore/assembler.hpp"
#include "riscore/corpus.hpp"
#include "riscore/embedder.hpp"
#include "riscore/llm_gateway.hpp"
#include "riscore/prompter.hpp"

namespace riscore {

enum class Selection { Rand, Sim };

std::string_view to_string(Selection s) noexcept;
std::optional<Selection> parse_selection(std::string_view s);

struct EvalRecord {
  std::string riddle_id;
  Strategy strategy = Strategy::CotZS;
  std::size_t shots = 0;
  std::vector<std::string> exemplar_ids;
  std::string raw_output;
  std::optional<std::size_t> extracted_index;
  bool correct = false;
  bool unparsed = true;
  std::string error;  // gateway or selection failure, empty otherwise
};

nlohmann::json to_json(const EvalRecord& r);
EvalRecord eval_record_from_json(const nlohmann::json& j);

/// Index of the option the model chose, or nullopt when unparsed. Precedence:
/// the last "[option N]", else the last standalone "option N", else the only
/// option whose normalized text appears in the output. Out-of-range N is
/// unparsed.
std::optional<std::size_t> extract_choice(std::string_view raw, const std::vector<std::string>& options);

struct MetricsReport {
  double instance_accuracy = 0.0;
  std::map<Variant, double> per_variant;  // original, semantic, context when present
  double average = 0.0;
  std::optional<double> group_os;
  std::optional<double> group_osc;
  double unparsed_rate = 0.0;
  std::map<std::string, std::size_t> n;  // "total", variant names, "groups"
};

nlohmann::json to_json(const MetricsReport& m);
MetricsReport metrics_from_json(const nlohmann::json& j);

/// Scores records against the corpus. Group metrics are computed whenever the
/// records cover grouped original/semantic/context riddles; every such group
/// must then be complete (IncompleteGroup). Unknown riddle ids throw
/// UnknownRiddle. Unparsed records count as incorrect.
MetricsReport score(const std::vector<EvalRecord>& records, const std::vector<Riddle>& corpus);

/// Aligned text table, one row per labelled report: Original, Semantic,
/// Context, Ori+Sem, Ori+Sem+Con, Average, then instance accuracy and the
/// unparsed rate. Missing values print as "-".
std::string format_table(const std::vector<std::pair<std::string, MetricsReport>>& rows);

struct ExperimentSpec {
  Strategy strategy = Strategy::CotZS;
  std::size_t shots = 0;
  Selection selection = Selection::Sim;
  std::uint64_t seed = 0;
};

/// Everything exemplar selection may draw on. Pointers may be null when the
/// strategy does not need them.
struct ExperimentInputs {
  const std::vector<Riddle>* train = nullptr;        // FS exemplar pool
  const EmbeddingLookup* embeddings = nullptr;       // by riddle id; Sim selection
  const PairInventory* pairs = nullptr;              // Riscore / RiscoreM
  const Explanations* explanations = nullptr;        // CotFS
};

struct ExperimentOptions {
  GeneratorConfig generator;
  std::size_t max_in_flight = 4;
  /// When set, records are appended to records.partial.jsonl as they finish
  /// and an interrupted run resumes from it; the final records.jsonl and
  /// report.json are written atomically.
  std::optional<std::filesystem::path> run_dir;
};

struct ExperimentResult {
  std::vector<EvalRecord> records;  // test-set order
  MetricsReport report;
};

/// Exemplars chosen for one test riddle, in prompt order.
std::vector<Riddle> select_exemplars(const Riddle& test, const ExperimentSpec& spec, const ExperimentInputs& inputs);

/// Throws Config for an invalid strategy/shots/selection combination or
/// missing inputs; per-item gateway failures become unparsed records.
ExperimentResult run_experiment(const std::vector<Riddle>& test_set, const ExperimentSpec& spec,
                                const ExperimentInputs& inputs, LlmGateway& gateway, const ExperimentOptions& options);

void validate(const ExperimentSpec& spec, const ExperimentInputs& inputs);

}  // namespace riscore
