#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "riscore/corpus.hpp"
#include "riscore/llm_gateway.hpp"

namespace riscore {

enum class ReconMode { ZS, FS };

std::string_view to_string(ReconMode m) noexcept;
std::optional<ReconMode> parse_recon_mode(std::string_view s);

/// One contextually reconstructed question/answer pair for a parent riddle.
struct QaPair {
  std::string question;
  std::string answer;
  std::string parent_id;
  ReconMode mode = ReconMode::ZS;
  std::string generator_tag;
};

nlohmann::json to_json(const QaPair& p);
QaPair qa_pair_from_json(const nlohmann::json& j);

/// A static few-shot exemplar: an original riddle and its reconstruction.
struct FewShotPair {
  Riddle original;
  QaPair reconstruction;
};

/// Reads JSONL lines of {"original": <riddle>, "reconstruction": <riddle>}.
std::vector<FewShotPair> load_fewshot_pairs(const std::filesystem::path& path);

/// Builds the reconstruction request for one parent. FS mode needs at least
/// one exemplar pair and none of them may be the parent (ExemplarOverlap).
ChatRequest render_reconstruction_prompt(const Riddle& parent, std::string_view answer, ReconMode mode,
                                         std::span<const FewShotPair> fewshot, const GeneratorConfig& generator);

struct ParsedQa {
  std::string question;
  std::string answer;
};

/// Extracts the last "Question:" span and the last "Answer:" / "Correct answer:"
/// span. Markdown emphasis, backtick fences and wrapping quotes are stripped.
/// Returns nullopt when either label is missing or its span is empty.
std::optional<ParsedQa> parse_qa_response(std::string_view raw);

struct QaRejection {
  std::string parent_id;
  std::string reason;
  std::string raw;
};

nlohmann::json to_json(const QaRejection& r);

struct ReconstructionReport {
  std::vector<QaPair> accepted;  // input order
  std::vector<QaRejection> rejected;
  std::size_t attempted = 0;
};

struct ReconstructOptions {
  int parse_retries = 2;
  std::size_t max_in_flight = 4;
};

/// Step 1 over a batch: render, complete, parse, then apply the source's
/// quality filter and the distinctness rule. Gateway failures reject the
/// item and the batch continues.
ReconstructionReport reconstruct_batch(const std::vector<Riddle>& parents, ReconMode mode, LlmGateway& gateway,
                                       const GeneratorConfig& generator, Source source,
                                       std::span<const FewShotPair> fewshot = {},
                                       const ReconstructOptions& options = {});

}  // namespace riscore
