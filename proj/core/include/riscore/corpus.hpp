#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "riscore/embedder.hpp"

namespace riscore {

enum class Source { BrainTeaserSP, RiddleSense, Synthetic };
enum class Variant { Original, Semantic, Context, Generated };

std::string_view to_string(Source s) noexcept;
std::string_view to_string(Variant v) noexcept;
std::optional<Source> parse_source(std::string_view s);
std::optional<Variant> parse_variant(std::string_view s);

struct Riddle {
  std::string id;
  std::optional<std::string> group_id;
  std::optional<Variant> variant;
  std::string question;
  std::vector<std::string> options;
  std::size_t answer_index = 0;
  Source source = Source::Synthetic;

  [[nodiscard]] const std::string& answer() const { return options.at(answer_index); }
};

nlohmann::json to_json(const Riddle& r);

/// Schema-level decoding only; throws Error(MalformedLine) on missing or
/// mistyped fields. Use check_invariants for the semantic rules.
Riddle riddle_from_json(const nlohmann::json& j);

/// Returns the first violated invariant rule, or nullopt when the riddle is valid.
std::optional<std::string> check_invariants(const Riddle& r);

struct Reject {
  std::size_t line = 0;
  std::string reason;
};

struct LoadResult {
  std::vector<Riddle> riddles;
  std::vector<Reject> rejects;
};

/// Loads a JSONL corpus. Malformed or invalid lines are skipped and reported;
/// only a missing file throws.
LoadResult load_corpus(const std::filesystem::path& path, Source source);

nlohmann::json to_json(const Reject& r);

struct CorpusStats {
  std::size_t total = 0;
  std::map<Variant, std::size_t> per_variant;
  std::size_t groups_complete = 0;
  std::size_t filtered_out = 0;
};

CorpusStats compute_stats(const std::vector<Riddle>& riddles, std::size_t filtered_out = 0);
nlohmann::json to_json(const CorpusStats& s);

/// Group ids that hold exactly one Original, one Semantic and one Context riddle.
std::vector<std::string> complete_groups(const std::vector<Riddle>& riddles);

// Quality filter thresholds (whitespace word counts).
inline constexpr std::size_t kBrainTeaserMinQuestionWords = 7;
inline constexpr std::size_t kRiddleSenseMinQuestionWords = 6;
inline constexpr std::size_t kRiddleSenseMaxAnswerWords = 7;

struct FilterVerdict {
  bool pass = true;
  std::string reason;  // first violated rule; empty on pass
  explicit operator bool() const noexcept { return pass; }
};

FilterVerdict passes_quality_filter(std::string_view question, std::string_view answer, Source source);

/// The answer half of the filter, also applied to every generated distractor.
FilterVerdict passes_answer_filter(std::string_view answer, Source source);

struct RemovedRiddle {
  Riddle riddle;
  double similarity = 0.0;
  std::string nearest_id;
};

struct DedupResult {
  std::vector<Riddle> retained;
  std::vector<RemovedRiddle> removed;
};

/// Removes every candidate whose question embedding reaches `threshold`
/// cosine similarity with any priority question. Embeddings are looked up by
/// riddle id. The priority list is never modified.
DedupResult deduplicate_against(const std::vector<Riddle>& priority, const std::vector<Riddle>& candidates,
                                const EmbeddingLookup& embeddings, double threshold);

}  // namespace riscore
