#include "riscore/corpus.hpp"

#include <fstream>
#include <set>
#include <unordered_set>

#include "riscore/errors.hpp"
#include "riscore/text.hpp"

namespace riscore {

std::string_view to_string(Source s) noexcept {
  switch (s) {
    case Source::BrainTeaserSP: return "brainteaser_sp";
    case Source::RiddleSense: return "riddlesense";
    case Source::Synthetic: return "synthetic";
  }
  return "synthetic";
}

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::Original: return "original";
    case Variant::Semantic: return "semantic";
    case Variant::Context: return "context";
    case Variant::Generated: return "generated";
  }
  return "original";
}

std::optional<Source> parse_source(std::string_view s) {
  for (Source v : {Source::BrainTeaserSP, Source::RiddleSense, Source::Synthetic}) {
    if (text::iequals(s, to_string(v))) return v;
  }
  return std::nullopt;
}

std::optional<Variant> parse_variant(std::string_view s) {
  for (Variant v : {Variant::Original, Variant::Semantic, Variant::Context, Variant::Generated}) {
    if (text::iequals(s, to_string(v))) return v;
  }
  return std::nullopt;
}

nlohmann::json to_json(const Riddle& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["group_id"] = r.group_id ? nlohmann::json(*r.group_id) : nlohmann::json(nullptr);
  j["variant"] = r.variant ? nlohmann::json(std::string(to_string(*r.variant))) : nlohmann::json(nullptr);
  j["question"] = r.question;
  j["options"] = r.options;
  j["answer_index"] = r.answer_index;
  j["source"] = std::string(to_string(r.source));
  return j;
}

Riddle riddle_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& why) -> Riddle { throw Error(ErrorCode::MalformedLine, why); };
  if (!j.is_object()) return fail("not a JSON object");
  Riddle r;
  try {
    r.id = j.at("id").get<std::string>();
    if (j.contains("group_id") && !j["group_id"].is_null()) r.group_id = j["group_id"].get<std::string>();
    if (j.contains("variant") && !j["variant"].is_null()) {
      const auto name = j["variant"].get<std::string>();
      r.variant = parse_variant(name);
      if (!r.variant) return fail("unknown variant '" + name + "'");
    }
    r.question = j.at("question").get<std::string>();
    r.options = j.at("options").get<std::vector<std::string>>();
    const auto& idx = j.at("answer_index");
    if (!idx.is_number_integer()) return fail("answer_index is not an integer");
    if (idx.get<long long>() < 0) return fail("answer_index is negative");
    r.answer_index = idx.get<std::size_t>();
    if (j.contains("source") && !j["source"].is_null()) {
      const auto name = j["source"].get<std::string>();
      auto src = parse_source(name);
      if (!src) return fail("unknown source '" + name + "'");
      r.source = *src;
    }
  } catch (const nlohmann::json::exception& e) {
    return fail(e.what());
  }
  return r;
}

std::optional<std::string> check_invariants(const Riddle& r) {
  if (r.id.empty()) return "empty-id";
  if (text::trim(r.question).empty()) return "empty-question";
  if (r.options.size() < 4 || r.options.size() > 5) return "option-count";
  if (r.answer_index >= r.options.size()) return "answer-index-out-of-range";
  std::set<std::string> seen;
  for (const auto& o : r.options) {
    auto n = text::normalize(o);
    if (n.empty()) return "empty-option";
    if (!seen.insert(std::move(n)).second) return "duplicate-options";
  }
  switch (r.source) {
    case Source::BrainTeaserSP:
      if (r.options.size() != 4) return "option-count";
      if (!text::is_nota(r.options.back())) return "nota-not-last";
      if (!r.group_id || r.group_id->empty()) return "missing-group";
      if (!r.variant) return "missing-variant";
      break;
    case Source::RiddleSense:
      if (r.options.size() != 5) return "option-count";
      break;
    case Source::Synthetic:
      break;
  }
  return std::nullopt;
}

LoadResult load_corpus(const std::filesystem::path& path, Source source) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());

  LoadResult out;
  std::unordered_set<std::string> ids;
  std::set<std::pair<std::string, Variant>> group_slots;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    Riddle r;
    try {
      auto j = nlohmann::json::parse(line);
      const bool has_source = j.is_object() && j.contains("source") && !j["source"].is_null();
      r = riddle_from_json(j);
      if (!has_source) r.source = source;
    } catch (const nlohmann::json::parse_error& e) {
      out.rejects.push_back({line_no, std::string("MalformedLine: ") + e.what()});
      continue;
    } catch (const Error& e) {
      out.rejects.push_back({line_no, e.what()});
      continue;
    }
    auto violation = [&]() -> std::optional<std::string> {
      if (r.source != source) return std::string("source-mismatch");
      if (auto rule = check_invariants(r)) return rule;
      if (ids.count(r.id)) return std::string("duplicate-id");
      if (r.group_id && r.variant && *r.variant != Variant::Generated &&
          group_slots.count({*r.group_id, *r.variant})) {
        return std::string("duplicate-variant-in-group");
      }
      return std::nullopt;
    }();
    if (violation) {
      out.rejects.push_back({line_no, "InvariantViolation: " + *violation});
      continue;
    }
    ids.insert(r.id);
    if (r.group_id && r.variant && *r.variant != Variant::Generated) group_slots.insert({*r.group_id, *r.variant});
    out.riddles.push_back(std::move(r));
  }
  return out;
}

nlohmann::json to_json(const Reject& r) { return {{"line", r.line}, {"reason", r.reason}}; }

std::vector<std::string> complete_groups(const std::vector<Riddle>& riddles) {
  std::map<std::string, std::map<Variant, int>> groups;
  for (const auto& r : riddles) {
    if (r.group_id && r.variant) ++groups[*r.group_id][*r.variant];
  }
  std::vector<std::string> out;
  for (const auto& [gid, counts] : groups) {
    auto one = [&](Variant v) {
      auto it = counts.find(v);
      return it != counts.end() && it->second == 1;
    };
    if (one(Variant::Original) && one(Variant::Semantic) && one(Variant::Context)) out.push_back(gid);
  }
  return out;
}

CorpusStats compute_stats(const std::vector<Riddle>& riddles, std::size_t filtered_out) {
  CorpusStats s;
  s.total = riddles.size();
  s.filtered_out = filtered_out;
  for (const auto& r : riddles) {
    if (r.variant) ++s.per_variant[*r.variant];
  }
  s.groups_complete = complete_groups(riddles).size();
  return s;
}

nlohmann::json to_json(const CorpusStats& s) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [v, n] : s.per_variant) per[std::string(to_string(v))] = n;
  return {{"total", s.total}, {"per_variant", per}, {"groups_complete", s.groups_complete},
          {"filtered_out", s.filtered_out}};
}

FilterVerdict passes_answer_filter(std::string_view answer, Source source) {
  if (text::trim(answer).empty()) return {false, "empty-answer"};
  if (source == Source::RiddleSense && text::word_count(answer) > kRiddleSenseMaxAnswerWords) {
    return {false, "answer-too-long"};
  }
  return {};
}

FilterVerdict passes_quality_filter(std::string_view question, std::string_view answer, Source source) {
  const std::size_t words = text::word_count(question);
  switch (source) {
    case Source::BrainTeaserSP:
      if (words < kBrainTeaserMinQuestionWords) return {false, "question-too-short"};
      break;
    case Source::RiddleSense:
      if (words < kRiddleSenseMinQuestionWords) return {false, "question-too-short"};
      break;
    case Source::Synthetic:
      break;
  }
  return passes_answer_filter(answer, source);
}

DedupResult deduplicate_against(const std::vector<Riddle>& priority, const std::vector<Riddle>& candidates,
                                const EmbeddingLookup& embeddings, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "dedup threshold must be in (0, 1]");
  }
  auto vec = [&](const Riddle& r) -> const EmbeddingVector& {
    auto it = embeddings.find(r.id);
    if (it == embeddings.end()) throw Error(ErrorCode::MissingEmbedding, r.id);
    return it->second;
  };
  // Resolve every lookup first so a missing embedding fails before any work.
  std::vector<const EmbeddingVector*> prio;
  prio.reserve(priority.size());
  for (const auto& p : priority) prio.push_back(&vec(p));
  for (const auto& c : candidates) (void)vec(c);

  DedupResult out;
  for (const auto& c : candidates) {
    const auto& cv = vec(c);
    double best = -1.0;
    std::string best_id;
    for (std::size_t i = 0; i < priority.size(); ++i) {
      const double s = cosine(cv, *prio[i]);
      if (s > best) {
        best = s;
        best_id = priority[i].id;
      }
    }
    if (!priority.empty() && best >= threshold) {
      out.removed.push_back({c, best, best_id});
    } else {
      out.retained.push_back(c);
    }
  }
  return out;
}

}  // namespace riscore
