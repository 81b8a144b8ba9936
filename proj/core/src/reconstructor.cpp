#include "riscore/reconstructor.hpp"

#include <regex>

#include "reply_parsing.hpp"
#include "riscore/errors.hpp"
#include "riscore/io.hpp"
#include "riscore/parallel.hpp"
#include "riscore/templates.hpp"
#include "riscore/text.hpp"

namespace riscore {

std::string_view to_string(ReconMode m) noexcept { return m == ReconMode::ZS ? "zs" : "fs"; }

std::optional<ReconMode> parse_recon_mode(std::string_view s) {
  if (text::iequals(s, "zs")) return ReconMode::ZS;
  if (text::iequals(s, "fs")) return ReconMode::FS;
  return std::nullopt;
}

nlohmann::json to_json(const QaPair& p) {
  return {{"parent_id", p.parent_id},
          {"question", p.question},
          {"answer", p.answer},
          {"mode", std::string(to_string(p.mode))},
          {"generator_tag", p.generator_tag}};
}

QaPair qa_pair_from_json(const nlohmann::json& j) {
  try {
    QaPair p;
    p.parent_id = j.at("parent_id").get<std::string>();
    p.question = j.at("question").get<std::string>();
    p.answer = j.at("answer").get<std::string>();
    auto mode = parse_recon_mode(j.value("mode", std::string("zs")));
    if (!mode) throw Error(ErrorCode::MalformedLine, "unknown reconstruction mode");
    p.mode = *mode;
    p.generator_tag = j.value("generator_tag", std::string());
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedLine, e.what());
  }
}

nlohmann::json to_json(const QaRejection& r) {
  return {{"parent_id", r.parent_id}, {"reason", r.reason}, {"raw", r.raw}};
}

std::vector<FewShotPair> load_fewshot_pairs(const std::filesystem::path& path) {
  std::vector<FewShotPair> out;
  for (const auto& row : io::read_jsonl(path)) {
    FewShotPair pair;
    pair.original = riddle_from_json(row.at("original"));
    const Riddle recon = riddle_from_json(row.at("reconstruction"));
    for (const Riddle* r : {static_cast<const Riddle*>(&pair.original), &recon}) {
      if (auto rule = check_invariants(*r)) throw Error(ErrorCode::InvariantViolation, r->id + ": " + *rule);
    }
    pair.reconstruction = QaPair{recon.question, recon.answer(), pair.original.id, ReconMode::FS, "manual"};
    out.push_back(std::move(pair));
  }
  return out;
}

namespace {

std::string qa_block(std::string_view question, std::string_view answer) {
  return "Question: ```" + std::string(question) + "```\n\nCorrect answer: ```" + std::string(answer) + "```";
}

std::string examples_block(std::span<const FewShotPair> fewshot) {
  std::string out;
  for (std::size_t i = 0; i < fewshot.size(); ++i) {
    const auto& p = fewshot[i];
    out += "Example " + std::to_string(i + 1) + ":\nOriginal:\n";
    out += qa_block(p.original.question, p.original.answer());
    out += "\n\nContext reconstruction:\n";
    out += qa_block(p.reconstruction.question, p.reconstruction.answer);
    out += "\n";
  }
  return out;
}

}  // namespace

ChatRequest render_reconstruction_prompt(const Riddle& parent, std::string_view answer, ReconMode mode,
                                         std::span<const FewShotPair> fewshot, const GeneratorConfig& generator) {
  if (mode == ReconMode::ZS) {
    return generator.request(prompt_template("reconstruct_zs_system"),
                             fill_template(prompt_template("reconstruct_zs_user"),
                                           {{"QUESTION", parent.question}, {"ANSWER", std::string(answer)}}));
  }
  if (fewshot.empty()) throw Error(ErrorCode::InvalidArgument, "FS reconstruction needs exemplar pairs");
  const auto parent_q = text::normalize(parent.question);
  for (const auto& p : fewshot) {
    if (p.original.id == parent.id || text::normalize(p.original.question) == parent_q ||
        text::normalize(p.reconstruction.question) == parent_q) {
      throw Error(ErrorCode::ExemplarOverlap, "parent '" + parent.id + "' is one of the few-shot exemplars");
    }
  }
  return generator.request(
      prompt_template("reconstruct_fs_system"),
      fill_template(prompt_template("reconstruct_fs_user"),
                    {{"EXAMPLES", examples_block(fewshot)}, {"QUESTION", parent.question}, {"ANSWER", std::string(answer)}}));
}

std::optional<ParsedQa> parse_qa_response(std::string_view raw) {
  static const std::vector<std::regex> kLabels = {
      std::regex(R"((?:new\s+)?question\s*:)", std::regex::icase),
      std::regex(R"((?:new\s+)?(?:correct\s+)?answer\s*:)", std::regex::icase),
  };
  const std::string text = detail::strip_emphasis(raw);
  const auto labels = detail::find_labels(text, kLabels);
  auto q = detail::last_span(text, labels, 0);
  auto a = detail::last_span(text, labels, 1);
  if (!q || !a) return std::nullopt;
  ParsedQa out{detail::clean_span(*q), detail::clean_span(*a)};
  if (out.question.empty() || out.answer.empty()) return std::nullopt;
  return out;
}

ReconstructionReport reconstruct_batch(const std::vector<Riddle>& parents, ReconMode mode, LlmGateway& gateway,
                                       const GeneratorConfig& generator, Source source,
                                       std::span<const FewShotPair> fewshot, const ReconstructOptions& options) {
  struct Outcome {
    std::optional<QaPair> pair;
    QaRejection rejection;
  };
  std::vector<Outcome> outcomes(parents.size());

  parallel_for(parents.size(), options.max_in_flight, [&](std::size_t i) {
    const Riddle& parent = parents[i];
    Outcome& out = outcomes[i];
    out.rejection.parent_id = parent.id;
    try {
      ChatRequest req = render_reconstruction_prompt(parent, parent.answer(), mode, fewshot, generator);
      const auto base_seed = req.params.seed.value_or(0);
      std::optional<ParsedQa> parsed;
      for (int attempt = 0; attempt <= options.parse_retries && !parsed; ++attempt) {
        // A distinct seed per retry gives a distinct cache key and a fresh sample.
        if (attempt > 0) req.params.seed = base_seed + static_cast<std::uint64_t>(attempt);
        const auto resp = gateway.complete(req);
        out.rejection.raw = resp.text;
        parsed = parse_qa_response(resp.text);
      }
      if (!parsed) {
        out.rejection.reason = "Unparseable";
        return;
      }
      if (auto verdict = passes_quality_filter(parsed->question, parsed->answer, source); !verdict) {
        out.rejection.reason = verdict.reason;
        return;
      }
      if (text::normalize(parsed->question) == text::normalize(parent.question) ||
          text::normalize(parsed->answer) == text::normalize(parent.answer())) {
        out.rejection.reason = "not-distinct";
        return;
      }
      out.pair = QaPair{parsed->question, parsed->answer, parent.id, mode, generator.model_tag};
    } catch (const Error& e) {
      out.rejection.reason = e.what();
    }
  });

  ReconstructionReport report;
  report.attempted = parents.size();
  for (auto& o : outcomes) {
    if (o.pair) {
      report.accepted.push_back(std::move(*o.pair));
    } else {
      report.rejected.push_back(std::move(o.rejection));
    }
  }
  return report;
}

}  // namespace riscore
