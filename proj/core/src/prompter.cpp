#include "riscore/prompter.hpp"

#include <array>

#include "riscore/assembler.hpp"
#include "riscore/errors.hpp"
#include "riscore/templates.hpp"
#include "riscore/text.hpp"

namespace riscore {

namespace {

constexpr std::array<std::string_view, 6> kNames = {"cot-zs", "fs-rand", "fs-sim", "cot-fs", "riscore", "riscore-m"};

std::string options_block(const Riddle& r) {
  std::string out = "Options:\n";
  for (std::size_t i = 0; i < r.options.size(); ++i) {
    out += "[option " + std::to_string(i + 1) + "]: ```" + r.options[i] + "```";
    if (i + 1 < r.options.size()) out += "\n";
  }
  return out;
}

bool is_reconstruction(const Riddle& r) {
  return r.variant == Variant::Context || r.variant == Variant::Generated;
}

bool same_lineage(const Riddle& original, const Riddle& recon) {
  if (auto parent = parent_of_generated(recon.id); parent && *parent == original.id) return true;
  return original.group_id && recon.group_id && *original.group_id == *recon.group_id;
}

}  // namespace

std::string_view to_string(Strategy s) noexcept { return kNames[static_cast<std::size_t>(s)]; }

std::optional<Strategy> parse_strategy(std::string_view s) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (text::iequals(s, kNames[i])) return static_cast<Strategy>(i);
  }
  return std::nullopt;
}

bool is_paired(Strategy s) noexcept { return s == Strategy::Riscore || s == Strategy::RiscoreM; }

std::size_t expected_option_count(const Riddle& r) {
  switch (r.source) {
    case Source::BrainTeaserSP: return 4;
    case Source::RiddleSense: return 5;
    case Source::Synthetic: break;
  }
  return r.options.size();
}

std::string render_exemplar(const Riddle& r, std::size_t position, const std::string* explanation) {
  std::string out = "Example " + std::to_string(position) + ":\nRiddle: ```\n" + r.question + "\n```\n\n" +
                    options_block(r) + "\n";
  if (explanation) out += "Explanation: " + *explanation + "\n";
  out += "Answer: [option " + std::to_string(r.answer_index + 1) + "]: " + r.answer() + "\n";
  return out;
}

PromptBundle render(Strategy strategy, std::size_t shots, const Riddle& test, const std::vector<Riddle>& exemplars,
                    const Explanations& explanations) {
  if (strategy == Strategy::CotZS ? shots != 0 : (shots != 2 && shots != 4 && shots != 8)) {
    throw Error(ErrorCode::ShotMismatch,
                std::string(to_string(strategy)) + " does not support " + std::to_string(shots) + " shots");
  }
  if (exemplars.size() != shots) {
    throw Error(ErrorCode::ShotMismatch,
                std::to_string(exemplars.size()) + " exemplars for " + std::to_string(shots) + " shots");
  }
  const std::size_t n_options = expected_option_count(test);
  if (n_options != 4 && n_options != 5) {
    throw Error(ErrorCode::OptionCountMismatch, test.id + " has " + std::to_string(n_options) + " options");
  }
  if (test.options.size() != n_options) {
    throw Error(ErrorCode::OptionCountMismatch, test.id + ": expected " + std::to_string(n_options) + " options");
  }
  for (const auto& e : exemplars) {
    if (e.options.size() != n_options) {
      throw Error(ErrorCode::OptionCountMismatch, "exemplar " + e.id + " does not match the test option count");
    }
  }
  if (is_paired(strategy)) {
    for (std::size_t i = 0; i < exemplars.size(); i += 2) {
      const auto& o = exemplars[i];
      const auto& c = exemplars[i + 1];
      if (is_reconstruction(o) || !is_reconstruction(c) || !same_lineage(o, c)) {
        throw Error(ErrorCode::PairingMismatch, "exemplars " + o.id + ", " + c.id + " are not an original/reconstruction pair");
      }
    }
  }

  PromptBundle b;
  b.strategy = strategy;
  b.shots = shots;
  const std::string n = std::to_string(n_options);
  const bool cot = strategy == Strategy::CotFS;
  std::string family = strategy == Strategy::CotZS ? "cot_zs_" : (cot ? "cot_fs_" : "fs_");

  std::map<std::string, std::string> values = {{"RIDDLE", test.question}, {"SHOTS", std::to_string(shots)}};
  for (std::size_t i = 0; i < test.options.size(); ++i) values["OPTION_" + std::to_string(i + 1)] = test.options[i];

  std::string examples;
  for (std::size_t i = 0; i < exemplars.size(); ++i) {
    const auto& e = exemplars[i];
    const std::string* explanation = nullptr;
    if (cot) {
      auto it = explanations.find(e.id);
      if (it == explanations.end()) throw Error(ErrorCode::MissingExplanation, e.id);
      explanation = &it->second;
    }
    if (i > 0) examples += "\n";
    examples += render_exemplar(e, i + 1, explanation);
    b.exemplar_ids.push_back(e.id);
  }
  values[cot ? "EXAMPLES_COT" : "EXAMPLES"] = examples;

  b.system = fill_template(prompt_template(family + n + "_system"), values);
  b.user = fill_template(prompt_template(family + n + "_user"), values);
  return b;
}

}  // namespace riscore
