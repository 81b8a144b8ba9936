#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riscore/corpus.hpp"

namespace riscore {

enum class Strategy { CotZS, FsRand, FsSim, CotFS, Riscore, RiscoreM };

std::string_view to_string(Strategy s) noexcept;  // "cot-zs", "fs-rand", ...
std::optional<Strategy> parse_strategy(std::string_view s);

/// True for the strategies whose exemplars are original/reconstruction pairs.
bool is_paired(Strategy s) noexcept;

struct PromptBundle {
  Strategy strategy = Strategy::CotZS;
  std::size_t shots = 0;
  std::string system;
  std::string user;
  std::vector<std::string> exemplar_ids;
};

using Explanations = std::map<std::string, std::string>;

/// Number of options a riddle of this source must carry (4 or 5); Synthetic
/// riddles use their own option count.
std::size_t expected_option_count(const Riddle& r);

/// One answered exemplar as it appears inside {EXAMPLES} / {EXAMPLES_COT}.
std::string render_exemplar(const Riddle& r, std::size_t position, const std::string* explanation);

/// Renders the system and user prompt for one test riddle. Shots must be 0
/// for CotZS and one of 2, 4, 8 otherwise, equal to exemplars.size().
/// Throws ShotMismatch, MissingExplanation, OptionCountMismatch or
/// PairingMismatch (paired strategies must alternate original, reconstruction).
PromptBundle render(Strategy strategy, std::size_t shots, const Riddle& test, const std::vector<Riddle>& exemplars,
                    const Explanations& explanations = {});

}  // namespace riscore
