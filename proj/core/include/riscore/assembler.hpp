#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "riscore/corpus.hpp"
#include "riscore/distractor_forge.hpp"
#include "riscore/embedder.hpp"
#include "riscore/reconstructor.hpp"

namespace riscore {

/// Id of the riddle assembled from parent `parent_id`.
std::string generated_id(const std::string& parent_id);
/// Inverse of generated_id; nullopt for ids that are not generated.
std::optional<std::string> parent_of_generated(const std::string& id);

/// Builds the final multiple-choice riddle. BrainTeaser style: four options,
/// NOTA last, answer uniform over slots 0-2 (or slot 3 when the answer is
/// NOTA). RiddleSense style: five options, at least two model-generated
/// distractors, answer uniform over all slots. Fully determined by rng_seed.
/// Throws TooFewDistractors or DuplicateOption.
Riddle assemble_riddle(const QaPair& pair, const DistractorSet& distractors, Source source_style,
                       std::uint64_t rng_seed, std::optional<std::string> group_id = std::nullopt);

enum class Provenance { Manual, Generated };

struct ExemplarPair {
  Riddle original;
  Riddle reconstruction;
  Provenance provenance = Provenance::Generated;
};

using PairInventory = std::map<std::string, ExemplarPair>;  // keyed by original id

/// Original + Context riddles of the same group (hand-written reconstructions).
PairInventory manual_pairs(const std::vector<Riddle>& riddles);

/// Originals joined with the riddles assembled from them.
PairInventory generated_pairs(const std::vector<Riddle>& originals, const std::vector<Riddle>& generated);

struct PairingResult {
  std::vector<ExemplarPair> pairs;  // score descending, then original id
  std::vector<double> scores;
  bool pool_exhausted = false;
};

/// Picks n_pairs exemplar pairs for a test riddle: the nearest originals that
/// own a reconstruction first, then a backfill over the unused originals and
/// reconstructions together, where each hit brings its counterpart. The test
/// riddle and every riddle of its group are never returned.
PairingResult pair_exemplars(const Riddle& test, const EmbeddingVector& query, const VectorIndex& originals,
                             const VectorIndex& reconstructions, const PairInventory& pairs, std::size_t n_pairs);

}  // namespace riscore
