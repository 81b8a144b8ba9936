#include "riscore/assembler.hpp"

#include <algorithm>
#include <set>

#include "riscore/errors.hpp"
#include "riscore/random.hpp"
#include "riscore/text.hpp"

namespace riscore {

namespace {

constexpr std::string_view kGeneratedSuffix = "#gen";

// Independent streams so choosing distractors never shifts the answer slot.
enum Stream : std::uint64_t { kChoose = 1, kShuffle = 2, kSlot = 3 };

std::vector<std::string> pick(const std::vector<std::string>& from, std::size_t k, CounterRng& rng) {
  std::vector<std::string> out;
  for (auto i : rng.sample_indices(from.size(), k)) out.push_back(from[i]);
  return out;
}

}  // namespace

std::string generated_id(const std::string& parent_id) { return parent_id + std::string(kGeneratedSuffix); }

std::optional<std::string> parent_of_generated(const std::string& id) {
  if (!id.ends_with(kGeneratedSuffix) || id.size() == kGeneratedSuffix.size()) return std::nullopt;
  return id.substr(0, id.size() - kGeneratedSuffix.size());
}

Riddle assemble_riddle(const QaPair& pair, const DistractorSet& distractors, Source source_style,
                       std::uint64_t rng_seed, std::optional<std::string> group_id) {
  if (source_style == Source::Synthetic) throw Error(ErrorCode::InvalidArgument, "assembly style must be a dataset");

  std::set<std::string> seen{text::normalize(pair.answer)};
  std::vector<std::string> model, lexical;
  for (const auto& d : distractors.items) {
    if (text::is_nota(d.text) || !seen.insert(text::normalize(d.text)).second) {
      throw Error(ErrorCode::DuplicateOption, pair.parent_id + ": '" + d.text + "'");
    }
    (d.origin == DistractorOrigin::WordNet ? lexical : model).push_back(d.text);
  }

  const CounterRng root(rng_seed);
  CounterRng choose = root.split(kChoose), shuffle = root.split(kShuffle), slot = root.split(kSlot);
  Riddle r;
  r.id = generated_id(pair.parent_id);
  r.group_id = group_id ? group_id : std::optional<std::string>(pair.parent_id);
  r.variant = Variant::Generated;
  r.question = pair.question;
  r.source = source_style;

  if (source_style == Source::BrainTeaserSP) {
    std::vector<std::string> all = model;
    all.insert(all.end(), lexical.begin(), lexical.end());
    if (all.size() < 3) {
      throw Error(ErrorCode::TooFewDistractors, pair.parent_id + ": " + std::to_string(all.size()) + " of 3");
    }
    if (text::is_nota(pair.answer)) {
      r.options = pick(all, 3, choose);
      shuffle.shuffle(r.options);
      r.options.emplace_back(text::kNoneOfTheAbove);
      r.answer_index = 3;
    } else {
      r.options = pick(all, 2, choose);
      shuffle.shuffle(r.options);
      r.answer_index = static_cast<std::size_t>(slot.below(3));
      r.options.insert(r.options.begin() + static_cast<std::ptrdiff_t>(r.answer_index), pair.answer);
      r.options.emplace_back(text::kNoneOfTheAbove);
    }
  } else {
    if (model.size() + lexical.size() < 4) {
      throw Error(ErrorCode::TooFewDistractors,
                  pair.parent_id + ": " + std::to_string(model.size() + lexical.size()) + " of 4");
    }
    if (model.size() < 2) {
      throw Error(ErrorCode::TooFewDistractors, pair.parent_id + ": fewer than 2 model-generated distractors");
    }
    // Two model items are guaranteed a slot; the rest compete on equal terms.
    const auto guaranteed = choose.sample_indices(model.size(), 2);
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < model.size(); ++i) {
      if (std::find(guaranteed.begin(), guaranteed.end(), i) == guaranteed.end()) rest.push_back(model[i]);
    }
    rest.insert(rest.end(), lexical.begin(), lexical.end());
    for (auto i : guaranteed) r.options.push_back(model[i]);
    for (auto& s : pick(rest, 2, choose)) r.options.push_back(std::move(s));
    shuffle.shuffle(r.options);
    r.answer_index = static_cast<std::size_t>(slot.below(5));
    r.options.insert(r.options.begin() + static_cast<std::ptrdiff_t>(r.answer_index), pair.answer);
  }

  if (auto rule = check_invariants(r)) throw Error(ErrorCode::InvariantViolation, r.id + ": " + *rule);
  return r;
}

PairInventory manual_pairs(const std::vector<Riddle>& riddles) {
  std::map<std::string, const Riddle*> originals, contexts;
  for (const auto& r : riddles) {
    if (!r.group_id || !r.variant) continue;
    if (*r.variant == Variant::Original) originals[*r.group_id] = &r;
    if (*r.variant == Variant::Context) contexts[*r.group_id] = &r;
  }
  PairInventory out;
  for (const auto& [gid, o] : originals) {
    auto it = contexts.find(gid);
    if (it != contexts.end()) out[o->id] = ExemplarPair{*o, *it->second, Provenance::Manual};
  }
  return out;
}

PairInventory generated_pairs(const std::vector<Riddle>& originals, const std::vector<Riddle>& generated) {
  std::map<std::string, const Riddle*> by_parent;
  for (const auto& g : generated) {
    if (auto parent = parent_of_generated(g.id)) by_parent[*parent] = &g;
  }
  PairInventory out;
  for (const auto& o : originals) {
    auto it = by_parent.find(o.id);
    if (it != by_parent.end()) out[o.id] = ExemplarPair{o, *it->second, Provenance::Generated};
  }
  return out;
}

PairingResult pair_exemplars(const Riddle& test, const EmbeddingVector& query, const VectorIndex& originals,
                             const VectorIndex& reconstructions, const PairInventory& pairs, std::size_t n_pairs) {
  if (n_pairs == 0) throw Error(ErrorCode::InvalidArgument, "n_pairs must be >= 1");

  // Leakage guard: the test riddle and anything sharing its group.
  std::set<std::string> banned{test.id};
  std::map<std::string, std::string> recon_to_original;
  for (const auto& [oid, p] : pairs) {
    recon_to_original[p.reconstruction.id] = oid;
    const bool same_group = test.group_id && (p.original.group_id == test.group_id ||
                                              p.reconstruction.group_id == test.group_id);
    if (same_group || p.original.id == test.id || p.reconstruction.id == test.id) {
      banned.insert(p.original.id);
      banned.insert(p.reconstruction.id);
    }
  }

  PairingResult result;
  std::set<std::string> used;
  const auto take = [&](const std::string& oid, double score) {
    auto it = pairs.find(oid);
    if (it == pairs.end() || used.count(oid) || banned.count(oid) || banned.count(it->second.reconstruction.id)) {
      return;
    }
    used.insert(oid);
    result.pairs.push_back(it->second);
    result.scores.push_back(score);
  };

  const auto ranked =
      originals.size() > 0 ? top_k(originals, query, originals.size(), banned) : std::vector<ScoredId>{};
  for (std::size_t i = 0; i < std::min(n_pairs, ranked.size()); ++i) take(ranked[i].id, ranked[i].score);

  if (result.pairs.size() < n_pairs) {
    struct Hit {
      ScoredId scored;
      bool is_reconstruction;
    };
    std::vector<Hit> pool;
    for (const auto& s : ranked) pool.push_back({s, false});
    if (reconstructions.size() > 0) {
      for (const auto& s : top_k(reconstructions, query, reconstructions.size(), banned)) pool.push_back({s, true});
    }
    sort_by_score(
        pool, [](const Hit& h) { return h.scored.score; }, [](const Hit& h) -> const std::string& { return h.scored.id; });
    for (const auto& h : pool) {
      if (result.pairs.size() >= n_pairs) break;
      if (!h.is_reconstruction) {
        take(h.scored.id, h.scored.score);
      } else if (auto it = recon_to_original.find(h.scored.id); it != recon_to_original.end()) {
        take(it->second, h.scored.score);
      }
    }
  }

  // Final order is by retrieval score regardless of which stage found the pair.
  std::vector<std::size_t> order(result.pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  sort_by_score(
      order, [&](std::size_t i) { return result.scores[i]; },
      [&](std::size_t i) -> const std::string& { return result.pairs[i].original.id; });
  PairingResult sorted;
  for (auto i : order) {
    sorted.pairs.push_back(std::move(result.pairs[i]));
    sorted.scores.push_back(result.scores[i]);
  }
  sorted.pool_exhausted = sorted.pairs.size() < n_pairs;
  return sorted;
}

}  // namespace riscore
