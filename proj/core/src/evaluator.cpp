#include "riscore/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>

#include "riscore/errors.hpp"
#include "riscore/hashing.hpp"
#include "riscore/io.hpp"
#include "riscore/parallel.hpp"
#include "riscore/random.hpp"
#include "riscore/text.hpp"

namespace riscore {

std::string_view to_string(Selection s) noexcept { return s == Selection::Rand ? "rand" : "sim"; }

std::optional<Selection> parse_selection(std::string_view s) {
  if (text::iequals(s, "rand")) return Selection::Rand;
  if (text::iequals(s, "sim")) return Selection::Sim;
  return std::nullopt;
}

nlohmann::json to_json(const EvalRecord& r) {
  nlohmann::json j = {{"riddle_id", r.riddle_id},
                      {"strategy", std::string(to_string(r.strategy))},
                      {"shots", r.shots},
                      {"exemplar_ids", r.exemplar_ids},
                      {"raw_output", r.raw_output},
                      {"extracted_index", nullptr},
                      {"correct", r.correct},
                      {"unparsed", r.unparsed}};
  if (r.extracted_index) j["extracted_index"] = *r.extracted_index;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

EvalRecord eval_record_from_json(const nlohmann::json& j) {
  try {
    EvalRecord r;
    r.riddle_id = j.at("riddle_id").get<std::string>();
    auto strategy = parse_strategy(j.at("strategy").get<std::string>());
    if (!strategy) throw Error(ErrorCode::MalformedLine, "unknown strategy");
    r.strategy = *strategy;
    r.shots = j.at("shots").get<std::size_t>();
    r.exemplar_ids = j.value("exemplar_ids", std::vector<std::string>{});
    r.raw_output = j.at("raw_output").get<std::string>();
    if (!j.at("extracted_index").is_null()) r.extracted_index = j.at("extracted_index").get<std::size_t>();
    r.correct = j.at("correct").get<bool>();
    r.unparsed = j.at("unparsed").get<bool>();
    r.error = j.value("error", std::string());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedLine, e.what());
  }
}

// --- extraction --------------------------------------------------------------

std::optional<std::size_t> extract_choice(std::string_view raw, const std::vector<std::string>& options) {
  if (options.empty()) throw Error(ErrorCode::InvalidArgument, "no options");
  const std::string s(raw);
  const auto last_number = [&](const std::regex& re) -> std::optional<long> {
    std::optional<long> n;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
      n = std::stol((*it)[1].str());
    }
    return n;
  };
  const auto in_range = [&](long n) -> std::optional<std::size_t> {
    if (n < 1 || static_cast<std::size_t>(n) > options.size()) return std::nullopt;
    return static_cast<std::size_t>(n - 1);
  };
  static const std::regex kBracketed(R"(\[\s*option\s*(\d{1,3})\s*\])", std::regex::icase);
  static const std::regex kBare(R"(\boption\s*(\d{1,3})\b)", std::regex::icase);
  if (auto n = last_number(kBracketed)) return in_range(*n);
  if (auto n = last_number(kBare)) return in_range(*n);

  const std::string hay = text::to_lower(raw);
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < options.size(); ++i) {
    const auto needle = text::normalize(options[i]);
    if (needle.empty() || hay.find(needle) == std::string::npos) continue;
    if (found) return std::nullopt;  // ambiguous
    found = i;
  }
  return found;
}

// --- metrics -----------------------------------------------------------------

nlohmann::json to_json(const MetricsReport& m) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [v, acc] : m.per_variant) per[std::string(to_string(v))] = acc;
  nlohmann::json j = {{"instance_accuracy", m.instance_accuracy},
                      {"per_variant", per},
                      {"average", m.average},
                      {"group_os", nullptr},
                      {"group_osc", nullptr},
                      {"unparsed_rate", m.unparsed_rate},
                      {"n", m.n}};
  if (m.group_os) j["group_os"] = *m.group_os;
  if (m.group_osc) j["group_osc"] = *m.group_osc;
  return j;
}

MetricsReport metrics_from_json(const nlohmann::json& j) {
  MetricsReport m;
  m.instance_accuracy = j.at("instance_accuracy").get<double>();
  for (const auto& [k, v] : j.at("per_variant").items()) {
    if (auto var = parse_variant(k)) m.per_variant[*var] = v.get<double>();
  }
  m.average = j.at("average").get<double>();
  if (!j.at("group_os").is_null()) m.group_os = j.at("group_os").get<double>();
  if (!j.at("group_osc").is_null()) m.group_osc = j.at("group_osc").get<double>();
  m.unparsed_rate = j.value("unparsed_rate", 0.0);
  m.n = j.value("n", std::map<std::string, std::size_t>{});
  return m;
}

MetricsReport score(const std::vector<EvalRecord>& records, const std::vector<Riddle>& corpus) {
  std::unordered_map<std::string, const Riddle*> by_id;
  for (const auto& r : corpus) by_id[r.id] = &r;

  MetricsReport m;
  std::map<Variant, std::pair<std::size_t, std::size_t>> per;  // correct, total
  std::map<std::string, std::map<Variant, bool>> groups;
  std::set<std::string> seen;
  std::size_t correct = 0, unparsed = 0;
  for (const auto& rec : records) {
    auto it = by_id.find(rec.riddle_id);
    if (it == by_id.end()) throw Error(ErrorCode::UnknownRiddle, rec.riddle_id);
    if (!seen.insert(rec.riddle_id).second) throw Error(ErrorCode::InvalidArgument, "duplicate record " + rec.riddle_id);
    const Riddle& r = *it->second;
    const bool ok = rec.correct && !rec.unparsed;
    correct += ok;
    unparsed += rec.unparsed;
    if (r.variant && *r.variant != Variant::Generated) {
      auto& [c, t] = per[*r.variant];
      c += ok;
      ++t;
      if (r.group_id) groups[*r.group_id][*r.variant] = ok;
    }
  }
  const auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  m.n["total"] = records.size();
  m.instance_accuracy = ratio(correct, records.size());
  m.unparsed_rate = ratio(unparsed, records.size());

  double sum = 0.0;
  for (const auto& [v, ct] : per) {
    m.per_variant[v] = ratio(ct.first, ct.second);
    m.n[std::string(to_string(v))] = ct.second;
    sum += m.per_variant[v];
  }
  m.average = per.empty() ? m.instance_accuracy : sum / static_cast<double>(per.size());

  if (!groups.empty()) {
    std::size_t os = 0, osc = 0;
    for (const auto& [gid, answers] : groups) {
      if (answers.size() != 3) throw Error(ErrorCode::IncompleteGroup, gid);
      const bool o = answers.at(Variant::Original), s = answers.at(Variant::Semantic), c = answers.at(Variant::Context);
      os += o && s;
      osc += o && s && c;
    }
    m.group_os = ratio(os, groups.size());
    m.group_osc = ratio(osc, groups.size());
    m.n["groups"] = groups.size();
  }
  return m;
}

std::string format_table(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  const std::vector<std::string> header = {"Method",      "Original", "Semantic", "Context", "Ori+Sem",
                                           "Ori+Sem+Con", "Average",  "Instance", "Unparsed"};
  const auto fmt = [](std::optional<double> v) {
    if (!v) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *v);
    return std::string(buf);
  };
  const auto variant = [](const MetricsReport& m, Variant v) -> std::optional<double> {
    auto it = m.per_variant.find(v);
    return it == m.per_variant.end() ? std::nullopt : std::optional<double>(it->second);
  };
  std::vector<std::vector<std::string>> cells{header};
  for (const auto& [label, m] : rows) {
    cells.push_back({label, fmt(variant(m, Variant::Original)), fmt(variant(m, Variant::Semantic)),
                     fmt(variant(m, Variant::Context)), fmt(m.group_os), fmt(m.group_osc), fmt(m.average),
                     fmt(m.instance_accuracy), fmt(m.unparsed_rate)});
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      const auto& cell = cells[r][c];
      const std::string pad(width[c] - cell.size(), ' ');
      out += c == 0 ? cell + pad : "  " + pad + cell;
    }
    out += "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      out += std::string(total - 2, '-') + "\n";
    }
  }
  return out;
}

// --- experiment ----------------------------------------------------------------

void validate(const ExperimentSpec& spec, const ExperimentInputs& inputs) {
  const auto fail = [](const std::string& why) { return Error(ErrorCode::Config, why); };
  if (spec.strategy == Strategy::CotZS) {
    if (spec.shots != 0) throw fail("cot-zs takes no shots");
    return;
  }
  if (spec.shots != 2 && spec.shots != 4 && spec.shots != 8) throw fail("shots must be 2, 4 or 8");
  if (spec.strategy == Strategy::FsRand && spec.selection != Selection::Rand) throw fail("fs-rand uses rand selection");
  if (spec.strategy == Strategy::FsSim && spec.selection != Selection::Sim) throw fail("fs-sim uses sim selection");
  if (is_paired(spec.strategy)) {
    if (!inputs.pairs || inputs.pairs->empty()) throw fail(std::string(to_string(spec.strategy)) + " needs a pair inventory");
  } else if (!inputs.train || inputs.train->empty()) {
    throw fail(std::string(to_string(spec.strategy)) + " needs a training pool");
  }
  if (spec.selection == Selection::Sim && !inputs.embeddings) throw fail("sim selection needs embeddings");
  if (spec.strategy == Strategy::CotFS && !inputs.explanations) throw fail("cot-fs needs explanations");
}

namespace {

bool leaks(const Riddle& candidate, const Riddle& test) {
  return candidate.id == test.id || (test.group_id && candidate.group_id == test.group_id);
}

const EmbeddingVector& embedding_of(const EmbeddingLookup& lookup, const std::string& id) {
  auto it = lookup.find(id);
  if (it == lookup.end()) throw Error(ErrorCode::MissingEmbedding, id);
  return it->second;
}

std::vector<Riddle> flatten(const std::vector<ExemplarPair>& pairs) {
  std::vector<Riddle> out;
  for (const auto& p : pairs) {
    out.push_back(p.original);
    out.push_back(p.reconstruction);
  }
  return out;
}

}  // namespace

std::vector<Riddle> select_exemplars(const Riddle& test, const ExperimentSpec& spec, const ExperimentInputs& inputs) {
  if (spec.strategy == Strategy::CotZS) return {};
  CounterRng rng(derive_seed(spec.seed, test.id));

  if (is_paired(spec.strategy)) {
    const std::size_t n_pairs = spec.shots / 2;
    const PairInventory& inv = *inputs.pairs;
    if (spec.selection == Selection::Rand) {
      std::vector<const ExemplarPair*> pool;
      for (const auto& [id, p] : inv) {
        if (!leaks(p.original, test) && !leaks(p.reconstruction, test)) pool.push_back(&p);
      }
      std::vector<ExemplarPair> chosen;
      for (auto i : rng.sample_indices(pool.size(), n_pairs)) chosen.push_back(*pool[i]);
      return flatten(chosen);
    }
    std::vector<std::string> orig_ids, recon_ids;
    for (const auto& [id, p] : inv) {
      orig_ids.push_back(p.original.id);
      recon_ids.push_back(p.reconstruction.id);
    }
    if (inputs.train) {
      // Originals without a reconstruction still compete in the first pass.
      for (const auto& r : *inputs.train) {
        if (!inv.count(r.id) && r.variant.value_or(Variant::Original) == Variant::Original) orig_ids.push_back(r.id);
      }
    }
    const auto originals = build_index(orig_ids, *inputs.embeddings);
    const auto reconstructions = build_index(recon_ids, *inputs.embeddings);
    auto result = pair_exemplars(test, embedding_of(*inputs.embeddings, test.id), originals, reconstructions, inv,
                                 n_pairs);
    return flatten(result.pairs);
  }

  std::vector<const Riddle*> pool;
  for (const auto& r : *inputs.train) {
    if (leaks(r, test)) continue;
    if (spec.strategy == Strategy::CotFS && !inputs.explanations->count(r.id)) continue;
    pool.push_back(&r);
  }
  std::vector<Riddle> out;
  if (spec.selection == Selection::Rand) {
    for (auto i : rng.sample_indices(pool.size(), spec.shots)) out.push_back(*pool[i]);
    return out;
  }
  std::vector<std::string> ids;
  std::unordered_map<std::string, const Riddle*> by_id;
  for (const auto* r : pool) {
    ids.push_back(r->id);
    by_id[r->id] = r;
  }
  const auto index = build_index(ids, *inputs.embeddings);
  if (index.size() == 0) return out;
  for (const auto& hit : top_k(index, embedding_of(*inputs.embeddings, test.id), spec.shots)) {
    out.push_back(*by_id.at(hit.id));
  }
  return out;
}

namespace {

// Loads finished records from an interrupted run. A torn final line (the
// process died mid-append) is ignored.
std::unordered_map<std::string, EvalRecord> load_partial(const std::filesystem::path& path) {
  std::unordered_map<std::string, EvalRecord> out;
  if (!std::filesystem::exists(path)) return out;
  std::istringstream in(io::read_text(path));
  for (std::string line; std::getline(in, line);) {
    if (text::trim(line).empty()) continue;
    try {
      auto rec = eval_record_from_json(nlohmann::json::parse(line));
      out[rec.riddle_id] = std::move(rec);
    } catch (const std::exception&) {
      continue;
    }
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const std::vector<Riddle>& test_set, const ExperimentSpec& spec,
                                const ExperimentInputs& inputs, LlmGateway& gateway, const ExperimentOptions& options) {
  validate(spec, inputs);

  std::optional<std::filesystem::path> partial;
  std::unordered_map<std::string, EvalRecord> done;
  if (options.run_dir) {
    std::filesystem::create_directories(*options.run_dir);
    partial = *options.run_dir / "records.partial.jsonl";
    done = load_partial(*partial);
  }

  std::vector<EvalRecord> records(test_set.size());
  std::mutex append_mutex;
  parallel_for(test_set.size(), options.max_in_flight, [&](std::size_t i) {
    const Riddle& test = test_set[i];
    if (auto it = done.find(test.id); it != done.end()) {
      records[i] = it->second;
      return;
    }
    EvalRecord rec;
    rec.riddle_id = test.id;
    rec.strategy = spec.strategy;
    rec.shots = spec.shots;

    const auto exemplars = select_exemplars(test, spec, inputs);
    for (const auto& e : exemplars) rec.exemplar_ids.push_back(e.id);
    if (exemplars.size() != spec.shots) {
      rec.error = "PoolExhausted: " + std::to_string(exemplars.size()) + " of " + std::to_string(spec.shots) +
                  " exemplars available";
    } else {
      static const Explanations kNone;
      const auto bundle = render(spec.strategy, spec.shots, test, exemplars,
                                 inputs.explanations ? *inputs.explanations : kNone);
      try {
        rec.raw_output = gateway.complete(options.generator.request(bundle.system, bundle.user)).text;
        rec.extracted_index = extract_choice(rec.raw_output, test.options);
        rec.unparsed = !rec.extracted_index;
        rec.correct = rec.extracted_index && *rec.extracted_index == test.answer_index;
      } catch (const Error& e) {
        rec.error = e.what();
      }
    }
    if (partial) {
      std::lock_guard lock(append_mutex);
      io::append_line(*partial, to_json(rec).dump());
    }
    records[i] = std::move(rec);
  });

  ExperimentResult result{std::move(records), {}};
  result.report = score(result.records, test_set);
  if (options.run_dir) {
    std::vector<nlohmann::json> rows;
    for (const auto& r : result.records) rows.push_back(to_json(r));
    io::write_jsonl_atomic(*options.run_dir / "records.jsonl", rows);
    nlohmann::json report = to_json(result.report);
    report["strategy"] = std::string(to_string(spec.strategy));
    report["shots"] = spec.shots;
    report["selection"] = std::string(to_string(spec.selection));
    report["seed"] = spec.seed;
    report["model_tag"] = options.generator.model_tag;
    io::write_atomic(*options.run_dir / "report.json", report.dump(2) + "\n");
    std::filesystem::remove(*partial);
  }
  return result;
}

}  // namespace riscore
