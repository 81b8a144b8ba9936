#include "riscore/pipeline.hpp"

#include <cstdio>
#include <iostream>
#include <mutex>
#include <set>

#include "riscore/assembler.hpp"
#include "riscore/distractor_forge.hpp"
#include "riscore/errors.hpp"
#include "riscore/hashing.hpp"
#include "riscore/io.hpp"
#include "riscore/parallel.hpp"
#include "riscore/reconstructor.hpp"
#include "riscore/wordnet.hpp"

namespace riscore {

namespace fs = std::filesystem;

Source dataset_source(const std::string& dataset) {
  if (dataset == "brainteaser") return Source::BrainTeaserSP;
  if (dataset == "riddlesense") return Source::RiddleSense;
  throw Error(ErrorCode::Config, "unknown dataset '" + dataset + "'");
}

namespace {

std::vector<Riddle> read_riddles(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::MissingFile, path.string() + " (run the earlier stage first)");
  std::vector<Riddle> out;
  for (const auto& row : io::read_jsonl(path)) out.push_back(riddle_from_json(row));
  return out;
}

template <typename T>
void write_rows(const fs::path& path, const std::vector<T>& items) {
  std::vector<nlohmann::json> rows;
  rows.reserve(items.size());
  for (const auto& it : items) rows.push_back(to_json(it));
  io::write_jsonl_atomic(path, rows);
}

void write_json_rows(const fs::path& path, const std::vector<nlohmann::json>& rows) { io::write_jsonl_atomic(path, rows); }

void require_file(const std::optional<fs::path>& p, const std::string& what) {
  if (!p) throw Error(ErrorCode::Config, what + " is not configured");
  if (!fs::exists(*p)) throw Error(ErrorCode::Config, what + " not found: " + p->string());
}

std::vector<std::string> answer_distractors(const Riddle& r) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < r.options.size(); ++i) {
    if (i != r.answer_index) out.push_back(r.options[i]);
  }
  return out;
}

std::string run_name(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run-%04zu", n);
  return buf;
}

}  // namespace

struct Pipeline::Services {
  std::shared_ptr<ChatBackend> chat_backend;
  std::shared_ptr<EmbeddingBackend> embed_backend;
  std::unique_ptr<LlmGateway> gateway;
  std::unique_ptr<Embedder> embedder;
};

Pipeline::Pipeline(RunConfig config, PipelineOptions options) : config_(std::move(config)), options_(std::move(options)) {
  if (!config_.seed) throw Error(ErrorCode::Config, "a seed is required (config \"seed\" or --seed)");
}

Pipeline::~Pipeline() = default;

void Pipeline::log(const std::string& event, nlohmann::json fields) const {
  fields["event"] = event;
  std::ostream& out = options_.log ? *options_.log : std::cerr;
  out << fields.dump() << "\n";
}

Pipeline::Services& Pipeline::services() {
  if (services_) return *services_;
  auto s = std::make_unique<Services>();
  if (options_.mock_script) {
    s->chat_backend = std::make_shared<MockChatBackend>(options_.mock_script->value("chat", nlohmann::json::object()));
    s->embed_backend =
        std::make_shared<MockEmbeddingBackend>(options_.mock_script->value("embeddings", nlohmann::json::object()));
  } else {
    if (config_.chat.base_url.empty()) throw Error(ErrorCode::Config, "chat.base_url is not configured");
    if (config_.embedding.base_url.empty()) throw Error(ErrorCode::Config, "embedding.base_url is not configured");
    s->chat_backend = std::make_shared<HttpChatBackend>(config_.chat.base_url, config_.chat.api_key, config_.chat.timeout_s);
    s->embed_backend = std::make_shared<HttpEmbeddingBackend>(config_.embedding.base_url, config_.embedding.model,
                                                              config_.embedding.api_key, config_.embedding.timeout_s);
  }
  GatewayOptions go;
  go.max_in_flight = config_.max_in_flight;
  go.sleeper = options_.sleeper;
  go.jitter_seed = *config_.seed;
  if (config_.cache_dir) go.cache_dir = *config_.cache_dir / "chat";
  s->gateway = std::make_unique<LlmGateway>(s->chat_backend, go);
  EmbedderOptions eo;
  eo.batch_size = config_.embed_batch;
  eo.max_in_flight = config_.max_in_flight;
  if (config_.cache_dir) eo.cache_dir = *config_.cache_dir / "embeddings";
  s->embedder = std::make_unique<Embedder>(s->embed_backend, eo);
  services_ = std::move(s);
  return *services_;
}

std::size_t Pipeline::network_calls() const {
  if (!services_) return 0;
  return services_->gateway->stats().network_calls + services_->embed_backend->network_calls();
}

std::vector<std::string> Pipeline::datasets(const std::optional<std::string>& only) const {
  if (only) {
    dataset_source(*only);
    if (!config_.datasets.count(*only)) throw Error(ErrorCode::Config, "dataset '" + *only + "' is not configured");
    return {*only};
  }
  std::vector<std::string> out;
  for (const auto& [name, paths] : config_.datasets) out.push_back(name);
  if (out.empty()) throw Error(ErrorCode::Config, "no datasets configured");
  return out;
}

fs::path Pipeline::dir(const std::string& dataset) const { return config_.work_dir / dataset; }

EmbeddingLookup Pipeline::embed_riddles(const std::vector<Riddle>& riddles) {
  EmbeddingLookup out;
  if (riddles.empty()) return out;
  std::vector<std::string> texts;
  for (const auto& r : riddles) texts.push_back(r.question);
  auto vectors = services().embedder->embed_batch(texts);
  for (std::size_t i = 0; i < riddles.size(); ++i) {
    if (!out.emplace(riddles[i].id, std::move(vectors[i])).second) {
      throw Error(ErrorCode::InvalidArgument, "riddle id '" + riddles[i].id + "' is not unique across datasets");
    }
  }
  return out;
}

// --- stages -------------------------------------------------------------------------

nlohmann::json Pipeline::ingest(const std::optional<std::string>& dataset) {
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& ds : datasets(dataset)) {
    const auto& paths = config_.datasets.at(ds);
    for (const auto* p : {&paths.train, &paths.test}) {
      if (!fs::exists(*p)) throw Error(ErrorCode::Config, ds + " corpus not found: " + p->string());
    }
    const Source src = dataset_source(ds);
    fs::create_directories(dir(ds));
    std::vector<nlohmann::json> rejects;
    nlohmann::json stats = nlohmann::json::object();
    for (const auto& [split, path] : {std::pair{"train", paths.train}, std::pair{"test", paths.test}}) {
      auto loaded = load_corpus(path, src);
      for (const auto& r : loaded.rejects) {
        auto j = to_json(r);
        j["split"] = split;
        rejects.push_back(std::move(j));
      }
      write_rows(dir(ds) / ("ingested_" + std::string(split) + ".jsonl"), loaded.riddles);
      write_rows(dir(ds) / (std::string(split) + ".jsonl"), loaded.riddles);
      stats[split] = to_json(compute_stats(loaded.riddles, loaded.rejects.size()));
    }
    write_json_rows(dir(ds) / "rejects.jsonl", rejects);
    io::write_atomic(dir(ds) / "stats.json", stats.dump(2) + "\n");
    summary[ds] = stats;
    log("ingest", {{"dataset", ds}, {"stats", stats}});
  }
  return summary;
}

nlohmann::json Pipeline::dedup(std::optional<double> threshold) {
  const double t = threshold.value_or(config_.dedup_threshold);
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be in (0, 1]");
  if (!config_.datasets.count("riddlesense")) return {{"removed", 0}, {"note", "no riddlesense dataset configured"}};

  // BrainTeaser questions take priority; RiddleSense near-duplicates go.
  std::vector<Riddle> priority;
  if (config_.datasets.count("brainteaser")) {
    for (const char* split : {"ingested_train.jsonl", "ingested_test.jsonl"}) {
      auto rs = read_riddles(dir("brainteaser") / split);
      priority.insert(priority.end(), rs.begin(), rs.end());
    }
  }
  nlohmann::json summary = {{"threshold", t}, {"removed", nlohmann::json::array()}};
  std::vector<nlohmann::json> removed_rows;
  for (const char* split : {"train", "test"}) {
    auto candidates = read_riddles(dir("riddlesense") / ("ingested_" + std::string(split) + ".jsonl"));
    std::vector<Riddle> both = priority;
    both.insert(both.end(), candidates.begin(), candidates.end());
    const auto lookup = embed_riddles(both);
    auto result = deduplicate_against(priority, candidates, lookup, t);
    write_rows(dir("riddlesense") / (std::string(split) + ".jsonl"), result.retained);
    for (const auto& r : result.removed) {
      nlohmann::json row = {{"id", r.riddle.id}, {"split", split}, {"similarity", r.similarity}, {"nearest_id", r.nearest_id}};
      summary["removed"].push_back(row);
      removed_rows.push_back(std::move(row));
    }
  }
  write_json_rows(dir("riddlesense") / "dedup_removed.jsonl", removed_rows);
  log("dedup", {{"threshold", t}, {"removed", removed_rows.size()}});
  return summary;
}

nlohmann::json Pipeline::embed() {
  std::vector<Riddle> all;
  for (const auto& ds : datasets(std::nullopt)) {
    for (const char* f : {"train.jsonl", "test.jsonl", "generated.jsonl"}) {
      if (fs::exists(dir(ds) / f)) {
        auto rs = read_riddles(dir(ds) / f);
        all.insert(all.end(), rs.begin(), rs.end());
      }
    }
  }
  auto lookup = embed_riddles(all);
  std::vector<std::string> labels;
  for (auto c : kAllCategories) labels.emplace_back(to_string(c));
  auto label_vecs = services().embedder->embed_batch(labels);

  std::vector<nlohmann::json> rows;
  for (const auto& r : all) rows.push_back({{"id", r.id}, {"model", lookup.at(r.id).model_tag}, {"vector", lookup.at(r.id).values}});
  for (std::size_t i = 0; i < labels.size(); ++i) {
    rows.push_back({{"id", "category:" + labels[i]}, {"model", label_vecs[i].model_tag}, {"vector", label_vecs[i].values}});
  }
  fs::create_directories(config_.work_dir);
  write_json_rows(config_.work_dir / "embeddings.jsonl", rows);
  log("embed", {{"vectors", rows.size()}, {"cache_hits", services().embedder->cache_hits()}});
  return {{"vectors", rows.size()}};
}

nlohmann::json Pipeline::reconstruct(const std::optional<std::string>& dataset) {
  if (config_.generator_model.empty()) throw Error(ErrorCode::Config, "roles.generator is not configured");
  std::vector<FewShotPair> fewshot;
  if (config_.reconstruction_mode == ReconMode::FS) {
    require_file(config_.fewshot_pairs, "fewshot_pairs");
    fewshot = load_fewshot_pairs(*config_.fewshot_pairs);
  }
  const auto generator = config_.generator_for(config_.generator_model);
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& ds : datasets(dataset)) {
    std::vector<Riddle> parents;
    for (auto& r : read_riddles(dir(ds) / "train.jsonl")) {
      if (r.variant.value_or(Variant::Original) == Variant::Original) parents.push_back(std::move(r));
    }
    ReconstructOptions ro;
    ro.max_in_flight = config_.max_in_flight;
    auto report = reconstruct_batch(parents, config_.reconstruction_mode, *services().gateway, generator,
                                    dataset_source(ds), fewshot, ro);
    write_rows(dir(ds) / "reconstructions.jsonl", report.accepted);
    write_rows(dir(ds) / "reconstruction_rejects.jsonl", report.rejected);
    summary[ds] = {{"attempted", report.attempted}, {"accepted", report.accepted.size()}, {"rejected", report.rejected.size()}};
    log("reconstruct", {{"dataset", ds}, {"summary", summary[ds]}});
  }
  return summary;
}

nlohmann::json Pipeline::distract(const std::optional<std::string>& dataset) {
  if (config_.generator_model.empty()) throw Error(ErrorCode::Config, "roles.generator is not configured");
  const auto generator = config_.generator_for(config_.generator_model);
  LlmGateway& gateway = *services().gateway;
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& ds : datasets(dataset)) {
    const Source src = dataset_source(ds);
    std::unordered_map<std::string, Riddle> parents;
    for (auto& r : read_riddles(dir(ds) / "train.jsonl")) parents.emplace(r.id, std::move(r));
    if (!fs::exists(dir(ds) / "reconstructions.jsonl")) throw Error(ErrorCode::MissingFile, "run reconstruct first");
    std::vector<QaPair> pairs;
    for (const auto& row : io::read_jsonl(dir(ds) / "reconstructions.jsonl")) pairs.push_back(qa_pair_from_json(row));

    std::optional<Lexicon> lexicon;
    EmbeddingLookup category_vecs;
    std::unique_ptr<AnswerClassifier> classifier;
    if (src == Source::RiddleSense) {
      require_file(config_.wordnet_index, "wordnet.index");
      require_file(config_.wordnet_data, "wordnet.data");
      lexicon = load_wordnet(*config_.wordnet_index, *config_.wordnet_data);
      std::vector<std::string> labels;
      for (auto c : kAllCategories) labels.emplace_back(to_string(c));
      auto vecs = services().embedder->embed_batch(labels);
      for (std::size_t i = 0; i < labels.size(); ++i) category_vecs[labels[i]] = vecs[i];
      if (config_.classifier_kind == "zero-shot" && !options_.mock_script) {
        classifier = std::make_unique<ZeroShotHttpClassifier>(config_.classifier.base_url, config_.classifier.api_key,
                                                              config_.classifier.timeout_s);
      } else {
        classifier = std::make_unique<ChatClassifier>(gateway, config_.generator_for(config_.classifier_model));
      }
    }

    std::vector<std::optional<DistractorSet>> sets(pairs.size());
    std::vector<std::string> failures(pairs.size());
    parallel_for(pairs.size(), config_.max_in_flight, [&](std::size_t i) {
      const auto& pair = pairs[i];
      try {
        auto it = parents.find(pair.parent_id);
        if (it == parents.end()) throw Error(ErrorCode::UnknownRiddle, pair.parent_id);
        if (src == Source::BrainTeaserSP) {
          sets[i] = gen_long_distractors(pair, it->second, gateway, generator);
        } else {
          const auto originals = answer_distractors(it->second);
          sets[i] = gen_short_distractors(pair, gateway, generator, *classifier, *lexicon, category_vecs,
                                          originals);
        }
      } catch (const Error& e) {
        failures[i] = e.what();
      }
    });

    std::vector<DistractorSet> kept;
    std::vector<nlohmann::json> skipped;
    std::size_t risky = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (sets[i]) {
        for (const auto& d : sets[i]->items) {
          if (d.risky) {
            ++risky;
            log("risky_distractor", {{"parent_id", pairs[i].parent_id}, {"answer", pairs[i].answer}, {"distractor", d.text}});
          }
        }
        kept.push_back(std::move(*sets[i]));
      } else {
        skipped.push_back({{"parent_id", pairs[i].parent_id}, {"reason", failures[i]}});
      }
    }
    write_rows(dir(ds) / "distractors.jsonl", kept);
    write_json_rows(dir(ds) / "distract_skipped.jsonl", skipped);
    summary[ds] = {{"sets", kept.size()}, {"skipped", skipped.size()}, {"risky", risky}};
    log("distract", {{"dataset", ds}, {"summary", summary[ds]}});
  }
  return summary;
}

nlohmann::json Pipeline::assemble(const std::optional<std::string>& dataset) {
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& ds : datasets(dataset)) {
    const Source src = dataset_source(ds);
    const auto train = read_riddles(dir(ds) / "train.jsonl");
    std::unordered_map<std::string, const Riddle*> parents;
    for (const auto& r : train) parents[r.id] = &r;
    std::unordered_map<std::string, QaPair> pairs;
    for (const auto& row : io::read_jsonl(dir(ds) / "reconstructions.jsonl")) {
      auto p = qa_pair_from_json(row);
      pairs.emplace(p.parent_id, std::move(p));
    }
    std::vector<Riddle> generated;
    std::vector<nlohmann::json> skipped;
    if (!fs::exists(dir(ds) / "distractors.jsonl")) throw Error(ErrorCode::MissingFile, "run distract first");
    for (const auto& row : io::read_jsonl(dir(ds) / "distractors.jsonl")) {
      const auto set = distractor_set_from_json(row);
      try {
        auto pit = pairs.find(set.parent_id);
        auto rit = parents.find(set.parent_id);
        if (pit == pairs.end() || rit == parents.end()) throw Error(ErrorCode::UnknownRiddle, set.parent_id);
        const Riddle& parent = *rit->second;
        generated.push_back(assemble_riddle(pit->second, set, src, derive_seed(*config_.seed, set.parent_id),
                                            parent.group_id.value_or(parent.id)));
      } catch (const Error& e) {
        skipped.push_back({{"parent_id", set.parent_id}, {"reason", e.what()}});
      }
    }
    write_rows(dir(ds) / "generated.jsonl", generated);
    write_json_rows(dir(ds) / "assemble_skipped.jsonl", skipped);

    std::vector<nlohmann::json> inventory;
    for (const auto& [id, p] : generated_pairs(train, generated)) {
      inventory.push_back({{"original_id", id}, {"reconstruction_id", p.reconstruction.id}, {"provenance", "generated"}});
    }
    for (const auto& [id, p] : manual_pairs(train)) {
      inventory.push_back({{"original_id", id}, {"reconstruction_id", p.reconstruction.id}, {"provenance", "manual"}});
    }
    write_json_rows(dir(ds) / "pairs.jsonl", inventory);
    summary[ds] = {{"generated", generated.size()}, {"skipped", skipped.size()}, {"pairs", inventory.size()}};
    log("assemble", {{"dataset", ds}, {"summary", summary[ds]}});
  }
  return summary;
}

fs::path Pipeline::run(const RunArgs& args) {
  datasets(args.dataset);
  ExperimentSpec spec;
  spec.strategy = args.strategy;
  spec.shots = args.strategy == Strategy::CotZS ? 0 : args.shots;
  spec.seed = *config_.seed;
  spec.selection = args.selection.value_or(args.strategy == Strategy::FsRand ? Selection::Rand : Selection::Sim);
  if (config_.evaluator_model.empty()) throw Error(ErrorCode::Config, "roles.evaluator is not configured");

  const auto test = read_riddles(dir(args.dataset) / "test.jsonl");
  const auto train = read_riddles(dir(args.dataset) / "train.jsonl");
  std::vector<Riddle> generated;
  PairInventory pairs;
  Explanations explanations;
  ExperimentInputs inputs;
  inputs.train = &train;
  if (args.strategy == Strategy::Riscore) {
    generated = read_riddles(dir(args.dataset) / "generated.jsonl");
    pairs = generated_pairs(train, generated);
    inputs.pairs = &pairs;
  } else if (args.strategy == Strategy::RiscoreM) {
    pairs = manual_pairs(train);
    inputs.pairs = &pairs;
  }
  if (args.strategy == Strategy::CotFS) {
    require_file(config_.explanations, "explanations");
    explanations = nlohmann::json::parse(io::read_text(*config_.explanations)).get<Explanations>();
    inputs.explanations = &explanations;
  }
  EmbeddingLookup embeddings;
  if (spec.selection == Selection::Sim && spec.strategy != Strategy::CotZS) {
    std::vector<Riddle> all = test;
    all.insert(all.end(), train.begin(), train.end());
    all.insert(all.end(), generated.begin(), generated.end());
    embeddings = embed_riddles(all);
    inputs.embeddings = &embeddings;
  }
  validate(spec, inputs);

  const fs::path runs = config_.work_dir / "runs";
  fs::create_directories(runs);
  std::string run_id;
  if (args.resume) {
    run_id = *args.resume;
    if (!fs::exists(runs / run_id)) throw Error(ErrorCode::InvalidArgument, "no run '" + run_id + "' to resume");
  } else {
    // Run directories are append-only: always the next unused id.
    std::size_t n = 1;
    while (fs::exists(runs / run_name(n))) ++n;
    run_id = run_name(n);
  }
  const fs::path run_dir = runs / run_id;
  fs::create_directories(run_dir);
  const nlohmann::json meta = {{"run_id", run_id},
                               {"dataset", args.dataset},
                               {"strategy", std::string(to_string(spec.strategy))},
                               {"shots", spec.shots},
                               {"selection", std::string(to_string(spec.selection))},
                               {"seed", spec.seed},
                               {"model_tag", config_.evaluator_model},
                               {"mock", options_.mock_script.has_value()}};
  io::write_atomic(run_dir / "meta.json", meta.dump(2) + "\n");

  ExperimentOptions eo;
  eo.generator = config_.generator_for(config_.evaluator_model);
  eo.max_in_flight = config_.max_in_flight;
  eo.run_dir = run_dir;
  const auto result = run_experiment(test, spec, inputs, *services().gateway, eo);
  log("run", {{"run_id", run_id}, {"records", result.records.size()}, {"report", to_json(result.report)},
              {"network_calls", network_calls()}});
  return run_dir;
}

std::string Pipeline::report() {
  const fs::path runs = config_.work_dir / "runs";
  std::vector<std::pair<std::string, MetricsReport>> rows;
  nlohmann::json all = nlohmann::json::array();
  if (fs::exists(runs)) {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(runs)) {
      if (e.is_directory() && fs::exists(e.path() / "report.json") && fs::exists(e.path() / "records.jsonl")) {
        dirs.push_back(e.path());
      }
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) {
      if (io::read_jsonl(d / "records.jsonl").empty()) continue;
      const auto meta = nlohmann::json::parse(io::read_text(d / "meta.json"));
      const auto rep = nlohmann::json::parse(io::read_text(d / "report.json"));
      std::string label = meta.value("dataset", std::string()) + " " + meta.value("strategy", std::string());
      if (meta.value("shots", 0) > 0) {
        label += " " + std::to_string(meta.value("shots", 0)) + "-shot " + meta.value("selection", std::string());
      }
      label += " (" + d.filename().string() + ")";
      rows.emplace_back(label, metrics_from_json(rep));
      all.push_back({{"run_id", d.filename().string()}, {"meta", meta}, {"report", rep}});
    }
  }
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "no records");
  const std::string table = format_table(rows);
  io::write_atomic(config_.work_dir / "report.txt", table);
  io::write_atomic(config_.work_dir / "report.json", all.dump(2) + "\n");
  return table;
}

}  // namespace riscore
