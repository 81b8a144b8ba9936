// Acceptance suite: one PASS/FAIL line per criterion. AC10 is a live smoke
// check that only runs when RISCORE_LIVE_CONFIG points at a real config and
// never affects the exit code.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "riscore/assembler.hpp"
#include "riscore/distractor_forge.hpp"
#include "riscore/errors.hpp"
#include "riscore/evaluator.hpp"
#include "riscore/hashing.hpp"
#include "riscore/io.hpp"
#include "riscore/pipeline.hpp"
#include "riscore/prompter.hpp"
#include "riscore/run_config.hpp"
#include "riscore/text.hpp"
#include "test_support.hpp"

using namespace riscore;
namespace fs = std::filesystem;

namespace {

/// Collects failure messages for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 8) failures.push_back(what);
    if (!ok && failures.size() == 8) failures.push_back("...");
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int g_failed = 0;

void report(const std::string& id, const std::string& title, const std::function<void(Check&)>& body,
            double budget_s = 0) {
  Check c;
  const auto start = Clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("unexpected exception: ") + e.what());
  }
  const double took = seconds_since(start);
  if (budget_s > 0 && took >= budget_s) {
    c.failures.push_back("took " + std::to_string(took) + " s, budget " + std::to_string(budget_s) + " s");
  }
  char timing[32];
  std::snprintf(timing, sizeof timing, "%.3f s", took);
  std::cout << id << " " << (c.failures.empty() ? "PASS" : "FAIL") << "  " << title << " (" << timing << ")\n";
  for (const auto& f : c.failures) std::cout << "    - " << f << "\n";
  if (!c.failures.empty()) ++g_failed;
}

bool close(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

// --- AC1 ------------------------------------------------------------------------

std::vector<Riddle> grouped(std::size_t groups) {
  std::vector<Riddle> out;
  for (std::size_t g = 0; g < groups; ++g) {
    for (auto v : {Variant::Original, Variant::Semantic, Variant::Context}) {
      out.push_back(testing::bt("g" + std::to_string(g) + std::string(to_string(v)), "g" + std::to_string(g), v,
                                "question", {"a", "b", "c", "None of the above"}, 0));
    }
  }
  return out;
}

EvalRecord record(const std::string& id, bool correct, bool unparsed = false) {
  EvalRecord r;
  r.riddle_id = id;
  r.correct = correct && !unparsed;
  r.unparsed = unparsed;
  if (!unparsed) r.extracted_index = correct ? 0 : 1;
  return r;
}

void ac1(Check& c) {
  const auto corpus = grouped(2);
  const std::vector<bool> pattern = {true, true, true, true, true, false};
  std::vector<EvalRecord> recs;
  for (std::size_t i = 0; i < corpus.size(); ++i) recs.push_back(record(corpus[i].id, pattern[i]));
  const auto m = score(recs, corpus);
  c.expect(m.per_variant.at(Variant::Original) == 1.0, "original accuracy");
  c.expect(m.per_variant.at(Variant::Semantic) == 1.0, "semantic accuracy");
  c.expect(m.per_variant.at(Variant::Context) == 0.5, "context accuracy");
  c.expect(std::abs(m.average - 0.8333) <= 1e-4 && close(m.average, 2.5 / 3, 1e-9), "average");
  c.expect(m.group_os == 1.0, "group_os");
  c.expect(m.group_osc == 0.5, "group_osc");

  std::mt19937_64 gen(20240601);
  for (int trial = 0; trial < 200; ++trial) {
    const auto corp = grouped(1 + gen() % 8);
    std::vector<EvalRecord> rs;
    for (const auto& r : corp) rs.push_back(record(r.id, gen() % 2, gen() % 7 == 0));
    std::shuffle(rs.begin(), rs.end(), gen);
    const auto got = score(rs, corp);
    const auto want = oracle::brute_force_score(rs, corp);
    const auto tag = "fixture " + std::to_string(trial);
    c.expect(close(got.instance_accuracy, want.instance), tag + " instance");
    c.expect(close(got.per_variant.at(Variant::Original), want.original), tag + " original");
    c.expect(close(got.per_variant.at(Variant::Semantic), want.semantic), tag + " semantic");
    c.expect(close(got.per_variant.at(Variant::Context), want.context), tag + " context");
    c.expect(close(got.average, want.average), tag + " average");
    c.expect(got.group_os && close(*got.group_os, want.os), tag + " os");
    c.expect(got.group_osc && close(*got.group_osc, want.osc), tag + " osc");
  }
}

// --- AC2 ------------------------------------------------------------------------

void ac2(Check& c) {
  std::mt19937_64 gen(77);
  std::size_t ties_seen = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t dim = 1 + gen() % 16, n = 1 + gen() % 64;
    // Small integer components make exact score ties common.
    const int span = trial % 2 ? 1 : 3;
    std::uniform_int_distribution<int> comp(-span, span);
    std::vector<std::pair<std::string, std::vector<double>>> entries;
    VectorIndex index(dim);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(dim);
      do {
        for (auto& x : v) x = comp(gen);
      } while (std::all_of(v.begin(), v.end(), [](double x) { return x == 0; }));
      if (i > 0 && gen() % 5 == 0) v = entries[gen() % i].second;  // duplicate vector, guaranteed tie
      char id[16];
      std::snprintf(id, sizeof id, "e%03zu", static_cast<std::size_t>(gen() % 1000) * 64 + i);
      entries.emplace_back(id, v);
      index.add(id, {v, "m"});
    }
    std::vector<double> q(dim);
    do {
      for (auto& x : q) x = comp(gen);
    } while (std::all_of(q.begin(), q.end(), [](double x) { return x == 0; }));
    std::set<std::string> exclude;
    for (const auto& [id, v] : entries) {
      if (gen() % 8 == 0) exclude.insert(id);
    }
    const std::size_t k = 1 + gen() % (n + 2);
    const auto got = top_k(index, {q, "m"}, k, exclude);
    const auto want = oracle::brute_force_rank(entries, q, k, exclude);
    const auto tag = "index " + std::to_string(trial);
    c.expect(got.size() == want.size(), tag + " size");
    for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) {
      c.expect(got[i].id == want[i].id, tag + " rank " + std::to_string(i));
      c.expect(std::abs(got[i].score - static_cast<double>(want[i].score)) < 1e-12, tag + " score");
      if (i > 0 && std::abs(want[i].score - want[i - 1].score) <= 1e-12L) ++ties_seen;
    }
  }
  c.expect(ties_seen > 100, "too few tie cases exercised");
}

// --- AC3 ------------------------------------------------------------------------

void ac3(Check& c) {
  std::size_t cases = 0;
  for (Source src : {Source::BrainTeaserSP, Source::RiddleSense}) {
    for (std::size_t q = 0; q <= 12; ++q) {
      for (std::size_t a = 0; a <= 12; ++a) {
        const auto question = testing::words(q, "w");
        const auto answer = testing::words(a, "x");
        const bool got = static_cast<bool>(passes_quality_filter(question, answer, src));
        c.expect(got == oracle::filter_oracle(question, answer, src),
                 std::string(to_string(src)) + " q=" + std::to_string(q) + " a=" + std::to_string(a));
        ++cases;
      }
    }
  }
  // The quoted boundaries themselves.
  c.expect(!passes_quality_filter(testing::words(6), "a", Source::BrainTeaserSP), "BT 6-word question kept");
  c.expect(static_cast<bool>(passes_quality_filter(testing::words(7), "a", Source::BrainTeaserSP)),
           "BT 7-word question dropped");
  c.expect(!passes_quality_filter(testing::words(5), "a", Source::RiddleSense), "RS 5-word question kept");
  c.expect(static_cast<bool>(passes_quality_filter(testing::words(6), "a", Source::RiddleSense)),
           "RS 6-word question dropped");
  c.expect(static_cast<bool>(passes_quality_filter(testing::words(6), testing::words(7), Source::RiddleSense)),
           "RS 7-word answer dropped");
  c.expect(!passes_quality_filter(testing::words(6), testing::words(8), Source::RiddleSense), "RS 8-word answer kept");
  c.expect(cases == 2 * 13 * 13, "case count");
}

// --- AC4 ------------------------------------------------------------------------

/// Records every request, answers "[option 1]".
class RecordingBackend final : public ChatBackend {
 public:
  BackendReply send(const ChatRequest& req) override {
    std::lock_guard lock(mutex_);
    users.push_back(req.user);
    return {200, "[option 1]", FinishReason::Stop, {}};
  }
  [[nodiscard]] bool is_remote() const noexcept override { return false; }
  std::vector<std::string> users;

 private:
  std::mutex mutex_;
};

std::string sentence(std::mt19937_64& gen, std::size_t n) {
  static const std::vector<std::string> vocab = {
      "river", "stone", "clock", "shadow", "candle", "mirror", "garden", "window", "ladder", "bridge",
      "whisper", "thunder", "feather", "coin",  "key",    "needle", "mountain", "ocean", "letter", "bottle"};
  std::string s = "What";
  for (std::size_t i = 0; i < n; ++i) s += " " + vocab[gen() % vocab.size()];
  return s + " " + std::to_string(gen() % 100000) + "?";
}

void ac4(Check& c) {
  std::mt19937_64 gen(4);
  const std::vector<std::string> opts = {"one", "two", "three", "four", "five"};
  std::vector<Riddle> train, generated, test;
  for (int i = 0; i < 24; ++i) {
    train.push_back(testing::rs("train-" + std::to_string(i), sentence(gen, 8), opts, 0));
    auto g = testing::rs(generated_id(train.back().id), sentence(gen, 8), opts, 1);
    g.variant = Variant::Generated;
    g.group_id = train.back().id;
    generated.push_back(g);
  }
  for (int i = 0; i < 40; ++i) test.push_back(testing::rs("test-" + std::to_string(i), sentence(gen, 8), opts, 0));

  MockEmbeddingBackend emb(nlohmann::json{{"dim", 64}});
  EmbeddingLookup lookup;
  std::map<std::string, std::string> by_question;
  for (const auto* set : {&train, &generated, &test}) {
    for (const auto& r : *set) {
      lookup[r.id] = {emb.embed({r.question}).front(), "mock"};
      by_question[r.question] = r.id;
    }
  }
  const auto pairs = generated_pairs(train, generated);
  const std::set<std::string> originals = [&] {
    std::set<std::string> s;
    for (const auto& r : train) s.insert(r.id);
    return s;
  }();
  const std::regex riddle_block("Riddle: ```\\n([^\\n]*)\\n```");

  for (std::size_t shots : {2u, 4u, 8u}) {
    for (Selection sel : {Selection::Sim, Selection::Rand}) {
      auto backend = std::make_shared<RecordingBackend>();
      GatewayOptions go;
      go.sleeper = [](std::chrono::milliseconds) {};
      LlmGateway gw(backend, go);
      ExperimentInputs in;
      in.train = &train;
      in.embeddings = &lookup;
      in.pairs = &pairs;
      ExperimentOptions eo;
      eo.generator = testing::test_generator();
      const auto res = run_experiment(test, {Strategy::Riscore, shots, sel, 9}, in, gw, eo);
      const auto tag = std::to_string(shots) + "-shot " + std::string(to_string(sel));
      c.expect(res.records.size() == 40, tag + ": record count");
      c.expect(backend->users.size() == 40, tag + ": prompt count");
      for (const auto& user : backend->users) {
        std::vector<std::string> ids;
        for (auto it = std::sregex_iterator(user.begin(), user.end(), riddle_block); it != std::sregex_iterator(); ++it) {
          const auto found = by_question.find((*it)[1].str());
          ids.push_back(found == by_question.end() ? "?" : found->second);
        }
        c.expect(ids.size() == shots + 1, tag + ": riddle blocks " + std::to_string(ids.size()));
        if (ids.size() != shots + 1) continue;
        c.expect(ids.back().starts_with("test-"), tag + ": test riddle last");
        std::size_t n_orig = 0, n_recon = 0;
        for (std::size_t i = 0; i < shots; ++i) {
          if (i % 2 == 0) {
            const bool ok = originals.count(ids[i]) != 0;
            n_orig += ok;
            c.expect(ok, tag + ": position " + std::to_string(i) + " is not an original");
          } else {
            const bool ok = parent_of_generated(ids[i]) == ids[i - 1];
            n_recon += ok;
            c.expect(ok, tag + ": position " + std::to_string(i) + " is not the reconstruction of its predecessor");
          }
        }
        c.expect(n_orig == shots / 2 && n_recon == shots / 2, tag + ": half originals, half reconstructions");
      }
    }
  }
}

// --- AC5 ------------------------------------------------------------------------

DistractorSet distractors(std::vector<std::string> texts, std::size_t model) {
  DistractorSet s{"p", "", {}};
  for (std::size_t i = 0; i < texts.size(); ++i) {
    s.items.push_back({texts[i], i < model ? DistractorOrigin::ContextRewrite : DistractorOrigin::WordNet, false});
  }
  return s;
}

void ac5(Check& c) {
  const QaPair pair{"A question with plenty of words in it?", "The answer", "p", ReconMode::ZS, "m"};
  QaPair nota = pair;
  nota.answer = "None of the above";
  const auto bt = distractors({"d1", "d2", "d3"}, 3);
  const auto rs = distractors({"m1", "m2", "w1", "w2", "w3"}, 2);
  std::vector<std::size_t> bt_counts(3, 0), rs_counts(5, 0);
  std::size_t nota_last = 0, nota_total = 0;
  for (std::uint64_t seed = 0; seed < 6000; ++seed) {
    const auto r = assemble_riddle(pair, bt, Source::BrainTeaserSP, seed);
    if (r.answer_index < 3 && text::is_nota(r.options[3])) {
      ++bt_counts[r.answer_index];
    } else {
      c.expect(false, "BT answer in NOTA slot for seed " + std::to_string(seed));
    }
    const auto n = assemble_riddle(nota, bt, Source::BrainTeaserSP, seed);
    ++nota_total;
    nota_last += n.answer_index == 3 && text::is_nota(n.options[3]);
    ++rs_counts[assemble_riddle(pair, rs, Source::RiddleSense, seed).answer_index];
  }
  const double chi_bt = oracle::chi_square_uniform(bt_counts);
  const double chi_rs = oracle::chi_square_uniform(rs_counts);
  c.expect(chi_bt < 13.8, "BT chi-square " + std::to_string(chi_bt));
  c.expect(chi_rs < 18.5, "RS chi-square " + std::to_string(chi_rs));
  c.expect(nota_last == nota_total, "NOTA answer not at index 3 in every case");
}

// --- AC6 ------------------------------------------------------------------------

std::size_t answer_occurrences(const Riddle& r, const std::string& answer) {
  std::size_t n = 0;
  for (const auto& o : r.options) n += text::normalize(o) == text::normalize(answer);
  return n;
}

void ac6(Check& c, const Lexicon& lexicon) {
  const auto emb = [] {
    MockEmbeddingBackend b(nlohmann::json{{"dim", 32}});
    EmbeddingLookup out;
    for (auto cat : kAllCategories) out[std::string(to_string(cat))] = {b.embed({std::string(to_string(cat))})[0], "m"};
    return out;
  }();
  const auto base_original = testing::bt("p", "g", Variant::Original,
                                         "A man shaves every day, yet keeps his beard long. Who is he?",
                                         {"A barber", "A wizard", "A sailor", "None of the above"}, 0);
  CounterRng rng(606);
  std::size_t emitted = 0, skipped = 0, adversarial = 0;
  for (int i = 0; i < 1000; ++i) {
    const bool long_style = i % 2 == 0;
    const std::string answer = long_style ? (i % 10 == 0 ? "None of the above" : "A harbor barber") : "tree";
    const auto pick = [&](const std::vector<std::string>& xs) { return xs[rng.below(xs.size())]; };
    nlohmann::json rules = nlohmann::json::array();
    if (long_style) {
      const auto grasper = pick({"- Wrong Answer: Not $1", "- Wrong Answer: $1", "- Wrong Answer: **A HARBOR BARBER.**",
                                 "- Wrong Answer: none of the above!"});
      const auto rewrite = pick({"- Sentence: $1 by the harbor", "- Sentence: a harbor barber", "- Sentence: Same reply",
                                 "- Sentence: $1 by the harbor", "- Sentence: None of the above."});
      adversarial += grasper.find("Not") == std::string::npos || rewrite.find("by the") == std::string::npos;
      rules.push_back({{"system_contains", "concept grasper"}, {"user_regex", "- Correct Answer: ([^\\n]*)"},
                       {"reply", grasper}});
      rules.push_back({{"system_contains", "rewrite the sentence"},
                       {"user_regex", "- Sentence \\(out of context\\): ([^\\n]*)"},
                       {"reply", rewrite}});
    } else {
      const auto reply = pick({"Answer: $1 thing", "Answer: Tree.", "Answer: a tree", "Answer: rock",
                               "Answer: far too many words here", "Answer: $1 thing"});
      adversarial += reply.find("$1") == std::string::npos;
      rules.push_back({{"system_contains", "within the specified category"}, {"user_regex", "Category: (\\w+)"},
                       {"reply", reply}});
    }
    testing::MockGateway gw(nlohmann::json{{"rules", rules}});
    const auto gen = testing::test_generator(static_cast<std::uint64_t>(i));
    const QaPair pair{"I have a beard, but I never shave. What am I?", answer, "p" + std::to_string(i),
                      ReconMode::ZS, "m"};
    struct Fixed : AnswerClassifier {
      Category classify(std::string_view, std::string_view) override { return Category::Nature; }
    } classifier;
    DistractorSet set;
    try {
      if (long_style) {
        set = gen_long_distractors(pair, base_original, *gw, gen);
      } else {
        const std::vector<std::string> originals = {"car", "oak", "rock"};
        set = gen_short_distractors(pair, *gw, gen, classifier, lexicon, emb, originals);
      }
    } catch (const Error& e) {
      c.expect(e.code() == ErrorCode::InsufficientDistractors, std::string("unexpected error ") + e.what());
      ++skipped;
      continue;
    }
    for (const auto& d : set.items) {
      c.expect(text::normalize(d.text) != text::normalize(answer), "distractor equals the answer: " + d.text);
      c.expect(!text::is_nota(d.text), "NOTA emitted as a distractor");
    }
    if (!long_style) c.expect(set.model_generated() >= 2, "short set with fewer than 2 model items emitted");
    try {
      const auto r = assemble_riddle(pair, set, long_style ? Source::BrainTeaserSP : Source::RiddleSense,
                                     derive_seed(1, pair.parent_id));
      c.expect(answer_occurrences(r, answer) == 1, "answer appears more than once in " + r.id);
      if (!long_style) {
        std::size_t model = 0;
        for (const auto& o : r.options) {
          for (const auto& d : set.items) model += d.text == o && d.origin != DistractorOrigin::WordNet;
        }
        c.expect(model >= 2, "assembled riddle carries fewer than 2 model items");
      }
      ++emitted;
    } catch (const Error& e) {
      c.expect(e.code() == ErrorCode::TooFewDistractors, std::string("unexpected assembly error ") + e.what());
      ++skipped;
    }
  }
  c.expect(emitted + skipped == 1000, "set count");
  c.expect(emitted > 100 && skipped > 100, "both emitted and skipped fixtures expected: " + std::to_string(emitted) +
                                               " / " + std::to_string(skipped));
  c.expect(adversarial > 200, "too few adversarial mocks");
}

// --- AC7 ------------------------------------------------------------------------

void ac7(Check& c, const Lexicon& lex) {
  const auto has = [](const std::vector<std::string>& v, const std::string& w) {
    return std::find(v.begin(), v.end(), w) != v.end();
  };
  c.expect(lex.synset_count() == 200, "excerpt should hold 200 synsets");
  c.expect(has(lex.synonyms("car"), "automobile"), "synonyms(car) lacks automobile");
  c.expect(has(lex.hyponyms("tree"), "oak"), "hyponyms(tree) lacks oak");
  c.expect(lex.synonyms("qwertyuiop").empty() && lex.hyponyms("qwertyuiop").empty(), "absent lemma not empty");
  const auto dir = testing::data_dir() / "wordnet_malformed";
  const std::vector<std::tuple<std::string, std::string, ErrorCode>> bad = {
      {"index_bad_count.noun", "data.noun", ErrorCode::MalformedIndexLine},
      {"index_bad_pos.noun", "data.noun", ErrorCode::MalformedIndexLine},
      {"index.noun", "data_truncated.noun", ErrorCode::MalformedDataRecord},
      {"index.noun", "data_dangling.noun", ErrorCode::DanglingPointer}};
  for (const auto& [idx, data, code] : bad) {
    try {
      load_wordnet(dir / idx, dir / data);
      c.expect(false, idx + "/" + data + " loaded without error");
    } catch (const Error& e) {
      c.expect(e.code() == code, idx + "/" + data + ": " + e.what());
    }
  }
}

// --- AC8 ------------------------------------------------------------------------

void ac8(Check& c) {
  const auto fixtures = nlohmann::json::parse(io::read_text(testing::data_dir() / "golden" / "fixtures.json"));
  std::size_t compared = 0;
  for (const std::string size : {"4", "5"}) {
    const auto& fx = fixtures.at(size);
    const auto list = [&](const char* k) {
      std::vector<Riddle> out;
      for (const auto& r : fx.at(k)) out.push_back(riddle_from_json(r));
      return out;
    };
    const auto test = riddle_from_json(fx.at("test"));
    const auto expl = fx.at("explanations").get<Explanations>();
    const std::map<Strategy, std::vector<Riddle>> exemplars = {
        {Strategy::CotZS, {}},           {Strategy::FsRand, list("plain")},      {Strategy::FsSim, list("plain")},
        {Strategy::CotFS, list("plain")}, {Strategy::Riscore, list("riscore")}, {Strategy::RiscoreM, list("riscore_m")}};
    for (const auto& [strategy, ex] : exemplars) {
      const auto bundle = render(strategy, ex.size(), test, ex, expl);
      const auto stem = (testing::data_dir() / "golden" / (std::string(to_string(strategy)) + "_" + size)).string();
      c.expect(bundle.system == io::read_text(stem + ".system.txt"), stem + ".system.txt differs");
      c.expect(bundle.user == io::read_text(stem + ".user.txt"), stem + ".user.txt differs");
      compared += 2;
    }
  }
  c.expect(compared == 24, "expected 24 golden files");
}

// --- AC9 ------------------------------------------------------------------------

void ac9(Check& c) {
  testing::TempDir tmp("riscore-e2e");
  const auto e2e = testing::data_dir() / "e2e";
  std::size_t corpus = 0;
  for (const auto* f : {"brainteaser_train.jsonl", "brainteaser_test.jsonl", "riddlesense_train.jsonl",
                        "riddlesense_test.jsonl"}) {
    corpus += io::read_jsonl(e2e / f).size();
  }
  c.expect(corpus == 30, "corpus should hold 30 riddles, found " + std::to_string(corpus));

  const EnvLookup env = [&](const std::string& name) -> std::optional<std::string> {
    if (name == "RISCORE_WORK") return (tmp.path() / "work").string();
    return std::nullopt;
  };
  auto config = load_run_config(e2e / "config.json", env);
  std::ostringstream log;
  PipelineOptions opts;
  opts.mock_script = nlohmann::json::parse(io::read_text(e2e / "mock.json"));
  opts.log = &log;
  opts.sleeper = [](std::chrono::milliseconds) {};
  Pipeline p(config, opts);
  p.ingest();
  const auto dedup = p.dedup();
  c.expect(dedup.at("removed").size() == 1, "dedup should remove the planted duplicate");
  p.embed();
  p.reconstruct();
  p.distract();
  const auto assembled = p.assemble();
  c.expect(assembled.at("brainteaser").at("generated").get<std::size_t>() >= 2, "too few generated riddles");
  const auto run_dir = p.run(RunArgs{"brainteaser", Strategy::Riscore, 4, std::nullopt, std::nullopt});
  const auto table = p.report();
  c.expect(p.network_calls() == 0, "network calls: " + std::to_string(p.network_calls()));

  const auto rep = metrics_from_json(nlohmann::json::parse(io::read_text(run_dir / "report.json")));
  c.expect(rep.instance_accuracy == 1.0, "instance accuracy");
  c.expect(rep.per_variant.size() == 3, "all three variants scored");
  for (const auto& [v, acc] : rep.per_variant) c.expect(acc == 1.0, std::string(to_string(v)) + " accuracy");
  c.expect(rep.average == 1.0, "average");
  c.expect(rep.group_os == 1.0, "group_os");
  c.expect(rep.group_osc == 1.0, "group_osc");
  c.expect(rep.n.at("total") == 12, "test size");
  c.expect(table.find("riscore 4-shot") != std::string::npos, "report row");
  for (const auto& row : io::read_jsonl(run_dir / "records.jsonl")) {
    c.expect(row.at("exemplar_ids").size() == 4, "record without 4 exemplars");
  }
}

// --- AC10 -----------------------------------------------------------------------

void ac10() {
  const char* cfg = std::getenv("RISCORE_LIVE_CONFIG");
  if (!cfg || !*cfg) {
    std::cout << "AC10 SKIP  live smoke (set RISCORE_LIVE_CONFIG to run; non-gating)\n";
    return;
  }
  const auto start = Clock::now();
  try {
    Pipeline p(load_run_config(cfg));
    p.ingest("brainteaser");
    p.embed();
    p.reconstruct("brainteaser");
    p.distract("brainteaser");
    p.assemble("brainteaser");
    const auto fs_dir = p.run(RunArgs{"brainteaser", Strategy::FsSim, 2, Selection::Sim, std::nullopt});
    const auto rs_dir = p.run(RunArgs{"brainteaser", Strategy::Riscore, 4, Selection::Sim, std::nullopt});
    const auto fs = metrics_from_json(nlohmann::json::parse(io::read_text(fs_dir / "report.json")));
    const auto rs = metrics_from_json(nlohmann::json::parse(io::read_text(rs_dir / "report.json")));
    std::cout << p.report() << "\n";
    std::printf("AC10 INFO  live smoke: riscore 4-shot minus fs-sim 2-shot average = %+.3f over %zu items (%.1f s)\n",
                rs.average - fs.average, rs.n.at("total"), seconds_since(start));
    if (rs.n.at("total") < 40) std::cout << "AC10 INFO  fewer than 40 test items configured\n";
  } catch (const std::exception& e) {
    std::cout << "AC10 INFO  live smoke did not complete: " << e.what() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments restrict the run to the named criteria ("AC3 AC7").
  const std::set<std::string> only(argv + 1, argv + argc);
  const auto wanted = [&](const std::string& id) { return only.empty() || only.count(id) != 0; };

  const auto dir = testing::data_dir() / "wordnet";
  const Lexicon lexicon = load_wordnet(dir / "index.noun", dir / "data.noun");

  int ran = 0;
  const auto run = [&](const std::string& id, const std::string& title, const std::function<void(Check&)>& body,
                       double budget_s = 0) {
    if (!wanted(id)) return;
    ++ran;
    report(id, title, body, budget_s);
  };
  run("AC1", "metric oracle: fixture and 200 randomized scorings", ac1, 1.0);
  run("AC2", "retrieval oracle: 500 random indices vs brute force", ac2, 5.0);
  run("AC3", "quality filter thresholds on boundary lengths", ac3);
  run("AC4", "shot accounting in rendered RISCORE prompts", ac4);
  run("AC5", "assembly answer-position uniformity over 6000 seeds", ac5, 10.0);
  run("AC6", "guaranteed-wrong distractors over 1000 mock sets", [&](Check& c) { ac6(c, lexicon); });
  run("AC7", "WordNet excerpt lookups and malformed inputs", [&](Check& c) { ac7(c, lexicon); });
  run("AC8", "golden prompts for 6 strategies x 2 option counts", ac8);
  run("AC9", "hermetic end-to-end pipeline with oracle mock", ac9, 30.0);
  if (wanted("AC10")) ac10();

  if (ran == 0 && !wanted("AC10")) {
    std::cerr << "no such criterion\n";
    return 2;
  }
  std::cout << (g_failed ? "FAILED " : "PASSED ") << ran - g_failed << "/" << ran << "\n";
  return g_failed ? 1 : 0;
}
