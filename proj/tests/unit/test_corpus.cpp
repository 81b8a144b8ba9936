#include <doctest.h>

#include <fstream>

#include "oracles.hpp"
#include "riscore/corpus.hpp"
#include "riscore/errors.hpp"
#include "riscore/text.hpp"
#include "test_support.hpp"

using namespace riscore;
using riscore::testing::TempDir;

namespace {

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p);
  for (const auto& l : lines) out << l << "\n";
}

std::string bt_line(const std::string& id, const std::string& group, const std::string& variant, std::size_t answer = 0,
                    const std::string& extra_option = "None of the above") {
  nlohmann::json j = {{"id", id},
                      {"group_id", group},
                      {"variant", variant},
                      {"question", "A man shaves every day, yet keeps his beard long."},
                      {"options", {"A barber", "A wizard", "A sailor", extra_option}},
                      {"answer_index", answer},
                      {"source", "brainteaser_sp"}};
  return j.dump();
}

}  // namespace

TEST_CASE("word_count counts whitespace tokens") {
  CHECK(text::word_count("A man shaves every day, yet keeps his beard long") == 10);
  CHECK(text::word_count("") == 0);
  CHECK(text::word_count("What am I?") == 3);
  CHECK(text::word_count("  spaced \t out\nwords ") == 3);
}

TEST_CASE("normalize and NOTA detection") {
  CHECK(text::normalize("  None of the Above. ") == "none of the above");
  CHECK(text::normalize("Why?!") == "why");
  CHECK(text::is_nota("none of the above!"));
  CHECK_FALSE(text::is_nota("none of these"));
}

TEST_CASE("quality filter examples") {
  CHECK(passes_quality_filter("A man shaves every day, yet keeps his beard long", "A barber", Source::BrainTeaserSP));
  auto v = passes_quality_filter("one two three four five", "x", Source::RiddleSense);
  CHECK_FALSE(v);
  CHECK(v.reason == "question-too-short");
  v = passes_quality_filter(riscore::testing::words(8), riscore::testing::words(8), Source::RiddleSense);
  CHECK_FALSE(v);
  CHECK(v.reason == "answer-too-long");
}

TEST_CASE("quality filter agrees with the oracle on every boundary length") {
  for (Source src : {Source::BrainTeaserSP, Source::RiddleSense}) {
    for (std::size_t q = 0; q <= 10; ++q) {
      for (std::size_t a = 0; a <= 10; ++a) {
        const auto question = riscore::testing::words(q, "q");
        const auto answer = riscore::testing::words(a, "a");
        CHECK(static_cast<bool>(passes_quality_filter(question, answer, src)) ==
              oracle::filter_oracle(question, answer, src));
      }
    }
  }
}

TEST_CASE("check_invariants rules") {
  auto r = riscore::testing::bt("x", "g", Variant::Original, "q", {"a", "b", "c", "None of the above"}, 0);
  CHECK_FALSE(check_invariants(r));
  r.answer_index = 4;
  CHECK(check_invariants(r) == "answer-index-out-of-range");
  r.answer_index = 0;
  r.options = {"a", "A.", "c", "None of the above"};
  CHECK(check_invariants(r) == "duplicate-options");
  r.options = {"a", "None of the above", "c", "d"};
  CHECK(check_invariants(r) == "nota-not-last");
  r.options = {"a", "b", "c", "None of the above"};
  r.group_id.reset();
  CHECK(check_invariants(r) == "missing-group");
  auto s = riscore::testing::rs("y", "q", {"a", "b", "c", "d"}, 0);
  CHECK(check_invariants(s) == "option-count");
}

TEST_CASE("load_corpus reports rejects and keeps file order") {
  TempDir tmp;
  const auto p = tmp.path() / "bt.jsonl";
  write_lines(p, {bt_line("1", "g1", "original"), "", "{not json", bt_line("2", "g1", "semantic", 5),
                  bt_line("3", "g1", "semantic"), bt_line("3", "g1", "context"), bt_line("4", "g1", "semantic"),
                  bt_line("5", "g1", "context")});
  const auto res = load_corpus(p, Source::BrainTeaserSP);
  REQUIRE(res.riddles.size() == 3);
  CHECK(res.riddles[0].id == "1");
  CHECK(res.riddles[1].id == "3");
  CHECK(res.riddles[2].id == "5");
  REQUIRE(res.rejects.size() == 4);
  CHECK(res.rejects[0].line == 3);
  CHECK(res.rejects[0].reason.starts_with("MalformedLine"));
  CHECK(res.rejects[1].reason == "InvariantViolation: answer-index-out-of-range");
  CHECK(res.rejects[2].reason == "InvariantViolation: duplicate-id");
  CHECK(res.rejects[3].reason == "InvariantViolation: duplicate-variant-in-group");
  CHECK(complete_groups(res.riddles) == std::vector<std::string>{"g1"});
}

TEST_CASE("load_corpus: empty file, missing file, source mismatch") {
  TempDir tmp;
  write_lines(tmp.path() / "empty.jsonl", {});
  const auto empty = load_corpus(tmp.path() / "empty.jsonl", Source::RiddleSense);
  CHECK(empty.riddles.empty());
  CHECK(empty.rejects.empty());
  CHECK_THROWS_AS(load_corpus(tmp.path() / "nope.jsonl", Source::RiddleSense), Error);
  write_lines(tmp.path() / "bt.jsonl", {bt_line("1", "g", "original")});
  const auto mismatch = load_corpus(tmp.path() / "bt.jsonl", Source::RiddleSense);
  REQUIRE(mismatch.rejects.size() == 1);
  CHECK(mismatch.rejects[0].reason == "InvariantViolation: source-mismatch");
}

TEST_CASE("120 lines in 40 groups of three load as 40 complete groups") {
  TempDir tmp;
  std::vector<std::string> lines;
  for (int g = 0; g < 40; ++g) {
    for (const char* v : {"original", "semantic", "context"}) {
      lines.push_back(bt_line("r" + std::to_string(g) + v, "g" + std::to_string(g), v));
    }
  }
  write_lines(tmp.path() / "bt.jsonl", lines);
  const auto res = load_corpus(tmp.path() / "bt.jsonl", Source::BrainTeaserSP);
  CHECK(res.riddles.size() == 120);
  const auto stats = compute_stats(res.riddles);
  CHECK(stats.groups_complete == 40);
  CHECK(stats.per_variant.at(Variant::Original) == 40);
  CHECK(stats.per_variant.at(Variant::Semantic) == stats.per_variant.at(Variant::Context));
}

TEST_CASE("riddle JSON round trip") {
  const auto r = riscore::testing::bt("x", "g", Variant::Context, "q?", {"a", "b", "c", "None of the above"}, 2);
  const auto back = riddle_from_json(to_json(r));
  CHECK(back.id == r.id);
  CHECK(back.group_id == r.group_id);
  CHECK(back.variant == r.variant);
  CHECK(back.options == r.options);
  CHECK(back.answer_index == 2);
  CHECK(back.source == Source::BrainTeaserSP);
}

TEST_CASE("deduplicate_against removes at or above the threshold") {
  const auto mk = [](std::vector<double> v) { return EmbeddingVector{std::move(v), "m"}; };
  std::vector<Riddle> prio = {riscore::testing::rs("p", "priority", {"a", "b", "c", "d", "e"}, 0)};
  std::vector<Riddle> cand = {riscore::testing::rs("c95", "x", {"a", "b", "c", "d", "e"}, 0),
                              riscore::testing::rs("c90", "y", {"a", "b", "c", "d", "e"}, 0),
                              riscore::testing::rs("c50", "z", {"a", "b", "c", "d", "e"}, 0)};
  EmbeddingLookup lookup = {{"p", mk({1, 0, 0, 0, 0})},
                            {"c95", mk({19, 5, 3, 2, 1})},
                            {"c90", mk({9, 3, 3, 1, 0})},
                            {"c50", mk({1, 1, 1, 1, 0})}};
  CHECK(cosine(lookup.at("p"), lookup.at("c95")) == doctest::Approx(0.95).epsilon(1e-15));
  CHECK(cosine(lookup.at("p"), lookup.at("c90")) == 0.9);
  const auto res = deduplicate_against(prio, cand, lookup, 0.9);
  REQUIRE(res.removed.size() == 2);
  CHECK(res.removed[0].riddle.id == "c95");
  CHECK(res.removed[1].riddle.id == "c90");
  CHECK(res.removed[0].nearest_id == "p");
  REQUIRE(res.retained.size() == 1);
  CHECK(res.retained[0].id == "c50");

  // Idempotent: deduplicating the retained set again changes nothing.
  const auto again = deduplicate_against(prio, res.retained, lookup, 0.9);
  CHECK(again.removed.empty());
  CHECK(again.retained.size() == 1);

  lookup.erase("c50");
  CHECK_THROWS_AS(deduplicate_against(prio, cand, lookup, 0.9), Error);
  CHECK_THROWS_AS(deduplicate_against(prio, {}, lookup, 0.0), Error);
}
