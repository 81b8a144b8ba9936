#include <doctest.h>

#include "riscore/errors.hpp"
#include "riscore/reconstructor.hpp"
#include "test_support.hpp"

using namespace riscore;
using riscore::testing::MockGateway;
using riscore::testing::test_generator;

namespace {

Riddle barber() {
  return testing::bt("p1", "g1", Variant::Original, "A man shaves every day, yet keeps his beard long. Who is he?",
                     {"A barber", "A wizard", "A sailor", "None of the above"}, 0);
}

nlohmann::json harbor_script() {
  return {{"rules",
           {{{"system_contains", "context reconstruction"},
             {"user_regex", "Question: ```([^`]*)```\\s*Correct answer: ```([^`]*)```\\s*$"},
             {"reply", "Question: In a busy harbor town, $1\nCorrect answer: $2 (harbor edition)"}}}}};
}

}  // namespace

TEST_CASE("parse_qa_response handles label variants and emphasis") {
  auto p = parse_qa_response("Question: Who shaves? \nCorrect answer: A barber");
  REQUIRE(p);
  CHECK(p->question == "Who shaves?");
  CHECK(p->answer == "A barber");

  p = parse_qa_response("**New Question:** ```Who cuts hair?```\n\n**New Correct Answer:** \"A hairdresser\"");
  REQUIRE(p);
  CHECK(p->question == "Who cuts hair?");
  CHECK(p->answer == "A hairdresser");

  // The last occurrence wins when the model restates the original first.
  p = parse_qa_response("Question: old\nAnswer: old answer\n\nQuestion: new one\nAnswer: new answer");
  REQUIRE(p);
  CHECK(p->question == "new one");
  CHECK(p->answer == "new answer");

  CHECK_FALSE(parse_qa_response("Just a sentence."));
  CHECK_FALSE(parse_qa_response("Question: something"));
  CHECK_FALSE(parse_qa_response("Question: \nAnswer: x"));
}

TEST_CASE("prompt rendering: ZS and FS") {
  const auto g = test_generator();
  const auto zs = render_reconstruction_prompt(barber(), "A barber", ReconMode::ZS, {}, g);
  CHECK(zs.system.find("expert in context reconstruction") != std::string::npos);
  CHECK(zs.user ==
        "Question: ```A man shaves every day, yet keeps his beard long. Who is he?```\n\nCorrect answer: ```A barber```");

  const auto shots = load_fewshot_pairs(testing::data_dir() / "fixtures" / "fewshot_pairs.jsonl");
  REQUIRE(shots.size() == 2);
  CHECK(shots[0].reconstruction.answer == "A hairdresser.");
  const auto fs = render_reconstruction_prompt(barber(), "A barber", ReconMode::FS, shots, g);
  CHECK(fs.user.find("Example 1:") != std::string::npos);
  CHECK(fs.user.find("Example 2:") != std::string::npos);
  CHECK(fs.user.find("A woman styles hair") != std::string::npos);
  CHECK(fs.user.ends_with("Correct answer: ```A barber```"));

  CHECK_THROWS_AS(render_reconstruction_prompt(barber(), "A barber", ReconMode::FS, {}, g), Error);
  try {
    render_reconstruction_prompt(shots[0].original, "A barber.", ReconMode::FS, shots, g);
    FAIL("expected ExemplarOverlap");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ExemplarOverlap);
  }
}

TEST_CASE("reconstruct_batch accepts, filters and keeps input order") {
  MockGateway gw(harbor_script());
  auto p2 = barber();
  p2.id = "p2";
  p2.question = "What has keys but cannot open a single lock anywhere?";
  p2.options = {"A piano", "A janitor", "A locksmith", "None of the above"};
  const auto rep = reconstruct_batch({barber(), p2}, ReconMode::ZS, *gw, test_generator(), Source::BrainTeaserSP);
  CHECK(rep.attempted == 2);
  REQUIRE(rep.accepted.size() == 2);
  CHECK(rep.accepted[0].parent_id == "p1");
  CHECK(rep.accepted[1].parent_id == "p2");
  CHECK(rep.accepted[0].question.starts_with("In a busy harbor town, A man shaves"));
  CHECK(rep.accepted[0].answer == "A barber (harbor edition)");
  CHECK(rep.accepted[0].generator_tag == "mock-model");
  CHECK(rep.rejected.empty());
}

TEST_CASE("reconstruct_batch rejection reasons") {
  const auto g = test_generator();
  SUBCASE("unparseable after retries, one call per attempt") {
    MockGateway gw(nlohmann::json{{"fallback", "I cannot do that."}});
    const auto rep = reconstruct_batch({barber()}, ReconMode::ZS, *gw, g, Source::BrainTeaserSP);
    REQUIRE(rep.rejected.size() == 1);
    CHECK(rep.rejected[0].reason == "Unparseable");
    CHECK(gw.backend->calls() == 3);
  }
  SUBCASE("echo of the original is not distinct") {
    MockGateway gw(nlohmann::json{
        {"fallback", "Question: A man shaves every day, yet keeps his beard long. Who is he?\nAnswer: A cook"}});
    const auto rep = reconstruct_batch({barber()}, ReconMode::ZS, *gw, g, Source::BrainTeaserSP);
    REQUIRE(rep.rejected.size() == 1);
    CHECK(rep.rejected[0].reason == "not-distinct");
  }
  SUBCASE("quality filter") {
    MockGateway gw(nlohmann::json{{"fallback", "Question: Too short?\nAnswer: A cook"}});
    const auto rep = reconstruct_batch({barber()}, ReconMode::ZS, *gw, g, Source::BrainTeaserSP);
    REQUIRE(rep.rejected.size() == 1);
    CHECK(rep.rejected[0].reason == "question-too-short");
  }
  SUBCASE("gateway failure rejects the item and the batch continues") {
    nlohmann::json script = harbor_script();
    script["rules"].insert(script["rules"].begin(),
                           nlohmann::json::object(
                               {{"user_contains", "keys"}, {"reply", "x"}, {"fail_times", 99}, {"fail_status", 401}}));
    MockGateway gw(script);
    auto p2 = barber();
    p2.id = "p2";
    p2.question = "What has keys but cannot open a single lock anywhere?";
    const auto rep = reconstruct_batch({p2, barber()}, ReconMode::ZS, *gw, g, Source::BrainTeaserSP);
    REQUIRE(rep.rejected.size() == 1);
    CHECK(rep.rejected[0].reason.starts_with("AuthFailure"));
    CHECK(rep.accepted.size() == 1);
  }
}

TEST_CASE("qa pair JSON round trip") {
  const QaPair p{"q", "a", "parent", ReconMode::FS, "m"};
  const auto back = qa_pair_from_json(to_json(p));
  CHECK(back.question == "q");
  CHECK(back.mode == ReconMode::FS);
  CHECK(back.parent_id == "parent");
  CHECK(parse_recon_mode("zs") == ReconMode::ZS);
  CHECK_FALSE(parse_recon_mode("xx"));
}
