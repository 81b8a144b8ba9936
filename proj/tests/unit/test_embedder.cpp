#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "riscore/embedder.hpp"
#include "riscore/errors.hpp"
#include "test_support.hpp"

using namespace riscore;

namespace {
EmbeddingVector ev(std::vector<double> v) { return {std::move(v), "m"}; }
}  // namespace

TEST_CASE("cosine: exact values and errors") {
  CHECK(cosine(ev({1, 2, 2}), ev({2, 1, 2})) == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK(cosine(ev({1, 0}), ev({1, 0})) == 1.0);
  CHECK(cosine(ev({1, 0}), ev({-1, 0})) == -1.0);
  CHECK(cosine(ev({1, 0}), ev({0, 3})) == 0.0);
  // Symmetric and scale invariant.
  CHECK(cosine(ev({3, 1, 4}), ev({1, 5, 9})) == doctest::Approx(cosine(ev({1, 5, 9}), ev({6, 2, 8}))));
  CHECK_THROWS_AS(cosine(ev({1, 0}), ev({1, 0, 0})), Error);
  try {
    cosine(ev({0, 0}), ev({1, 0}));
    FAIL("expected ZeroVector");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroVector);
  }
}

TEST_CASE("top_k agrees with a brute-force ranking") {
  std::mt19937_64 gen(42);
  std::uniform_int_distribution<int> small(-2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 1 + gen() % 6, n = 1 + gen() % 30;
    VectorIndex index(dim);
    std::vector<std::pair<std::string, std::vector<double>>> raw;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(dim);
      do {
        for (auto& x : v) x = small(gen);
      } while (std::all_of(v.begin(), v.end(), [](double x) { return x == 0; }));
      const auto id = "id" + std::to_string(gen() % 1000) + "_" + std::to_string(i);
      raw.emplace_back(id, v);
      index.add(id, ev(v));
    }
    std::vector<double> q(dim, 0);
    q[0] = 1;
    std::set<std::string> exclude;
    if (n > 2) exclude.insert(raw[1].first);
    const std::size_t k = 1 + gen() % 8;
    const auto got = top_k(index, ev(q), k, exclude);
    const auto want = oracle::brute_force_rank(raw, q, k, exclude);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].id == want[i].id);
      CHECK(std::abs(got[i].score - static_cast<double>(want[i].score)) < 1e-12);
    }
  }
}

TEST_CASE("top_k errors and exhaustion") {
  VectorIndex index(2);
  index.add("a", ev({1, 0}));
  index.add("b", ev({0, 1}));
  CHECK_THROWS_AS(index.add("a", ev({1, 1})), Error);
  CHECK_THROWS_AS(index.add("z", ev({0, 0})), Error);
  CHECK_THROWS_AS(index.add("c", ev({1, 0, 0})), Error);
  CHECK(top_k(index, ev({1, 1}), 5).size() == 2);
  CHECK(top_k(index, ev({1, 0}), 5, {"a", "b"}).empty());
  // Ties break by ascending id.
  const auto tie = top_k(index, ev({1, 1}), 2);
  CHECK(tie[0].id == "a");
  CHECK(tie[1].id == "b");
  CHECK_THROWS_AS(top_k(index, ev({1, 0}), 0), Error);
  CHECK_THROWS_AS(top_k(index, ev({0, 0}), 1), Error);
  CHECK_THROWS_AS((void)index.at("missing"), Error);
}

TEST_CASE("mock embedding backend is deterministic and honours fixed vectors") {
  MockEmbeddingBackend backend({{"model", "mock-embed"}, {"dim", 16}, {"vectors", {{"pinned", {1.0, 2.0}}}}});
  const auto a = backend.embed({"the cat sat", "the cat sat", "pinned"});
  CHECK(a[0] == a[1]);
  CHECK(a[0].size() == 16);
  CHECK(a[2] == std::vector<double>{1.0, 2.0});
  CHECK(backend.model_tag() == "mock-embed");
  CHECK(backend.network_calls() == 0);
}

TEST_CASE("embedder caches in memory and on disk") {
  testing::TempDir tmp;
  auto backend = std::make_shared<MockEmbeddingBackend>(nlohmann::json{{"model", "m"}, {"dim", 8}});
  {
    Embedder e(backend, {tmp.path(), 2, 2});
    const auto first = e.embed_batch({"one", "two", "three", "one"});
    CHECK(first.size() == 4);
    CHECK(first[0].values == first[3].values);
    const auto calls = backend->calls();
    e.embed_batch({"one", "two", "three"});
    CHECK(backend->calls() == calls);
    CHECK(e.cache_hits() >= 3);
    CHECK_THROWS_AS(e.embed_batch({}), Error);
  }
  // A fresh embedder over the same cache dir never calls the backend.
  const auto before = backend->calls();
  Embedder again(backend, {tmp.path(), 32, 1});
  const auto v = again.embed("two");
  CHECK(v.dim() == 8);
  CHECK(backend->calls() == before);
  CHECK(again.cache_key("x") != again.cache_key("y"));
}

TEST_CASE("parallel vectors tie and fall back to id order") {
  VectorIndex index(2);
  index.add("c", ev({1, 1}));
  index.add("b", ev({3, 3}));
  index.add("a", ev({7, 7}));
  index.add("d", ev({0.1, 0.3}));
  const auto got = top_k(index, ev({0.3, 0.3}), 4);
  REQUIRE(got.size() == 4);
  CHECK(got[0].id == "a");
  CHECK(got[1].id == "b");
  CHECK(got[2].id == "c");
  CHECK(got[3].id == "d");
}
