#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "riscore/corpus.hpp"
#include "riscore/llm_gateway.hpp"

#ifndef RISCORE_TEST_DATA_DIR
#error "RISCORE_TEST_DATA_DIR must be defined"
#endif

namespace riscore::testing {

inline std::filesystem::path data_dir() { return RISCORE_TEST_DATA_DIR; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "riscore") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline Riddle bt(std::string id, std::string group, Variant v, std::string q, std::vector<std::string> opts,
                 std::size_t answer) {
  return Riddle{std::move(id), std::move(group), v, std::move(q), std::move(opts), answer, Source::BrainTeaserSP};
}

inline Riddle rs(std::string id, std::string q, std::vector<std::string> opts, std::size_t answer) {
  return Riddle{std::move(id), std::nullopt, std::nullopt, std::move(q), std::move(opts), answer, Source::RiddleSense};
}

/// Gateway over a mock script that never sleeps between retries.
struct MockGateway {
  std::shared_ptr<MockChatBackend> backend;
  std::unique_ptr<LlmGateway> gateway;

  explicit MockGateway(const nlohmann::json& script, std::size_t in_flight = 4) {
    backend = std::make_shared<MockChatBackend>(script);
    GatewayOptions o;
    o.max_in_flight = in_flight;
    o.sleeper = [](std::chrono::milliseconds) {};
    gateway = std::make_unique<LlmGateway>(backend, o);
  }
  LlmGateway& operator*() { return *gateway; }
  LlmGateway* operator->() { return gateway.get(); }
};

inline GeneratorConfig test_generator(std::uint64_t seed = 7) {
  GeneratorConfig g{"mock-model", {}};
  g.params.seed = seed;
  return g;
}

/// n whitespace-separated words.
inline std::string words(std::size_t n, const std::string& w = "word") {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + w + std::to_string(i);
  return s;
}

}  // namespace riscore::testing
