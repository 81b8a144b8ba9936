#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <semaphore>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "riscore/retry.hpp"

namespace riscore {

inline constexpr double kDefaultTemperature = 0.5;
inline constexpr double kPenalizedRepetition = 1.15;
inline constexpr double kPlainRepetition = 1.0;

struct GenerationParams {
  double temperature = kDefaultTemperature;
  double repetition_penalty = kPlainRepetition;
  int max_tokens = 512;
  std::optional<std::uint64_t> seed;

  void validate() const;
};

struct ChatRequest {
  std::string system;
  std::string user;
  GenerationParams params;
  std::string model_tag;

  void validate() const;
};

/// Model plus generation parameters used by one pipeline stage.
struct GeneratorConfig {
  std::string model_tag;
  GenerationParams params;

  [[nodiscard]] ChatRequest request(std::string system, std::string user) const {
    return ChatRequest{std::move(system), std::move(user), params, model_tag};
  }
};

/// Canonical JSON of every field that determines a reply.
nlohmann::json canonical_json(const ChatRequest& req);

/// SHA-256 of canonical_json; the response-cache key and the mock "hash" selector.
std::string request_hash(const ChatRequest& req);

enum class FinishReason { Stop, Length, Error };

struct ChatResponse {
  std::string text;
  FinishReason finish_reason = FinishReason::Stop;
  std::uint64_t latency_ms = 0;
  int retries = 0;
  bool from_cache = false;
};

struct ModelConfig {
  bool penalized = false;
  int max_tokens = 512;
};

/// Generation defaults per model tag: temperature 0.5 everywhere, repetition
/// penalty 1.15 for tags configured as penalized and 1.0 otherwise.
class ModelRegistry {
 public:
  ModelRegistry() = default;
  explicit ModelRegistry(std::map<std::string, ModelConfig> models) : models_(std::move(models)) {}

  void add(std::string tag, ModelConfig cfg) { models_[std::move(tag)] = cfg; }
  [[nodiscard]] bool knows(const std::string& tag) const { return models_.count(tag) != 0; }

  /// Throws UnknownModelTag.
  [[nodiscard]] GenerationParams default_params(const std::string& model_tag) const;

 private:
  std::map<std::string, ModelConfig> models_;
};

/// What a backend produced for one attempt. status follows HTTP semantics
/// (200 success, 0 transport failure).
struct BackendReply {
  int status = 200;
  std::string text;
  FinishReason finish_reason = FinishReason::Stop;
  std::string error;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual BackendReply send(const ChatRequest& req) = 0;
  /// True when send() crosses the network.
  [[nodiscard]] virtual bool is_remote() const noexcept = 0;
};

/// OpenAI-compatible `POST {base}/chat/completions` client.
class HttpChatBackend final : public ChatBackend {
 public:
  HttpChatBackend(std::string base_url, std::string api_key, int timeout_s = 120);
  BackendReply send(const ChatRequest& req) override;
  [[nodiscard]] bool is_remote() const noexcept override { return true; }

  static nlohmann::json request_body(const ChatRequest& req);
  static BackendReply parse_body(const std::string& body);

 private:
  std::string base_url_;
  std::string api_key_;
  int timeout_s_;
};

/// Scripted offline backend. Rules are tried in order; a rule matches when all
/// of its selectors match. A matching `user_regex` lets the reply reference
/// capture groups ($1, $2, ...). `fail_times` makes the first N matches return
/// `fail_status` (default 500) for fault injection.
///
///   {"rules": [
///      {"hash": "<request_hash>", "reply": "[option 2]"},
///      {"user_regex": "Question: ```(.*)```", "system_contains": "context reconstruction",
///       "reply": "Question: $1\nCorrect answer: x", "fail_times": 0, "finish_reason": "stop"}],
///    "fallback": "[option 1]"}
class MockChatBackend final : public ChatBackend {
 public:
  explicit MockChatBackend(const nlohmann::json& script);
  BackendReply send(const ChatRequest& req) override;
  [[nodiscard]] bool is_remote() const noexcept override { return false; }
  [[nodiscard]] std::size_t calls() const noexcept { return calls_.load(); }

 private:
  struct Rule {
    std::optional<std::string> hash;
    std::optional<std::regex> user_regex;
    std::optional<std::regex> system_regex;
    std::optional<std::string> user_contains;
    std::optional<std::string> system_contains;
    std::string reply;
    FinishReason finish_reason = FinishReason::Stop;
    int fail_times = 0;
    int fail_status = 500;
    int seen = 0;
  };
  std::vector<Rule> rules_;
  std::optional<std::string> fallback_;
  std::mutex mutex_;
  std::atomic<std::size_t> calls_{0};
};

struct GatewayOptions {
  RetryPolicy retry;
  std::size_t max_in_flight = 4;
  std::optional<std::filesystem::path> cache_dir;
  Sleeper sleeper = real_sleeper();
  std::uint64_t jitter_seed = 0;
};

struct GatewayStats {
  std::size_t requests = 0;
  std::size_t cache_hits = 0;
  std::size_t backend_calls = 0;
  std::size_t network_calls = 0;
  std::size_t retries = 0;
};

/// Thread-safe chat client: response cache, bounded in-flight requests and
/// exponential-backoff retries over any ChatBackend.
class LlmGateway {
 public:
  LlmGateway(std::shared_ptr<ChatBackend> backend, GatewayOptions options = {});

  /// Throws EndpointUnavailable (retries exhausted), AuthFailure,
  /// RequestRejected or ResponseTruncated.
  ChatResponse complete(const ChatRequest& req);

  [[nodiscard]] GatewayStats stats() const;

 private:
  std::optional<ChatResponse> cached(const std::string& key);
  void remember(const std::string& key, const ChatResponse& resp);
  std::shared_ptr<std::mutex> key_mutex(const std::string& key);

  std::shared_ptr<ChatBackend> backend_;
  GatewayOptions options_;
  std::counting_semaphore<> in_flight_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, ChatResponse> memory_;
  std::unordered_map<std::string, std::shared_ptr<std::mutex>> key_locks_;
  GatewayStats stats_;
  std::uint64_t jitter_stream_ = 0;
};

}  // namespace riscore
