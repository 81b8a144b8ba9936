#include "riscore/llm_gateway.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "http_util.hpp"
#include "riscore/errors.hpp"
#include "riscore/hashing.hpp"
#include "riscore/io.hpp"

namespace riscore {

namespace {

std::string_view finish_name(FinishReason f) {
  switch (f) {
    case FinishReason::Stop: return "stop";
    case FinishReason::Length: return "length";
    case FinishReason::Error: return "error";
  }
  return "error";
}

FinishReason parse_finish(std::string_view s) {
  if (s == "length") return FinishReason::Length;
  if (s == "stop" || s.empty()) return FinishReason::Stop;
  return FinishReason::Error;
}

}  // namespace

void GenerationParams::validate() const {
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) throw Error(ErrorCode::InvalidArgument, "temperature < 0");
  if (!(repetition_penalty > 0.0)) throw Error(ErrorCode::InvalidArgument, "repetition_penalty <= 0");
  if (max_tokens <= 0) throw Error(ErrorCode::InvalidArgument, "max_tokens <= 0");
}

void ChatRequest::validate() const {
  if (system.empty()) throw Error(ErrorCode::InvalidArgument, "empty system prompt");
  if (user.empty()) throw Error(ErrorCode::InvalidArgument, "empty user prompt");
  params.validate();
}

nlohmann::json canonical_json(const ChatRequest& req) {
  // nlohmann::json objects keep keys sorted, so dump() is canonical.
  nlohmann::json params = {{"temperature", req.params.temperature},
                           {"repetition_penalty", req.params.repetition_penalty},
                           {"max_tokens", req.params.max_tokens},
                           {"seed", req.params.seed ? nlohmann::json(*req.params.seed) : nlohmann::json(nullptr)}};
  return {{"model_tag", req.model_tag}, {"system", req.system}, {"user", req.user}, {"params", params}};
}

std::string request_hash(const ChatRequest& req) { return sha256_hex(canonical_json(req).dump()); }

GenerationParams ModelRegistry::default_params(const std::string& model_tag) const {
  auto it = models_.find(model_tag);
  if (it == models_.end()) throw Error(ErrorCode::UnknownModelTag, model_tag);
  GenerationParams p;
  p.temperature = kDefaultTemperature;
  p.repetition_penalty = it->second.penalized ? kPenalizedRepetition : kPlainRepetition;
  p.max_tokens = it->second.max_tokens;
  return p;
}

// --- HTTP backend ------------------------------------------------------------

HttpChatBackend::HttpChatBackend(std::string base_url, std::string api_key, int timeout_s)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), timeout_s_(timeout_s) {}

nlohmann::json HttpChatBackend::request_body(const ChatRequest& req) {
  nlohmann::json body = {
      {"model", req.model_tag},
      {"messages", nlohmann::json::array({{{"role", "system"}, {"content", req.system}},
                                          {{"role", "user"}, {"content", req.user}}})},
      {"temperature", req.params.temperature},
      {"max_tokens", req.params.max_tokens},
      {"repetition_penalty", req.params.repetition_penalty},
  };
  if (req.params.seed) body["seed"] = *req.params.seed;
  return body;
}

BackendReply HttpChatBackend::parse_body(const std::string& body) {
  BackendReply reply;
  try {
    const auto j = nlohmann::json::parse(body);
    const auto& choice = j.at("choices").at(0);
    const auto& content = choice.at("message").at("content");
    reply.text = content.is_null() ? std::string() : content.get<std::string>();
    reply.finish_reason =
        parse_finish(choice.contains("finish_reason") && choice["finish_reason"].is_string()
                         ? choice["finish_reason"].get<std::string>()
                         : std::string("stop"));
  } catch (const nlohmann::json::exception& e) {
    reply.status = 502;
    reply.error = std::string("bad completion payload: ") + e.what();
  }
  return reply;
}

BackendReply HttpChatBackend::send(const ChatRequest& req) {
  std::map<std::string, std::string> headers;
  if (!api_key_.empty()) headers["Authorization"] = "Bearer " + api_key_;
  const auto res = detail::post_json(base_url_, "/chat/completions", request_body(req).dump(), headers, timeout_s_);
  if (res.status != 200) {
    BackendReply r;
    r.status = res.status;
    r.error = res.transport_error.empty() ? res.body.substr(0, 300) : res.transport_error;
    return r;
  }
  return parse_body(res.body);
}

// --- mock backend --------------------------------------------------------------

MockChatBackend::MockChatBackend(const nlohmann::json& script) {
  try {
    if (script.contains("rules")) {
      for (const auto& j : script.at("rules")) {
        Rule r;
        if (j.contains("hash")) r.hash = j["hash"].get<std::string>();
        if (j.contains("user_regex")) r.user_regex.emplace(j["user_regex"].get<std::string>());
        if (j.contains("system_regex")) r.system_regex.emplace(j["system_regex"].get<std::string>());
        if (j.contains("user_contains")) r.user_contains = j["user_contains"].get<std::string>();
        if (j.contains("system_contains")) r.system_contains = j["system_contains"].get<std::string>();
        r.reply = j.value("reply", std::string());
        r.finish_reason = parse_finish(j.value("finish_reason", std::string("stop")));
        r.fail_times = j.value("fail_times", 0);
        r.fail_status = j.value("fail_status", 500);
        rules_.push_back(std::move(r));
      }
    }
    if (script.contains("fallback") && !script["fallback"].is_null()) fallback_ = script["fallback"].get<std::string>();
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Config, std::string("invalid mock chat script: ") + e.what());
  }
}

BackendReply MockChatBackend::send(const ChatRequest& req) {
  ++calls_;
  std::lock_guard lock(mutex_);
  std::string hash;
  for (auto& rule : rules_) {
    if (rule.hash) {
      if (hash.empty()) hash = request_hash(req);
      if (*rule.hash != hash) continue;
    }
    if (rule.user_contains && req.user.find(*rule.user_contains) == std::string::npos) continue;
    if (rule.system_contains && req.system.find(*rule.system_contains) == std::string::npos) continue;
    if (rule.system_regex && !std::regex_search(req.system, *rule.system_regex)) continue;
    std::smatch m;
    if (rule.user_regex && !std::regex_search(req.user, m, *rule.user_regex)) continue;

    if (rule.seen++ < rule.fail_times) {
      BackendReply r;
      r.status = rule.fail_status;
      r.error = "scripted failure";
      return r;
    }
    BackendReply r;
    r.text = rule.user_regex ? m.format(rule.reply) : rule.reply;
    r.finish_reason = rule.finish_reason;
    return r;
  }
  if (fallback_) return BackendReply{200, *fallback_, FinishReason::Stop, {}};
  BackendReply r;
  r.status = 404;
  r.error = "no mock rule matched";
  return r;
}

// --- gateway -------------------------------------------------------------------

LlmGateway::LlmGateway(std::shared_ptr<ChatBackend> backend, GatewayOptions options)
    : backend_(std::move(backend)),
      options_(std::move(options)),
      in_flight_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, options_.max_in_flight))) {
  if (!backend_) throw Error(ErrorCode::Config, "gateway needs a backend");
  if (options_.retry.max_attempts < 1) options_.retry.max_attempts = 1;
}

GatewayStats LlmGateway::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

std::shared_ptr<std::mutex> LlmGateway::key_mutex(const std::string& key) {
  std::lock_guard lock(mutex_);
  auto& m = key_locks_[key];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

std::optional<ChatResponse> LlmGateway::cached(const std::string& key) {
  {
    std::lock_guard lock(mutex_);
    auto it = memory_.find(key);
    if (it != memory_.end()) return it->second;
  }
  if (!options_.cache_dir) return std::nullopt;
  std::ifstream in(*options_.cache_dir / (key + ".json"));
  if (!in) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(in);
    ChatResponse r;
    r.text = j.at("text").get<std::string>();
    r.finish_reason = FinishReason::Stop;
    std::lock_guard lock(mutex_);
    memory_.emplace(key, r);
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void LlmGateway::remember(const std::string& key, const ChatResponse& resp) {
  {
    std::lock_guard lock(mutex_);
    memory_[key] = resp;
  }
  if (options_.cache_dir) {
    const nlohmann::json j = {{"text", resp.text}, {"finish_reason", std::string(finish_name(resp.finish_reason))}};
    io::write_atomic(*options_.cache_dir / (key + ".json"), j.dump());
  }
}

ChatResponse LlmGateway::complete(const ChatRequest& req) {
  req.validate();
  const std::string key = request_hash(req);
  {
    std::lock_guard lock(mutex_);
    ++stats_.requests;
  }

  auto lock_for_key = key_mutex(key);
  std::lock_guard key_guard(*lock_for_key);

  if (auto hit = cached(key)) {
    std::lock_guard lock(mutex_);
    ++stats_.cache_hits;
    hit->from_cache = true;
    hit->latency_ms = 0;
    hit->retries = 0;
    return *hit;
  }

  CounterRng rng = [&] {
    std::lock_guard lock(mutex_);
    return CounterRng(options_.jitter_seed).split(jitter_stream_++);
  }();

  const auto start = std::chrono::steady_clock::now();
  int retries = 0;
  BackendReply reply;
  for (int attempt = 1;; ++attempt) {
    {
      in_flight_.acquire();
      try {
        reply = backend_->send(req);
      } catch (...) {
        in_flight_.release();
        throw;
      }
      in_flight_.release();
    }
    {
      std::lock_guard lock(mutex_);
      ++stats_.backend_calls;
      if (backend_->is_remote()) ++stats_.network_calls;
    }
    if (reply.status == 200) break;
    if (reply.status == 401 || reply.status == 403) {
      throw Error(ErrorCode::AuthFailure, "status " + std::to_string(reply.status) + ": " + reply.error);
    }
    const detail::HttpResult probe{reply.status, {}, {}};
    if (!detail::is_transient(probe)) {
      throw Error(ErrorCode::RequestRejected, "status " + std::to_string(reply.status) + ": " + reply.error);
    }
    if (attempt >= options_.retry.max_attempts) {
      throw Error(ErrorCode::EndpointUnavailable, "gave up after " + std::to_string(attempt) +
                                                      " attempts; last status " + std::to_string(reply.status) +
                                                      " " + reply.error);
    }
    ++retries;
    {
      std::lock_guard lock(mutex_);
      ++stats_.retries;
    }
    options_.sleeper(options_.retry.delay(retries, rng));
  }

  ChatResponse resp;
  resp.text = std::move(reply.text);
  resp.finish_reason = reply.finish_reason;
  resp.retries = retries;
  resp.latency_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count());

  if (resp.finish_reason == FinishReason::Length) {
    throw Error(ErrorCode::ResponseTruncated, "max_tokens reached; partial reply: " + resp.text.substr(0, 200));
  }
  if (resp.finish_reason == FinishReason::Error) {
    throw Error(ErrorCode::RequestRejected, "backend reported an error finish");
  }
  remember(key, resp);
  return resp;
}

}  // namespace riscore
