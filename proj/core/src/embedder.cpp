#include "riscore/embedder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "http_util.hpp"
#include "riscore/errors.hpp"
#include "riscore/hashing.hpp"
#include "riscore/io.hpp"
#include "riscore/parallel.hpp"
#include "riscore/retry.hpp"

namespace riscore {

namespace {

double norm_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double cosine_with_norms(const std::vector<double>& a, const std::vector<double>& b, double na, double nb) {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

}  // namespace

void EmbeddingVector::validate() const {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "embedding has zero dimensions");
  for (double x : values) {
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "embedding has a non-finite component");
  }
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  const double na = norm_of(a.values);
  const double nb = norm_of(b.values);
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::ZeroVector, "cosine of an all-zero vector");
  return cosine_with_norms(a.values, b.values, na, nb);
}

void VectorIndex::add(std::string id, EmbeddingVector vector) {
  vector.validate();
  if (dim_ == 0) dim_ = vector.dim();
  if (vector.dim() != dim_) {
    throw Error(ErrorCode::DimensionMismatch,
                "entry '" + id + "' has dim " + std::to_string(vector.dim()) + ", index dim " + std::to_string(dim_));
  }
  if (by_id_.count(id)) throw Error(ErrorCode::InvalidArgument, "duplicate index id '" + id + "'");
  const double n = norm_of(vector.values);
  if (n == 0.0) throw Error(ErrorCode::ZeroVector, "entry '" + id + "'");
  by_id_.emplace(id, entries_.size());
  entries_.push_back(Entry{std::move(id), std::move(vector), n});
}

const EmbeddingVector& VectorIndex::at(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw Error(ErrorCode::MissingEmbedding, id);
  return entries_[it->second].vector;
}

VectorIndex build_index(const std::vector<std::string>& ids, const EmbeddingLookup& lookup) {
  VectorIndex index;
  for (const auto& id : ids) {
    auto it = lookup.find(id);
    if (it == lookup.end()) throw Error(ErrorCode::MissingEmbedding, id);
    index.add(id, it->second);
  }
  return index;
}

std::vector<ScoredId> top_k(const VectorIndex& index, const EmbeddingVector& query, std::size_t k,
                            const std::set<std::string>& exclude) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "top_k requires k >= 1");
  if (index.size() == 0) return {};
  if (query.dim() != index.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "query dim " + std::to_string(query.dim()) + ", index dim " + std::to_string(index.dim()));
  }
  const double qn = norm_of(query.values);
  if (qn == 0.0) throw Error(ErrorCode::ZeroVector, "query");

  std::vector<ScoredId> scored;
  scored.reserve(index.size());
  for (const auto& e : index.entries()) {
    if (exclude.count(e.id)) continue;
    scored.push_back({e.id, cosine_with_norms(query.values, e.vector.values, qn, e.norm)});
  }
  sort_by_score(scored, [](const ScoredId& s) { return s.score; }, [](const ScoredId& s) -> const std::string& { return s.id; });
  scored.resize(std::min(k, scored.size()));
  return scored;
}

// --- HTTP backend ------------------------------------------------------------

HttpEmbeddingBackend::HttpEmbeddingBackend(std::string base_url, std::string model, std::string api_key,
                                           int timeout_s)
    : base_url_(std::move(base_url)), model_(std::move(model)), api_key_(std::move(api_key)), timeout_s_(timeout_s) {}

std::vector<std::vector<double>> HttpEmbeddingBackend::embed(const std::vector<std::string>& texts) {
  const nlohmann::json body = {{"model", model_}, {"input", texts}};
  std::map<std::string, std::string> headers;
  if (!api_key_.empty()) headers["Authorization"] = "Bearer " + api_key_;

  RetryPolicy policy;
  CounterRng rng(fnv1a64(model_) ^ texts.size());
  detail::HttpResult res;
  for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
    ++calls_;
    res = detail::post_json(base_url_, "/embeddings", body.dump(), headers, timeout_s_);
    if (res.status == 401 || res.status == 403) throw Error(ErrorCode::AuthFailure, "embedding endpoint");
    if (res.status == 200 || !detail::is_transient(res)) break;
    if (attempt < policy.max_attempts) std::this_thread::sleep_for(policy.delay(attempt, rng));
  }
  if (res.status != 200) {
    throw Error(ErrorCode::EndpointUnavailable, "embeddings: status " + std::to_string(res.status) + " " +
                                                    res.transport_error);
  }
  std::vector<std::vector<double>> out;
  try {
    const auto j = nlohmann::json::parse(res.body);
    for (const auto& item : j.at("data")) out.push_back(item.at("embedding").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::EndpointUnavailable, std::string("bad embeddings payload: ") + e.what());
  }
  if (out.size() != texts.size()) {
    throw Error(ErrorCode::EndpointUnavailable, "embeddings: expected " + std::to_string(texts.size()) +
                                                    " vectors, got " + std::to_string(out.size()));
  }
  return out;
}

// --- mock backend --------------------------------------------------------------

MockEmbeddingBackend::MockEmbeddingBackend(const nlohmann::json& spec)
    : model_(spec.value("model", std::string("mock-embed"))), dim_(spec.value("dim", std::size_t{64})) {
  if (dim_ == 0) throw Error(ErrorCode::Config, "mock embedding dim must be positive");
  if (spec.contains("vectors")) {
    for (const auto& [text, vec] : spec.at("vectors").items()) fixed_.emplace(text, vec.get<std::vector<double>>());
  }
}

std::vector<double> MockEmbeddingBackend::hashed_bag_of_words(std::string_view text, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    const std::uint64_t h = fnv1a64(token);
    v[h % dim] += (h >> 63) ? -1.0 : 1.0;
    token.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();
  // A constant component keeps every vector (even for empty text) nonzero.
  v[dim - 1] += 0.1;
  return v;
}

std::vector<std::vector<double>> MockEmbeddingBackend::embed(const std::vector<std::string>& texts) {
  ++calls_;
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto it = fixed_.find(t);
    out.push_back(it != fixed_.end() ? it->second : hashed_bag_of_words(t, dim_));
  }
  return out;
}

// --- caching front end -------------------------------------------------------------

Embedder::Embedder(std::shared_ptr<EmbeddingBackend> backend, EmbedderOptions options)
    : backend_(std::move(backend)), options_(std::move(options)) {
  if (!backend_) throw Error(ErrorCode::Config, "embedder needs a backend");
  if (options_.batch_size == 0) options_.batch_size = 1;
}

std::string Embedder::cache_key(const std::string& text) const {
  return sha256_hex(backend_->model_tag() + '\0' + sha256_hex(text));
}

std::optional<EmbeddingVector> Embedder::lookup(const std::string& key) {
  {
    std::lock_guard lock(mutex_);
    auto it = memory_.find(key);
    if (it != memory_.end()) return it->second;
  }
  if (!options_.cache_dir) return std::nullopt;
  const auto path = *options_.cache_dir / (key + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(in);
    EmbeddingVector v{j.at("embedding").get<std::vector<double>>(), j.at("model_tag").get<std::string>()};
    v.validate();
    std::lock_guard lock(mutex_);
    memory_.emplace(key, v);
    return v;
  } catch (const std::exception&) {
    return std::nullopt;  // corrupt entry: recompute and overwrite
  }
}

void Embedder::store(const std::string& key, const EmbeddingVector& v) {
  {
    std::lock_guard lock(mutex_);
    memory_[key] = v;
  }
  if (options_.cache_dir) {
    const nlohmann::json j = {{"model_tag", v.model_tag}, {"embedding", v.values}};
    io::write_atomic(*options_.cache_dir / (key + ".json"), j.dump());
  }
}

std::vector<EmbeddingVector> Embedder::embed_batch(const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error(ErrorCode::InvalidArgument, "embed_batch needs at least one text");

  std::vector<std::optional<EmbeddingVector>> results(texts.size());
  std::vector<std::string> keys(texts.size());
  // Distinct missing texts, in first-seen order.
  std::vector<std::string> missing;
  std::unordered_map<std::string, std::size_t> missing_pos;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    keys[i] = cache_key(texts[i]);
    if (auto hit = lookup(keys[i])) {
      results[i] = std::move(hit);
      ++cache_hits_;
    } else if (!missing_pos.count(texts[i])) {
      missing_pos.emplace(texts[i], missing.size());
      missing.push_back(texts[i]);
    }
  }

  if (!missing.empty()) {
    const std::size_t batches = (missing.size() + options_.batch_size - 1) / options_.batch_size;
    std::vector<std::vector<std::vector<double>>> raw(batches);
    parallel_for(batches, options_.max_in_flight, [&](std::size_t b) {
      const auto first = missing.begin() + static_cast<std::ptrdiff_t>(b * options_.batch_size);
      const auto last = missing.begin() + static_cast<std::ptrdiff_t>(std::min(missing.size(), (b + 1) * options_.batch_size));
      std::vector<std::string> chunk(first, last);
      ++backend_batches_;
      raw[b] = backend_->embed(chunk);
      if (raw[b].size() != chunk.size()) {
        throw Error(ErrorCode::DimensionMismatch, "backend returned " + std::to_string(raw[b].size()) +
                                                      " vectors for " + std::to_string(chunk.size()) + " texts");
      }
    });
    std::vector<EmbeddingVector> fresh;
    fresh.reserve(missing.size());
    for (auto& batch : raw) {
      for (auto& values : batch) fresh.push_back(EmbeddingVector{std::move(values), backend_->model_tag()});
    }
    for (const auto& v : fresh) {
      v.validate();
      if (v.dim() != fresh.front().dim()) throw Error(ErrorCode::DimensionMismatch, "inconsistent batch dims");
    }
    for (std::size_t m = 0; m < missing.size(); ++m) store(cache_key(missing[m]), fresh[m]);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (!results[i]) results[i] = fresh[missing_pos.at(texts[i])];
    }
  }

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (auto& r : results) out.push_back(std::move(*r));
  for (const auto& v : out) {
    if (v.dim() != out.front().dim()) throw Error(ErrorCode::DimensionMismatch, "cached and fresh dims differ");
  }
  return out;
}

EmbeddingVector Embedder::embed(const std::string& text) { return embed_batch({text}).front(); }

}  // namespace riscore
