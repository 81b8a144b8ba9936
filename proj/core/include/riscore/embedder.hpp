#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace riscore {

struct EmbeddingVector {
  std::vector<double> values;
  std::string model_tag;

  [[nodiscard]] std::size_t dim() const noexcept { return values.size(); }

  /// Throws InvalidArgument on an empty vector or non-finite component.
  void validate() const;
};

using EmbeddingLookup = std::unordered_map<std::string, EmbeddingVector>;

/// dot(a,b) / (|a| |b|), clamped to [-1, 1].
/// Throws DimensionMismatch or ZeroVector.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

struct ScoredId {
  std::string id;
  double score = 0.0;
  friend bool operator==(const ScoredId&, const ScoredId&) = default;
};

/// Exact in-memory index. Immutable once built; safe to share across threads.
class VectorIndex {
 public:
  struct Entry {
    std::string id;
    EmbeddingVector vector;
    double norm = 0.0;
  };

  VectorIndex() = default;
  explicit VectorIndex(std::size_t dim) : dim_(dim) {}

  /// Throws DimensionMismatch, ZeroVector or InvalidArgument (duplicate id).
  void add(std::string id, EmbeddingVector vector);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] bool contains(const std::string& id) const { return by_id_.count(id) != 0; }
  [[nodiscard]] const EmbeddingVector& at(const std::string& id) const;
  [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

VectorIndex build_index(const std::vector<std::string>& ids, const EmbeddingLookup& lookup);

/// Scores this close are ties. Cosines that are equal in exact arithmetic
/// (parallel vectors of different lengths, say) can land an ulp apart.
inline constexpr double kScoreTieTolerance = 1e-12;

/// Sorts by score descending; runs of scores within kScoreTieTolerance of
/// their neighbour are ordered by ascending id.
template <typename T, typename ScoreFn, typename IdFn>
void sort_by_score(std::vector<T>& items, ScoreFn score, IdFn id) {
  std::stable_sort(items.begin(), items.end(), [&](const T& a, const T& b) { return score(a) > score(b); });
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i + 1;
    while (j < items.size() && score(items[j - 1]) - score(items[j]) <= kScoreTieTolerance) ++j;
    std::stable_sort(items.begin() + static_cast<std::ptrdiff_t>(i), items.begin() + static_cast<std::ptrdiff_t>(j),
                     [&](const T& a, const T& b) { return id(a) < id(b); });
    i = j;
  }
}

/// The k highest-cosine entries not in `exclude`, score descending, ties by
/// ascending id. Returns fewer than k only when the index is exhausted.
std::vector<ScoredId> top_k(const VectorIndex& index, const EmbeddingVector& query, std::size_t k,
                            const std::set<std::string>& exclude = {});

/// Remote or mock source of raw embedding vectors.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
  [[nodiscard]] virtual std::string model_tag() const = 0;
  [[nodiscard]] virtual std::size_t network_calls() const noexcept { return 0; }
};

/// OpenAI-compatible `POST {base}/embeddings` client.
class HttpEmbeddingBackend final : public EmbeddingBackend {
 public:
  HttpEmbeddingBackend(std::string base_url, std::string model, std::string api_key, int timeout_s = 60);
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
  [[nodiscard]] std::string model_tag() const override { return model_; }
  [[nodiscard]] std::size_t network_calls() const noexcept override { return calls_.load(); }

 private:
  std::string base_url_;
  std::string model_;
  std::string api_key_;
  int timeout_s_;
  std::atomic<std::size_t> calls_{0};
};

/// Deterministic offline backend. Texts listed under "vectors" return exactly
/// those vectors; any other text gets a signed hashed bag-of-words vector of
/// size "dim", so identical texts embed identically and shared words raise
/// similarity.
///
///   {"model": "mock-embed", "dim": 64, "vectors": {"some text": [0.1, ...]}}
class MockEmbeddingBackend final : public EmbeddingBackend {
 public:
  explicit MockEmbeddingBackend(const nlohmann::json& spec);
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
  [[nodiscard]] std::string model_tag() const override { return model_; }
  [[nodiscard]] std::size_t calls() const noexcept { return calls_.load(); }

  static std::vector<double> hashed_bag_of_words(std::string_view text, std::size_t dim);

 private:
  std::string model_;
  std::size_t dim_ = 64;
  std::unordered_map<std::string, std::vector<double>> fixed_;
  std::atomic<std::size_t> calls_{0};
};

struct EmbedderOptions {
  std::optional<std::filesystem::path> cache_dir;
  std::size_t batch_size = 32;
  std::size_t max_in_flight = 4;
};

/// Caching front end over an EmbeddingBackend. Results are cached in memory
/// and, when cache_dir is set, as one JSON file per (model_tag, SHA-256(text))
/// key so reruns never touch the network.
class Embedder {
 public:
  Embedder(std::shared_ptr<EmbeddingBackend> backend, EmbedderOptions options = {});

  /// One vector per text, same order. Throws InvalidArgument on empty input,
  /// DimensionMismatch when the backend returns inconsistent sizes.
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts);
  EmbeddingVector embed(const std::string& text);

  [[nodiscard]] std::string model_tag() const { return backend_->model_tag(); }
  [[nodiscard]] std::size_t cache_hits() const noexcept { return cache_hits_.load(); }
  [[nodiscard]] std::size_t backend_batches() const noexcept { return backend_batches_.load(); }
  [[nodiscard]] const EmbeddingBackend& backend() const noexcept { return *backend_; }

  std::string cache_key(const std::string& text) const;

 private:
  std::optional<EmbeddingVector> lookup(const std::string& key);
  void store(const std::string& key, const EmbeddingVector& v);

  std::shared_ptr<EmbeddingBackend> backend_;
  EmbedderOptions options_;
  std::mutex mutex_;
  std::unordered_map<std::string, EmbeddingVector> memory_;
  std::atomic<std::size_t> cache_hits_{0};
  std::atomic<std::size_t> backend_batches_{0};
};

}  // namespace riscore
