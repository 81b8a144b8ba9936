#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "riscore/corpus.hpp"
#include "riscore/embedder.hpp"
#include "riscore/llm_gateway.hpp"
#include "riscore/reconstructor.hpp"
#include "riscore/wordnet.hpp"

namespace riscore {

// Declared in alphabetical order, which is also the tie-break order.
enum class Category { Animal, Concept, Food, Nature, Object, Person, Place, Time };

inline constexpr std::array<Category, 8> kAllCategories = {Category::Animal, Category::Concept, Category::Food,
                                                           Category::Nature, Category::Object,  Category::Person,
                                                           Category::Place,  Category::Time};

std::string_view to_string(Category c) noexcept;
std::optional<Category> parse_category(std::string_view s);

enum class DistractorOrigin { ConceptGrasper, ContextRewrite, CategoryGuided, WordNet };

std::string_view to_string(DistractorOrigin o) noexcept;
std::optional<DistractorOrigin> parse_origin(std::string_view s);

struct Distractor {
  std::string text;
  DistractorOrigin origin = DistractorOrigin::ConceptGrasper;
  // A category-guided reply the lexicon relates to the answer ("An oak" for
  // "A tree"). Kept, since it differs literally, but surfaced in logs.
  bool risky = false;
};

struct DistractorSet {
  std::string parent_id;
  std::string answer;
  std::vector<Distractor> items;

  [[nodiscard]] std::size_t model_generated() const;
};

nlohmann::json to_json(const DistractorSet& s);
DistractorSet distractor_set_from_json(const nlohmann::json& j);

/// Long-distractor pipeline for BrainTeaser-style riddles: one concept-grasper
/// call on the new pair, one context-rewrite call per original distractor
/// (NOTA skipped, answer withheld), and one extra grasper call when the new
/// answer is NOTA but the original's was not. Candidates equal to the answer,
/// NOTA-equivalent, duplicated or failing the answer filter are dropped.
/// Throws InsufficientDistractors when fewer than 3 survive.
DistractorSet gen_long_distractors(const QaPair& pair, const Riddle& original, LlmGateway& gateway,
                                   const GeneratorConfig& generator);

/// Breaks a riddle into self-contained sub-riddles, each closed by the
/// riddle's own query ("what am I?") or by "What am I?" when it has none.
std::vector<std::string> split_into_subphrases(std::string_view question);

/// Zero-shot answer classifier over the eight category labels.
class AnswerClassifier {
 public:
  virtual ~AnswerClassifier() = default;
  /// Throws UnknownLabel when the reply is outside the label set.
  virtual Category classify(std::string_view answer, std::string_view question) = 0;
};

/// Classifies through the chat gateway; one retry with a shifted seed when
/// the reply is not a label.
class ChatClassifier final : public AnswerClassifier {
 public:
  ChatClassifier(LlmGateway& gateway, GeneratorConfig generator) : gateway_(gateway), generator_(std::move(generator)) {}
  Category classify(std::string_view answer, std::string_view question) override;

 private:
  LlmGateway& gateway_;
  GeneratorConfig generator_;
};

/// Hugging Face style zero-shot classification endpoint:
/// POST {"inputs": ..., "parameters": {"candidate_labels": [...]}} and
/// read the top entry of "labels".
class ZeroShotHttpClassifier final : public AnswerClassifier {
 public:
  ZeroShotHttpClassifier(std::string url, std::string api_key, int timeout_s = 60);
  Category classify(std::string_view answer, std::string_view question) override;

 private:
  std::string url_;
  std::string api_key_;
  int timeout_s_;
};

/// Maps a raw classifier reply to a label ("Category: Nature." -> nature).
std::optional<Category> parse_category_reply(std::string_view reply);

Category classify_answer(std::string_view answer, std::string_view question, AnswerClassifier& classifier);

/// The two labels other than `correct` whose label-text embeddings are most
/// cosine-similar to the correct label's; ties go to alphabetical order.
/// Embeddings are keyed by label text. Throws MissingEmbedding.
std::pair<Category, Category> related_categories(Category correct, const EmbeddingLookup& category_embeddings);

struct ShortDistractorOptions {
  std::size_t target = 4;           // candidates needed by a 5-option riddle
  std::size_t min_model_generated = 2;
  std::size_t max_reply_words = 3;
};

/// Short-distractor pipeline for RiddleSense-style riddles: classify the
/// answer, ask for a short answer per subphrase x related category, then top
/// up from WordNet synonyms/hyponyms of the kept items (and of
/// `original_distractors` if still short). Throws InsufficientDistractors
/// when fewer than `min_model_generated` model items survive or the target
/// cannot be reached.
DistractorSet gen_short_distractors(const QaPair& pair, LlmGateway& gateway, const GeneratorConfig& generator,
                                    AnswerClassifier& classifier, const Lexicon& lexicon,
                                    const EmbeddingLookup& category_embeddings,
                                    std::span<const std::string> original_distractors = {},
                                    const ShortDistractorOptions& options = {});

}  // namespace riscore
