#include "riscore/distractor_forge.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "http_util.hpp"
#include "reply_parsing.hpp"
#include "riscore/errors.hpp"
#include "riscore/templates.hpp"
#include "riscore/text.hpp"

namespace riscore {

namespace {

constexpr std::array<std::string_view, 8> kCategoryNames = {"animal", "concept", "food",   "nature",
                                                            "object", "person",  "place", "time"};
constexpr std::array<std::string_view, 4> kOriginNames = {"concept_grasper", "context_rewrite", "category_guided",
                                                          "wordnet"};

// Accepts candidates that keep the set guaranteed-wrong and duplicate-free.
class CandidatePool {
 public:
  CandidatePool(std::string_view answer, Source source) : answer_(answer), source_(source) {}

  bool offer(std::string_view raw, DistractorOrigin origin, bool risky = false) {
    std::string text(text::trim(raw));
    if (text.empty() || text::is_nota(text)) return false;
    const auto norm = text::normalize(text);
    if (norm == text::normalize(answer_) || Lexicon::key(text) == Lexicon::key(answer_)) return false;
    if (!passes_answer_filter(text, source_)) return false;
    if (!seen_.insert(norm).second) return false;
    items_.push_back({std::move(text), origin, risky});
    return true;
  }

  [[nodiscard]] std::size_t size() const { return items_.size(); }
  std::vector<Distractor>& items() { return items_; }

 private:
  std::string answer_;
  Source source_;
  std::set<std::string> seen_;
  std::vector<Distractor> items_;
};

const std::string kWrongAnswerLabel = R"(wrong\s+answer\s*:)";
const std::string kSentenceLabel = R"(sentence\s*:)";
const std::string kAnswerLabel = R"(answer\s*:)";

bool is_interrogative(std::string_view word) {
  static const std::set<std::string> kWords = {"what", "who", "where", "when", "why", "how", "which"};
  std::string w;
  for (char c : word) {
    if (std::isalpha(static_cast<unsigned char>(c))) w += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return kWords.count(w) != 0;
}

bool has_interrogative(std::string_view s) {
  for (const auto& w : text::split_whitespace(s)) {
    if (is_interrogative(w)) return true;
  }
  return false;
}

struct Fragment {
  std::string text;
  char delim = ' ';  // punctuation that closed it; ' ' for a conjunction or end of text
};

// Splits each fragment at whole-word occurrences of any of `words`; the left
// piece is closed by a conjunction and the right piece inherits the delimiter.
std::vector<Fragment> split_on_words(const std::vector<Fragment>& in, const std::set<std::string>& words) {
  std::vector<Fragment> out;
  for (const auto& f : in) {
    std::vector<std::string> current;
    for (const auto& w : text::split_whitespace(f.text)) {
      if (words.count(text::to_lower(w))) {
        if (!current.empty()) out.push_back({text::join(current, " "), ' '});
        current.clear();
      } else {
        current.push_back(w);
      }
    }
    if (!current.empty()) out.push_back({text::join(current, " "), f.delim});
  }
  return out;
}

std::string with_first(std::string s, bool upper) {
  if (!s.empty()) {
    const auto c = static_cast<unsigned char>(s[0]);
    s[0] = static_cast<char>(upper ? std::toupper(c) : std::tolower(c));
  }
  return s;
}

std::string category_key(std::string_view reply) {
  std::string s = text::to_lower(text::trim(reply));
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == '*' || c == '"' || c == '\'' || c == '`'; }),
          s.end());
  std::string_view v = text::trim(s);
  for (std::string_view prefix : {"category:", "label:", "answer:"}) {
    if (v.starts_with(prefix)) v = text::trim(v.substr(prefix.size()));
  }
  return text::normalize(v);
}

}  // namespace

std::string_view to_string(Category c) noexcept { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::optional<Category> parse_category(std::string_view s) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (text::iequals(text::trim(s), kCategoryNames[i])) return kAllCategories[i];
  }
  return std::nullopt;
}

std::string_view to_string(DistractorOrigin o) noexcept { return kOriginNames[static_cast<std::size_t>(o)]; }

std::optional<DistractorOrigin> parse_origin(std::string_view s) {
  for (std::size_t i = 0; i < kOriginNames.size(); ++i) {
    if (s == kOriginNames[i]) return static_cast<DistractorOrigin>(i);
  }
  return std::nullopt;
}

std::size_t DistractorSet::model_generated() const {
  return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](const Distractor& d) {
    return d.origin != DistractorOrigin::WordNet;
  }));
}

nlohmann::json to_json(const DistractorSet& s) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& d : s.items) {
    items.push_back({{"text", d.text}, {"origin", std::string(to_string(d.origin))}, {"risky", d.risky}});
  }
  return {{"parent_id", s.parent_id}, {"answer", s.answer}, {"items", items}};
}

DistractorSet distractor_set_from_json(const nlohmann::json& j) {
  try {
    DistractorSet s;
    s.parent_id = j.at("parent_id").get<std::string>();
    s.answer = j.at("answer").get<std::string>();
    for (const auto& it : j.at("items")) {
      auto origin = parse_origin(it.at("origin").get<std::string>());
      if (!origin) throw Error(ErrorCode::MalformedLine, "unknown distractor origin");
      s.items.push_back({it.at("text").get<std::string>(), *origin, it.value("risky", false)});
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedLine, e.what());
  }
}

// --- long distractors -----------------------------------------------------------

DistractorSet gen_long_distractors(const QaPair& pair, const Riddle& original, LlmGateway& gateway,
                                   const GeneratorConfig& generator) {
  if (original.source != Source::BrainTeaserSP) {
    throw Error(ErrorCode::InvalidArgument, "long distractors need a BrainTeaser original");
  }
  CandidatePool pool(pair.answer, Source::BrainTeaserSP);

  const auto grasper = [&](std::optional<std::uint64_t> seed) {
    auto req = generator.request(
        prompt_template("distractor_grasper_system"),
        fill_template(prompt_template("distractor_grasper_user"), {{"QUESTION", pair.question}, {"ANSWER", pair.answer}}));
    if (seed) req.params.seed = seed;
    pool.offer(detail::extract_field(gateway.complete(req).text, kWrongAnswerLabel), DistractorOrigin::ConceptGrasper);
  };

  grasper(std::nullopt);
  for (std::size_t i = 0; i < original.options.size(); ++i) {
    if (i == original.answer_index || text::is_nota(original.options[i])) continue;
    const auto req = generator.request(prompt_template("distractor_rewrite_system"),
                                       fill_template(prompt_template("distractor_rewrite_user"),
                                                     {{"ORI_CHOICE", original.options[i]}, {"QUESTION", pair.question}}));
    pool.offer(detail::extract_field(gateway.complete(req).text, kSentenceLabel), DistractorOrigin::ContextRewrite);
  }
  if (text::is_nota(pair.answer) && !text::is_nota(original.answer())) {
    // A NOTA answer uses all three distractors, so one more is needed.
    grasper(generator.params.seed.value_or(0) + 1);
  }

  if (pool.size() < 3) {
    throw Error(ErrorCode::InsufficientDistractors,
                pair.parent_id + ": " + std::to_string(pool.size()) + " long distractors survived, need 3");
  }
  return {pair.parent_id, pair.answer, std::move(pool.items())};
}

// --- subphrases -------------------------------------------------------------------

std::vector<std::string> split_into_subphrases(std::string_view question) {
  const std::string_view q = text::trim(question);
  if (q.empty()) return {};

  std::vector<Fragment> frags;
  {
    std::string cur;
    for (char c : q) {
      if (c == ',' || c == ';' || c == '.' || c == '!') {
        if (!text::trim(cur).empty()) frags.push_back({std::string(text::trim(cur)), c});
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!text::trim(cur).empty()) frags.push_back({std::string(text::trim(cur)), ' '});
  }
  frags = split_on_words(frags, {"but", "or"});

  std::optional<std::string> query;
  if (!frags.empty() && has_interrogative(frags.back().text)) {
    query = frags.back().text;
    frags.pop_back();
    if (!query->ends_with("?")) *query += "?";
  }
  const bool asks_elsewhere = !query && has_interrogative(q);
  const std::string suffix = query ? *query : (asks_elsewhere ? "" : "What am I?");

  const auto distinct = [](std::vector<Fragment> in) {
    std::set<std::string> seen;
    std::vector<Fragment> out;
    for (auto& f : in) {
      if (seen.insert(text::normalize(f.text)).second) out.push_back(std::move(f));
    }
    return out;
  };
  frags = distinct(std::move(frags));
  if (frags.size() < 3) frags = distinct(split_on_words(frags, {"and"}));

  std::vector<std::string> out;
  for (const auto& f : frags) {
    std::string s = f.text;
    if (suffix.empty()) {
      // The riddle asks mid-sentence; each clause stands on its own.
      if (f.delim != ' ') s += f.delim;
    } else if (f.delim == ',' || f.delim == ';') {
      s += ", " + with_first(suffix, false);
    } else {
      s += ". " + with_first(suffix, true);
    }
    if (text::word_count(s) >= 2) out.push_back(std::move(s));
  }
  return out;
}

// --- classification -------------------------------------------------------------

std::optional<Category> parse_category_reply(std::string_view reply) {
  const auto key = category_key(reply);
  if (auto c = parse_category(key)) return c;
  // Tolerate a bare label on its own first line followed by commentary.
  const auto nl = key.find('\n');
  if (nl != std::string::npos) return parse_category(text::normalize(key.substr(0, nl)));
  return std::nullopt;
}

Category ChatClassifier::classify(std::string_view answer, std::string_view question) {
  auto req = generator_.request(prompt_template("classify_answer_system"),
                                fill_template(prompt_template("classify_answer_user"),
                                              {{"QUESTION", std::string(question)}, {"ANSWER", std::string(answer)}}));
  std::string last;
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (attempt > 0) req.params.seed = generator_.params.seed.value_or(0) + 1;
    last = gateway_.complete(req).text;
    if (auto c = parse_category_reply(last)) return *c;
  }
  throw Error(ErrorCode::UnknownLabel, "classifier replied '" + std::string(text::trim(last)) + "'");
}

ZeroShotHttpClassifier::ZeroShotHttpClassifier(std::string url, std::string api_key, int timeout_s)
    : url_(std::move(url)), api_key_(std::move(api_key)), timeout_s_(timeout_s) {}

Category ZeroShotHttpClassifier::classify(std::string_view answer, std::string_view question) {
  nlohmann::json labels = nlohmann::json::array();
  for (auto name : kCategoryNames) labels.push_back(std::string(name));
  const nlohmann::json body = {
      {"inputs", "Riddle: " + std::string(question) + "\nAnswer: " + std::string(answer)},
      {"parameters", {{"candidate_labels", labels}}}};
  std::map<std::string, std::string> headers;
  if (!api_key_.empty()) headers["Authorization"] = "Bearer " + api_key_;

  std::string last;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto res = detail::post_json(url_, "", body.dump(), headers, timeout_s_);
    if (res.status == 401 || res.status == 403) throw Error(ErrorCode::AuthFailure, "classifier endpoint");
    if (res.status != 200) {
      if (detail::is_transient(res) && attempt == 0) continue;
      throw Error(ErrorCode::EndpointUnavailable, "classifier: status " + std::to_string(res.status));
    }
    try {
      const auto j = nlohmann::json::parse(res.body);
      // Either {"labels": [...], "scores": [...]} or [{"label": ..., "score": ...}, ...].
      last = j.is_array() ? j.at(0).at("label").get<std::string>() : j.at("labels").at(0).get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::EndpointUnavailable, std::string("bad classifier payload: ") + e.what());
    }
    if (auto c = parse_category_reply(last)) return *c;
  }
  throw Error(ErrorCode::UnknownLabel, "classifier replied '" + last + "'");
}

Category classify_answer(std::string_view answer, std::string_view question, AnswerClassifier& classifier) {
  if (text::trim(answer).empty()) throw Error(ErrorCode::InvalidArgument, "empty answer");
  return classifier.classify(answer, question);
}

std::pair<Category, Category> related_categories(Category correct, const EmbeddingLookup& category_embeddings) {
  const auto vec = [&](Category c) -> const EmbeddingVector& {
    auto it = category_embeddings.find(std::string(to_string(c)));
    if (it == category_embeddings.end()) {
      throw Error(ErrorCode::MissingEmbedding, "category label '" + std::string(to_string(c)) + "'");
    }
    return it->second;
  };
  for (auto c : kAllCategories) vec(c);
  std::vector<std::pair<double, Category>> scored;
  for (auto c : kAllCategories) {
    if (c != correct) scored.emplace_back(cosine(vec(correct), vec(c)), c);
  }
  // kAllCategories is alphabetical, so a stable sort keeps ties alphabetical.
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  return {scored[0].second, scored[1].second};
}

// --- short distractors ------------------------------------------------------------

DistractorSet gen_short_distractors(const QaPair& pair, LlmGateway& gateway, const GeneratorConfig& generator,
                                    AnswerClassifier& classifier, const Lexicon& lexicon,
                                    const EmbeddingLookup& category_embeddings,
                                    std::span<const std::string> original_distractors,
                                    const ShortDistractorOptions& options) {
  const Category category = classify_answer(pair.answer, pair.question, classifier);
  const auto [first, second] = related_categories(category, category_embeddings);

  std::set<std::string> related_to_answer;
  for (const auto& w : lexicon.synonyms(pair.answer)) related_to_answer.insert(Lexicon::key(w));
  std::set<std::string> answer_synonyms = related_to_answer;
  for (const auto& w : lexicon.hyponyms(pair.answer)) related_to_answer.insert(Lexicon::key(w));

  CandidatePool pool(pair.answer, Source::RiddleSense);
  for (const auto& phrase : split_into_subphrases(pair.question)) {
    for (Category c : {first, second}) {
      const auto req = generator.request(
          prompt_template("distractor_category_system"),
          fill_template(prompt_template("distractor_category_user"),
                        {{"QUESTION", phrase}, {"CATEGORY", with_first(std::string(to_string(c)), true)}}));
      const auto reply = detail::extract_field(gateway.complete(req).text, kAnswerLabel);
      if (text::word_count(reply) > options.max_reply_words) continue;
      pool.offer(reply, DistractorOrigin::CategoryGuided, related_to_answer.count(Lexicon::key(reply)) != 0);
    }
  }
  const std::size_t model_items = pool.size();
  if (model_items < options.min_model_generated) {
    throw Error(ErrorCode::InsufficientDistractors, pair.parent_id + ": " + std::to_string(model_items) +
                                                        " model-generated distractors, need " +
                                                        std::to_string(options.min_model_generated));
  }

  // Top up from the lexicon, never with a synonym of the answer itself.
  const auto augment_from = [&](const std::string& seed) {
    for (auto list : {lexicon.synonyms(seed), lexicon.hyponyms(seed)}) {
      for (const auto& w : list) {
        if (pool.size() >= options.target) return;
        if (answer_synonyms.count(Lexicon::key(w))) continue;
        if (text::word_count(w) > options.max_reply_words) continue;
        pool.offer(w, DistractorOrigin::WordNet);
      }
    }
  };
  std::vector<std::string> seeds;
  for (std::size_t i = 0; i < model_items; ++i) seeds.push_back(pool.items()[i].text);
  for (const auto& s : seeds) augment_from(s);
  for (const auto& s : original_distractors) augment_from(s);

  if (pool.size() < options.target) {
    throw Error(ErrorCode::InsufficientDistractors, pair.parent_id + ": " + std::to_string(pool.size()) +
                                                        " distractors after augmentation, need " +
                                                        std::to_string(options.target));
  }
  return {pair.parent_id, pair.answer, std::move(pool.items())};
}

}  // namespace riscore
