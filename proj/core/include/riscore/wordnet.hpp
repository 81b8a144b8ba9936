#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace riscore {

/// Noun lexicon read from WordNet 3.x `index.noun` / `data.noun` files.
/// Immutable after load and safe to share across threads.
class Lexicon {
 public:
  struct Synset {
    std::vector<std::string> words;       // underscores replaced by spaces
    std::vector<std::uint64_t> hyponyms;  // "~" pointer targets
  };

  /// Co-members of every synset of `word`, excluding the word itself, sorted.
  [[nodiscard]] std::vector<std::string> synonyms(std::string_view word) const;

  /// Members of synsets one "~" step below any synset of `word`, sorted.
  [[nodiscard]] std::vector<std::string> hyponyms(std::string_view word) const;

  [[nodiscard]] bool contains(std::string_view word) const;
  [[nodiscard]] std::size_t synset_count() const noexcept { return synsets_.size(); }
  [[nodiscard]] std::size_t lemma_count() const noexcept { return index_.size(); }

  /// Index key for a surface form: lowercase, leading article dropped,
  /// spaces joined with underscores ("A Tree" -> "tree").
  static std::string key(std::string_view word);

 private:
  friend Lexicon load_wordnet(const std::filesystem::path&, const std::filesystem::path&);
  const std::vector<std::uint64_t>* senses(std::string_view word) const;

  std::unordered_map<std::string, std::vector<std::uint64_t>> index_;
  std::unordered_map<std::uint64_t, Synset> synsets_;
};

/// Parses both files. License header lines (two leading spaces) are skipped.
/// Throws MalformedIndexLine, MalformedDataRecord or DanglingPointer, and
/// MissingFile when either path is absent.
Lexicon load_wordnet(const std::filesystem::path& index_path, const std::filesystem::path& data_path);

}  // namespace riscore
