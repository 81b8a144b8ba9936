#include "riscore/wordnet.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "riscore/errors.hpp"
#include "riscore/io.hpp"
#include "riscore/text.hpp"

namespace riscore {

namespace {

bool is_header(std::string_view line) { return line.starts_with("  "); }

template <typename T>
bool parse_number(std::string_view tok, T& out, int base = 10) {
  if (tok.empty()) return false;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out, base);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string surface(std::string_view word) {
  std::string s(word);
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

// index line: lemma pos synset_cnt p_cnt [ptr_symbol...] sense_cnt tagsense_cnt synset_offset...
void parse_index_line(std::string_view line, std::size_t line_no,
                      std::unordered_map<std::string, std::vector<std::uint64_t>>& index) {
  const auto fail = [&](const std::string& why) {
    return Error(ErrorCode::MalformedIndexLine, "line " + std::to_string(line_no) + ": " + why);
  };
  const auto tok = tokens(line);
  if (tok.size() < 6) throw fail("too few fields");
  if (tok[1] != "n") throw fail("expected pos 'n', got '" + std::string(tok[1]) + "'");
  std::size_t synset_cnt = 0, p_cnt = 0;
  if (!parse_number(tok[2], synset_cnt) || !parse_number(tok[3], p_cnt)) throw fail("bad counts");
  const std::size_t offsets_at = 4 + p_cnt + 2;
  if (tok.size() != offsets_at + synset_cnt) throw fail("field count does not match synset_cnt/p_cnt");
  std::vector<std::uint64_t> offsets;
  for (std::size_t i = offsets_at; i < tok.size(); ++i) {
    std::uint64_t off = 0;
    if (tok[i].size() != 8 || !parse_number(tok[i], off)) throw fail("bad synset offset '" + std::string(tok[i]) + "'");
    offsets.push_back(off);
  }
  index[std::string(tok[0])] = std::move(offsets);
}

// data line: offset lex_filenum ss_type w_cnt(hex) [word lex_id]... p_cnt [sym offset pos src/tgt]... | gloss
std::pair<std::uint64_t, Lexicon::Synset> parse_data_line(std::string_view line, std::size_t line_no) {
  const auto bar = line.find(" | ");
  const auto tok = tokens(line.substr(0, bar));
  std::uint64_t offset = 0;
  const std::string where = tok.empty() ? "line " + std::to_string(line_no) : std::string(tok[0]);
  const auto fail = [&](const std::string& why) {
    return Error(ErrorCode::MalformedDataRecord, "offset " + where + ": " + why);
  };
  if (tok.size() < 4 || !parse_number(tok[0], offset)) throw fail("bad header");
  std::size_t w_cnt = 0;
  if (!parse_number(tok[3], w_cnt, 16) || w_cnt == 0) throw fail("bad w_cnt");
  std::size_t pos = 4;
  Lexicon::Synset syn;
  for (std::size_t w = 0; w < w_cnt; ++w, pos += 2) {
    if (pos + 1 >= tok.size()) throw fail("truncated word list");
    syn.words.push_back(surface(tok[pos]));
  }
  std::size_t p_cnt = 0;
  if (pos >= tok.size() || !parse_number(tok[pos], p_cnt)) throw fail("bad p_cnt");
  ++pos;
  for (std::size_t p = 0; p < p_cnt; ++p, pos += 4) {
    if (pos + 3 >= tok.size()) throw fail("truncated pointer list");
    std::uint64_t target = 0;
    if (!parse_number(tok[pos + 1], target)) throw fail("bad pointer offset");
    if (tok[pos] == "~" && tok[pos + 2] == "n") syn.hyponyms.push_back(target);
  }
  if (pos != tok.size()) throw fail("trailing fields before gloss");
  return {offset, std::move(syn)};
}

}  // namespace

Lexicon load_wordnet(const std::filesystem::path& index_path, const std::filesystem::path& data_path) {
  Lexicon lex;
  {
    std::istringstream in(io::read_text(index_path));
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      if (is_header(line) || text::trim(line).empty()) continue;
      parse_index_line(line, line_no, lex.index_);
    }
  }
  {
    std::istringstream in(io::read_text(data_path));
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      if (is_header(line) || text::trim(line).empty()) continue;
      auto [offset, syn] = parse_data_line(line, line_no);
      lex.synsets_[offset] = std::move(syn);
    }
  }
  const auto pad = [](std::uint64_t off) {
    std::string s = std::to_string(off);
    return std::string(s.size() < 8 ? 8 - s.size() : 0, '0') + s;
  };
  for (const auto& [offset, syn] : lex.synsets_) {
    for (auto target : syn.hyponyms) {
      if (!lex.synsets_.count(target)) {
        throw Error(ErrorCode::DanglingPointer, "synset " + pad(offset) + " points to missing " + pad(target));
      }
    }
  }
  for (const auto& [lemma, offsets] : lex.index_) {
    for (auto off : offsets) {
      if (!lex.synsets_.count(off)) {
        throw Error(ErrorCode::DanglingPointer, "index entry '" + lemma + "' points to missing " + pad(off));
      }
    }
  }
  return lex;
}

std::string Lexicon::key(std::string_view word) {
  std::string k = text::to_lower(text::strip_article(text::trim(word)));
  std::replace(k.begin(), k.end(), ' ', '_');
  return k;
}

const std::vector<std::uint64_t>* Lexicon::senses(std::string_view word) const {
  auto it = index_.find(key(word));
  return it == index_.end() ? nullptr : &it->second;
}

bool Lexicon::contains(std::string_view word) const { return senses(word) != nullptr; }

std::vector<std::string> Lexicon::synonyms(std::string_view word) const {
  std::set<std::string> out;
  if (const auto* offs = senses(word)) {
    const std::string self = text::to_lower(surface(key(word)));
    for (auto off : *offs) {
      for (const auto& w : synsets_.at(off).words) {
        if (text::to_lower(w) != self) out.insert(w);
      }
    }
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> Lexicon::hyponyms(std::string_view word) const {
  std::set<std::string> out;
  if (const auto* offs = senses(word)) {
    for (auto off : *offs) {
      for (auto h : synsets_.at(off).hyponyms) {
        for (const auto& w : synsets_.at(h).words) out.insert(w);
      }
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace riscore
