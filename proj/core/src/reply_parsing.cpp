#include "reply_parsing.hpp"

#include <algorithm>
#include <sstream>

#include "riscore/text.hpp"

namespace riscore::detail {

std::string strip_emphasis(std::string_view raw) {
  std::string s(raw);
  s = text::replace_all(std::move(s), "**", "");
  s = text::replace_all(std::move(s), "__", "");
  return s;
}

std::string clean_span(std::string_view span) {
  std::string s(text::trim(span));
  if (auto blank = s.find("\n\n"); blank != std::string::npos) s.resize(blank);
  s = text::replace_all(std::move(s), "```", "");
  std::string_view v = text::trim(s);
  if (v.starts_with("- ")) v = text::trim(v.substr(2));
  for (int pass = 0; pass < 2; ++pass) {
    if (v.size() >= 2) {
      const char f = v.front(), b = v.back();
      if ((f == '"' && b == '"') || (f == '\'' && b == '\'') || (f == '`' && b == '`')) {
        v = text::trim(v.substr(1, v.size() - 2));
      }
    }
  }
  return std::string(v);
}

std::vector<LabelMatch> find_labels(const std::string& text, const std::vector<std::regex>& patterns) {
  std::vector<LabelMatch> all;
  for (int kind = 0; kind < static_cast<int>(patterns.size()); ++kind) {
    for (auto it = std::sregex_iterator(text.begin(), text.end(), patterns[kind]); it != std::sregex_iterator();
         ++it) {
      const auto pos = static_cast<std::size_t>(it->position(0));
      all.push_back({pos, pos + static_cast<std::size_t>(it->length(0)), kind});
    }
  }
  std::sort(all.begin(), all.end(), [](const LabelMatch& a, const LabelMatch& b) { return a.begin < b.begin; });
  // Drop matches nested inside an earlier one ("answer:" within "correct answer:").
  std::vector<LabelMatch> out;
  for (const auto& m : all) {
    if (!out.empty() && m.begin < out.back().end) continue;
    out.push_back(m);
  }
  return out;
}

std::optional<std::string> last_span(const std::string& text, const std::vector<LabelMatch>& labels, int kind) {
  for (std::size_t i = labels.size(); i-- > 0;) {
    if (labels[i].kind != kind) continue;
    const std::size_t stop = i + 1 < labels.size() ? labels[i + 1].begin : text.size();
    return text.substr(labels[i].end, stop - labels[i].end);
  }
  return std::nullopt;
}

std::string extract_field(std::string_view raw, const std::string& label_regex) {
  const std::string text = strip_emphasis(raw);
  const std::regex label(label_regex, std::regex::icase);
  const auto labels = find_labels(text, {label});
  if (auto span = last_span(text, labels, 0)) {
    // Fields are single-line; anything after the first line break is commentary.
    std::string_view v = text::trim(*span);
    if (auto nl = v.find('\n'); nl != std::string_view::npos) v = v.substr(0, nl);
    return clean_span(v);
  }
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    auto cleaned = clean_span(line);
    if (!cleaned.empty()) return cleaned;
  }
  return {};
}

}  // namespace riscore::detail
