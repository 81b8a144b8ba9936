#pragma once

#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace riscore::detail {

/// Removes markdown emphasis markers ("**", "__").
std::string strip_emphasis(std::string_view raw);

/// Cuts at the first blank line, trims, then peels code fences, a leading
/// "- " bullet and one layer of wrapping quotes.
std::string clean_span(std::string_view span);

struct LabelMatch {
  std::size_t begin = 0;  // label start
  std::size_t end = 0;    // first character after the label
  int kind = 0;
};

/// All non-overlapping label matches of every pattern, ordered by position.
std::vector<LabelMatch> find_labels(const std::string& text, const std::vector<std::regex>& patterns);

/// Span of the last label of `kind`, running to the next label or end of text.
std::optional<std::string> last_span(const std::string& text, const std::vector<LabelMatch>& labels, int kind);

/// Value after the last `label` (case-insensitive), or the first non-empty line
/// of the reply when the model ignored the response format.
std::string extract_field(std::string_view raw, const std::string& label_regex);

}  // namespace riscore::detail
