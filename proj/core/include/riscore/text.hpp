#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace riscore::text {

inline constexpr std::string_view kNoneOfTheAbove = "None of the above";

std::string_view trim(std::string_view s) noexcept;
std::string to_lower(std::string_view s);

/// Canonical form used for option distinctness, NOTA detection and answer
/// comparisons: lowercase, trimmed, terminal ".!?" stripped.
std::string normalize(std::string_view s);

/// Number of whitespace-separated tokens. Punctuation attached to a token
/// belongs to that token.
std::size_t word_count(std::string_view s) noexcept;

bool is_nota(std::string_view option);

std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string replace_all(std::string s, std::string_view from, std::string_view to);

bool iequals(std::string_view a, std::string_view b) noexcept;
bool istarts_with(std::string_view s, std::string_view prefix) noexcept;

/// Drops a leading English article ("a", "an", "the").
std::string_view strip_article(std::string_view s) noexcept;

}  // namespace riscore::text
