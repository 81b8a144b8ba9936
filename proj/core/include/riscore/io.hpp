#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace riscore::io {

std::string read_text(const std::filesystem::path& path);

/// Writes to a sibling temp file then renames over the target, so readers
/// never observe a partially written file.
void write_atomic(const std::filesystem::path& path, std::string_view content);

void write_jsonl_atomic(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);

/// Parses every non-blank line; throws Error(MalformedLine) naming the line.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

void append_line(const std::filesystem::path& path, std::string_view line);

}  // namespace riscore::io
