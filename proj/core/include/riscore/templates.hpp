#pragma once

#include <map>
#include <string>
#include <string_view>

namespace riscore {

/// Built-in prompt template by file stem (e.g. "fs_4_system").
/// Throws Error(Config) for unknown names.
const std::string& prompt_template(std::string_view name);

/// Single-pass substitution of `{NAME}` placeholders. Substituted values are
/// never rescanned, and braces that do not name a known value are kept as is.
std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

}  // namespace riscore
