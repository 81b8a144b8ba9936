#include "riscore/templates.hpp"

#include "riscore/errors.hpp"

namespace riscore {

namespace detail {
const std::map<std::string, std::string>& embedded_templates();
}

const std::string& prompt_template(std::string_view name) {
  const auto& table = detail::embedded_templates();
  auto it = table.find(std::string(name));
  if (it == table.end()) throw Error(ErrorCode::Config, "unknown prompt template '" + std::string(name) + "'");
  return it->second;
}

std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size() * 2);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

}  // namespace riscore
