#pragma once

#include <map>
#include <string>

namespace riscore::detail {

struct HttpResult {
  int status = 0;           // 0 when the request never produced a response
  std::string body;
  std::string transport_error;
};

/// POSTs a JSON body to base_url + path. base_url may carry a path prefix,
/// e.g. "https://api.example.com/v1".
HttpResult post_json(const std::string& base_url, const std::string& path, const std::string& body,
                     const std::map<std::string, std::string>& headers, int timeout_s);

/// 408, 425, 429 and 5xx are worth retrying; so is a transport failure.
inline bool is_transient(const HttpResult& r) {
  return r.status == 0 || r.status == 408 || r.status == 425 || r.status == 429 || r.status >= 500;
}

}  // namespace riscore::detail
