#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "http_util.hpp"

#include "riscore/errors.hpp"

namespace riscore::detail {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::Config, "URL without scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  out.prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

}  // namespace

HttpResult post_json(const std::string& base_url, const std::string& path, const std::string& body,
                     const std::map<std::string, std::string>& headers, int timeout_s) {
  const SplitUrl url = split_url(base_url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(timeout_s, 0);
  client.set_read_timeout(timeout_s, 0);
  client.set_write_timeout(timeout_s, 0);

  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);

  HttpResult result;
  auto res = client.Post(url.prefix + path, hdrs, body, "application/json");
  if (!res) {
    result.transport_error = httplib::to_string(res.error());
    return result;
  }
  result.status = res->status;
  result.body = res->body;
  return result;
}

}  // namespace riscore::detail
