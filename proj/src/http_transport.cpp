#include "httplib.h"

#include "kgpipe/llm_backend.hpp"

namespace kgpipe::llm {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("backend URL lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

  HttpReply post_json(const std::string& url, const std::map<std::string, std::string>& headers,
                      const std::string& body) override {
    const SplitUrl parts = split_url(url);
    httplib::Client client(parts.origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    httplib::Headers h;
    for (const auto& [k, v] : headers) {
      if (k != "Content-Type") h.emplace(k, v);
    }
    auto result = client.Post(parts.path, h, body, "application/json");
    if (!result) {
      throw BackendError("transport failure posting to " + url + ": " + httplib::to_string(result.error()), true);
    }
    return {result->status, result->body};
  }

 private:
  std::chrono::seconds timeout_;
};

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(std::chrono::seconds timeout) {
  return std::make_unique<HttplibTransport>(timeout);
}

}  // namespace kgpipe::llm
