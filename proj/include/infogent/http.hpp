#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace infogent::http {

struct Request {
  std::string method = "GET";
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::string content_type = "application/json";
  int timeout_seconds = 30;
};

struct Response {
  int status = 0;  // 0 when the transport failed
  std::string body;
  std::string content_type;
  std::string error;  // transport error description when status == 0

  bool transport_ok() const { return status != 0; }
  bool ok() const { return status >= 200 && status < 300; }
};

/// Blocking request over plain HTTP or TLS; follows redirects. Never throws
/// for network failures, they are reported through Response::error.
Response send(const Request& request);

}  // namespace infogent::http
