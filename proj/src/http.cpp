#include "infogent/http.hpp"

#include <httplib.h>

#include "infogent/text_util.hpp"

namespace infogent::http {

Response send(const Request& request) {
  Response out;
  auto url = text::parse_url(request.url);
  if (!url) {
    out.error = "invalid url: " + request.url;
    return out;
  }
  std::string origin = url->scheme + "://" + url->host;
  if (url->port != 0) origin += ":" + std::to_string(url->port);

  try {
    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(request.timeout_seconds, 0);
    client.set_read_timeout(request.timeout_seconds, 0);
    client.set_write_timeout(request.timeout_seconds, 0);

    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) headers.emplace(k, v);

    httplib::Result res{nullptr, httplib::Error::Unknown};
    const std::string& path = url->path_and_query;
    if (request.method == "GET") {
      res = client.Get(path, headers);
    } else if (request.method == "POST") {
      res = client.Post(path, headers, request.body, request.content_type);
    } else if (request.method == "DELETE") {
      res = client.Delete(path, headers, request.body, request.content_type);
    } else {
      out.error = "unsupported method " + request.method;
      return out;
    }
    if (!res) {
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    out.content_type = res->get_header_value("Content-Type");
  } catch (const std::exception& e) {
    out.status = 0;
    out.error = e.what();
  }
  return out;
}

}  // namespace infogent::http
