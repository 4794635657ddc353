#pragma once

#include <httplib.h>

#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace infogent::testkit {

/// Local HTTP server on an ephemeral port for exercising the live clients.
class MockServer {
 public:
  struct Seen {
    std::string method;
    std::string path;
    std::string body;
    httplib::Headers headers;
  };
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  MockServer();
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  void get(const std::string& pattern, Handler h);
  void post(const std::string& pattern, Handler h);
  void del(const std::string& pattern, Handler h);

  /// Binds and serves in a background thread.
  void start();
  int port() const { return port_; }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  std::vector<Seen> seen() const;

 private:
  Handler recorded(Handler h);

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mu_;
  std::vector<Seen> seen_;
};

}  // namespace infogent::testkit
