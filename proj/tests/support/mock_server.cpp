#include "mock_server.hpp"

#include <stdexcept>

namespace infogent::testkit {

MockServer::MockServer() = default;

MockServer::~MockServer() {
  server_.stop();
  if (thread_.joinable()) thread_.join();
}

MockServer::Handler MockServer::recorded(Handler h) {
  return [this, h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(mu_);
      seen_.push_back({req.method, req.path, req.body, req.headers});
    }
    h(req, res);
  };
}

void MockServer::get(const std::string& pattern, Handler h) { server_.Get(pattern, recorded(std::move(h))); }
void MockServer::post(const std::string& pattern, Handler h) { server_.Post(pattern, recorded(std::move(h))); }
void MockServer::del(const std::string& pattern, Handler h) { server_.Delete(pattern, recorded(std::move(h))); }

void MockServer::start() {
  port_ = server_.bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw std::runtime_error("mock server could not bind");
  thread_ = std::thread([this] { server_.listen_after_bind(); });
  server_.wait_until_ready();
}

std::vector<MockServer::Seen> MockServer::seen() const {
  std::lock_guard lock(mu_);
  return seen_;
}

}  // namespace infogent::testkit
