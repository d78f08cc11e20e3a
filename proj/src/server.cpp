#include "motion_insight/server.hpp"

#include <atomic>
#include <chrono>
#include <thread>

#include <httplib.h>

#include "motion_insight/error.hpp"

namespace motion_insight {

struct Server::Impl {
  const Api& api;
  httplib::Server http;
  bool bound = false;
  std::atomic<bool> stop_requested{false};
  std::atomic<bool> listening{false};

  explicit Impl(const Api& a) : api(a) {}
};

Server::Server(const Api& api, int threads) : impl_(std::make_unique<Impl>(api)) {
  const auto pool = static_cast<std::size_t>(threads < 1 ? 1 : threads);
  impl_->http.new_task_queue = [pool] { return new httplib::ThreadPool(pool); };
  // No SO_REUSEPORT: a second server on a busy port must fail to bind.
  impl_->http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  const Api* target = &api;
  impl_->http.Get(R"(/.*)", [target](const httplib::Request& req, httplib::Response& res) {
    QueryParams params(req.params.begin(), req.params.end());
    const ApiResponse out = target->handle(req.path, params);
    res.status = out.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Cache-Control", "no-store");
    res.set_content(out.body, "application/json");
  });
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0) {
    bound = impl_->http.bind_to_any_port(host);
  } else if (impl_->http.bind_to_port(host, port)) {
    bound = port;
  }
  if (bound <= 0) {
    throw Error(ErrorCode::Bind, "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return bound;
}

void Server::listen() {
  if (!impl_->bound) throw Error(ErrorCode::Bind, "listen() before bind()");
  impl_->listening = true;
  if (!impl_->stop_requested) impl_->http.listen_after_bind();
  impl_->listening = false;
}

void Server::stop() {
  if (!impl_) return;
  impl_->stop_requested = true;
  // listen() may not have entered its accept loop yet.
  while (impl_->listening) {
    if (impl_->http.is_running()) {
      impl_->http.stop();
      return;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
}

}  // namespace motion_insight
