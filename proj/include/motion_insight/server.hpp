#pragma once

#include <memory>
#include <string>

#include "motion_insight/api.hpp"

namespace motion_insight {

// HTTP front end for Api. Every GET under /api/v1 is answered by Api::handle.
class Server {
 public:
  explicit Server(const Api& api, int threads = 4);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds without serving yet. Port 0 picks a free port. Returns the bound
  /// port; throws Error(Bind) on failure.
  int bind(const std::string& host, int port);

  /// Serves until stop() is called. Requires a successful bind().
  void listen();

  /// Safe to call from another thread or a signal-watching thread.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace motion_insight
