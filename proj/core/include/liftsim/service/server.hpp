#pragma once

#include <memory>
#include <string>

#include "liftsim/scenario.hpp"
#include "liftsim/service/session.hpp"

namespace liftsim::service {

struct ServerConfig {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
  SessionConfig session;
  std::string build = "liftsim";
};

// HTTP + WebSocket front end for one Session.
//
//   GET /session    upgrade to the message stream
//   GET /health     {"status", "build", "schedule_checksum", "time", "clients"}
//   GET /scenarios  {"scenarios": [names...]} from session.scenario_dir
//
// A network thread owns the sockets; a loop thread owns the Session and
// runs physics at dt from a monotonic clock (or on input in lockstep).
// The first connected client is the pilot; later ones are read-only
// observers.
class Server {
 public:
  Server(harness::Scenario scenario, ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts both threads; returns the bound port.
  unsigned short start();
  void stop();
  // Blocks until stop() is called from another thread or a signal handler.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace liftsim::service
