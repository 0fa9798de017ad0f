#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>

#include "wcg/service/session_manager.hpp"

namespace wcg::service {

struct HttpReply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Routes one request:
//   POST /sessions                 config document  -> 201 {id, round, offer}
//   GET  /sessions/{id}                             -> session view
//   POST /sessions/{id}/choice     {"edge": e}      -> {round, offer} | {round, result}
//   GET  /sessions/{id}/transcript                  -> transcript text
// Errors are {"error": message, "status": code}.
HttpReply dispatch(SessionManager& sessions, std::string_view method, std::string_view target,
                   std::string_view body);

// Blocking HTTP/1.1 + WebSocket server, one thread per connection. The
// WebSocket endpoint /sessions/{id}/stream pushes the session's events.
class HttpServer {
 public:
  // port 0 picks a free port.
  HttpServer(SessionManager& sessions, const std::string& address, unsigned short port);
  ~HttpServer();

  unsigned short port() const { return port_; }
  void start();
  // Closes the listener and every open connection, then joins their threads.
  void stop();
  // Blocks until stop() is called from elsewhere.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  unsigned short port_ = 0;
};

}  // namespace wcg::service
