#include "wcg/service/http_server.hpp"

#include <condition_variable>
#include <deque>
#include <iostream>
#include <vector>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace wcg::service {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

std::vector<std::string_view> split_path(std::string_view target) {
  const auto q = target.find('?');
  if (q != std::string_view::npos) target = target.substr(0, q);
  std::vector<std::string_view> parts;
  while (!target.empty()) {
    if (target.front() == '/') {
      target.remove_prefix(1);
      continue;
    }
    const auto slash = target.find('/');
    parts.push_back(target.substr(0, slash));
    if (slash == std::string_view::npos) break;
    target.remove_prefix(slash);
  }
  return parts;
}

HttpReply error_reply(int status, const std::string& message) {
  return {status, json{{"error", message}, {"status", status}}.dump() + "\n"};
}

HttpReply json_reply(int status, const json& doc) { return {status, doc.dump() + "\n"}; }

}  // namespace

HttpReply dispatch(SessionManager& sessions, std::string_view method, std::string_view target,
                   std::string_view body) {
  const auto parts = split_path(target);
  try {
    if (parts.empty() || parts[0] != "sessions" || parts.size() > 3) return error_reply(404, "not found");
    if (parts.size() == 1) {
      if (method != "POST") return error_reply(405, "method not allowed");
      return json_reply(201, sessions.create(json::parse(body)));
    }
    const std::string id(parts[1]);
    if (parts.size() == 2) {
      if (method != "GET") return error_reply(405, "method not allowed");
      return json_reply(200, sessions.state(id));
    }
    if (parts[2] == "choice") {
      if (method != "POST") return error_reply(405, "method not allowed");
      const json doc = json::parse(body);
      if (!doc.is_object() || !doc.contains("edge")) return error_reply(400, "body must be {\"edge\": ...}");
      return json_reply(200, sessions.choose(id, doc["edge"]));
    }
    if (parts[2] == "transcript") {
      if (method != "GET") return error_reply(405, "method not allowed");
      return {200, sessions.transcript(id)};
    }
    return error_reply(404, "not found");
  } catch (const ServiceError& e) {
    return error_reply(e.status(), e.what());
  } catch (const json::exception& e) {
    return error_reply(400, std::string("bad JSON: ") + e.what());
  } catch (const GameError& e) {
    return error_reply(400, e.what());
  } catch (const std::exception& e) {
    return error_reply(500, e.what());
  }
}

struct HttpServer::Impl {
  struct Outbox {
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<std::string> messages;
  };

  SessionManager& sessions;
  asio::io_context io;
  tcp::acceptor acceptor{io};
  std::thread accept_thread;
  std::atomic<bool> stopping{false};
  std::mutex mutex;
  std::condition_variable stopped_cv;
  bool stopped = false;
  std::map<std::uint64_t, std::shared_ptr<tcp::socket>> sockets;
  std::map<std::uint64_t, std::shared_ptr<Outbox>> outboxes;
  std::vector<std::thread> threads;
  std::uint64_t next_id = 0;

  explicit Impl(SessionManager& s) : sessions(s) {}

  void accept_loop() {
    while (!stopping) {
      auto socket = std::make_shared<tcp::socket>(io);
      beast::error_code ec;
      acceptor.accept(*socket, ec);
      if (stopping) break;
      if (ec) continue;
      std::lock_guard lock(mutex);
      const std::uint64_t id = next_id++;
      sockets[id] = socket;
      threads.emplace_back([this, id, socket] {
        serve(*socket);
        std::lock_guard inner(mutex);
        sockets.erase(id);
      });
    }
  }

  void serve(tcp::socket& socket) {
    beast::flat_buffer buffer;
    beast::error_code ec;
    while (!stopping) {
      http::request<http::string_body> req;
      http::read(socket, buffer, req, ec);
      if (ec) break;
      if (websocket::is_upgrade(req)) {
        stream(socket, std::move(req));
        return;
      }
      http::response<http::string_body> res;
      res.version(req.version());
      res.set(http::field::access_control_allow_origin, "*");
      if (req.method() == http::verb::options) {
        res.result(http::status::no_content);
        res.set(http::field::access_control_allow_methods, "GET, POST, OPTIONS");
        res.set(http::field::access_control_allow_headers, "Content-Type");
      } else {
        const HttpReply reply = dispatch(sessions, std::string_view(req.method_string().data(), req.method_string().size()),
                                         std::string_view(req.target().data(), req.target().size()), req.body());
        res.result(static_cast<http::status>(reply.status));
        res.set(http::field::content_type, reply.content_type);
        res.body() = reply.body;
      }
      res.keep_alive(req.keep_alive());
      res.prepare_payload();
      http::write(socket, res, ec);
      if (ec || !req.keep_alive()) break;
    }
    socket.shutdown(tcp::socket::shutdown_both, ec);
  }

  void stream(tcp::socket& socket, http::request<http::string_body> req) {
    const auto parts = split_path(std::string_view(req.target().data(), req.target().size()));
    websocket::stream<tcp::socket&> ws(socket);
    beast::error_code ec;
    ws.accept(req, ec);
    if (ec) return;
    if (parts.size() != 3 || parts[0] != "sessions" || parts[2] != "stream") {
      ws.close(websocket::close_code::policy_error, ec);
      return;
    }
    const std::string id(parts[1]);
    auto box = std::make_shared<Outbox>();
    std::uint64_t token = 0;
    try {
      token = sessions.subscribe(id, [box](const json& event) {
        std::lock_guard lock(box->mutex);
        box->messages.push_back(event.dump());
        box->cv.notify_one();
      });
    } catch (const ServiceError& e) {
      ws.close(websocket::close_reason(websocket::close_code::policy_error, e.what()), ec);
      return;
    }
    std::uint64_t box_id;
    {
      std::lock_guard lock(mutex);
      box_id = next_id++;
      outboxes[box_id] = box;
    }
    ws.text(true);
    while (true) {
      std::string message;
      {
        std::unique_lock lock(box->mutex);
        box->cv.wait(lock, [&] { return stopping || !box->messages.empty(); });
        if (stopping) break;
        message = std::move(box->messages.front());
        box->messages.pop_front();
      }
      ws.write(asio::buffer(message), ec);
      if (ec) break;
    }
    sessions.unsubscribe(id, token);
    {
      std::lock_guard lock(mutex);
      outboxes.erase(box_id);
    }
    if (stopping) ws.close(websocket::close_code::going_away, ec);
  }
};

HttpServer::HttpServer(SessionManager& sessions, const std::string& address, unsigned short port)
    : impl_(std::make_unique<Impl>(sessions)) {
  const tcp::endpoint endpoint(asio::ip::make_address(address), port);
  impl_->acceptor.open(endpoint.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(endpoint);
  impl_->acceptor.listen();
  port_ = impl_->acceptor.local_endpoint().port();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::start() {
  impl_->accept_thread = std::thread([this] { impl_->accept_loop(); });
}

void HttpServer::stop() {
  if (impl_->stopping.exchange(true)) return;
  beast::error_code ec;
  {
    // Wake the blocking accept.
    asio::io_context io;
    tcp::socket poke(io);
    poke.connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), port_), ec);
  }
  if (impl_->accept_thread.joinable()) impl_->accept_thread.join();
  impl_->acceptor.close(ec);
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(impl_->mutex);
    for (auto& [id, socket] : impl_->sockets) socket->shutdown(tcp::socket::shutdown_both, ec);
    for (auto& [id, box] : impl_->outboxes) {
      std::lock_guard inner(box->mutex);
      box->cv.notify_all();
    }
    threads.swap(impl_->threads);
  }
  for (auto& t : threads) t.join();
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stopped = true;
  }
  impl_->stopped_cv.notify_all();
}

void HttpServer::wait() {
  std::unique_lock lock(impl_->mutex);
  impl_->stopped_cv.wait(lock, [&] { return impl_->stopped; });
}

}  // namespace wcg::service
