#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "wcg/rng.hpp"
#include "wcg/service/http_server.hpp"

using namespace wcg;
using namespace wcg::service;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("wcg_service_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int status_of(auto&& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    return e.status();
  }
  return 0;
}

json builder_config() { return {{"n", 7}, {"goal", "clique:3"}, {"waiter", "clique_builder"}, {"seed", 5}}; }

// Plays the first offered edge until the game ends; returns the final event.
json play_out(SessionManager& m, const std::string& id, json event) {
  while (event["type"] == "offer") event = m.choose(id, event["offer"][0]);
  return event;
}

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = boost::asio::ip::tcp;

std::pair<int, std::string> request(unsigned short port, http::verb method, const std::string& target,
                                    const std::string& body = "") {
  boost::asio::io_context io;
  tcp::socket socket(io);
  socket.connect(tcp::endpoint(boost::asio::ip::make_address("127.0.0.1"), port));
  http::request<http::string_body> req(method, target, 11);
  req.set(http::field::host, "127.0.0.1");
  req.set(http::field::content_type, "application/json");
  req.body() = body;
  req.prepare_payload();
  http::write(socket, req);
  beast::flat_buffer buffer;
  http::response<http::string_body> res;
  http::read(socket, buffer, res);
  beast::error_code ec;
  socket.shutdown(tcp::socket::shutdown_both, ec);
  return {static_cast<int>(res.result_int()), res.body()};
}

}  // namespace

TEST_CASE("a clique-builder session runs to a Waiter win") {
  TempDir dir;
  SessionManager m(dir.path);
  const json created = m.create(builder_config());
  CHECK(created["type"] == "offer");
  CHECK(created["round"] == 0);
  const std::string id = created["id"];
  CHECK(id.size() == 32);
  const json last = play_out(m, id, created);
  CHECK(last["type"] == "result");
  CHECK(last["result"]["winner"] == "waiter");
  CHECK(last["result"]["rounds"] == 4);
  CHECK(last["result"]["witness"].size() == 1);
  const json view = m.state(id);
  CHECK(view["round"] == 4);
  CHECK(view["red"] == 4);
  CHECK(view["edges"].size() == 8);
  CHECK(view["offer"].is_null());
  CHECK(view["result"]["winner"] == "waiter");
  CHECK(status_of([&] { m.choose(id, 0); }) == 409);
  CHECK(transcript_from_text(m.transcript(id)).moves.size() == 4);
}

TEST_CASE("errors map to HTTP statuses") {
  TempDir dir;
  SessionManager m(dir.path);
  CHECK(status_of([&] { m.state("nope"); }) == 404);
  CHECK(status_of([&] { m.choose("nope", 0); }) == 404);
  CHECK(status_of([&] { m.create({{"n", 1}, {"goal", "clique:2"}, {"waiter", "random"}}); }) == 400);
  CHECK(status_of([&] { m.create({{"n", 7}, {"goal", "factor:3"}, {"waiter", "random"}}); }) == 400);
  CHECK(status_of([&] { m.create({{"n", 7}, {"goal", "clique:3"}, {"waiter", "oracle"}}); }) == 400);
  CHECK(status_of([&] { m.create({{"n", 8}, {"goal", "clique:3"}, {"waiter", "solver_optimal"}}); }) == 400);
  CHECK(status_of([&] { m.create(json::array()); }) == 400);
  const json c = m.create(builder_config());
  const std::string id = c["id"];
  const EdgeIndex a = c["offer"][0], b = c["offer"][1];
  EdgeIndex other = 0;
  while (other == a || other == b) ++other;
  CHECK(status_of([&] { m.choose(id, other); }) == 409);
  CHECK(status_of([&] { m.choose(id, 999); }) == 400);
  CHECK(status_of([&] { m.choose(id, json::array({3, 3})); }) == 400);
  CHECK(status_of([&] { m.choose(id, "x"); }) == 400);
  const Edge e = Edge::from_index(b);
  const json next = m.choose(id, json::array({e.v, e.u}));
  CHECK(next["round"] == 1);
}

TEST_CASE("sessions survive a restart") {
  TempDir dir;
  std::string id_builder, id_random;
  json before_builder, before_random;
  {
    SessionManager m(dir.path);
    json c = m.create(builder_config());
    id_builder = c["id"];
    c = m.choose(id_builder, c["offer"][1]);
    m.choose(id_builder, c["offer"][0]);
    json r = m.create({{"n", 8}, {"goal", "clique:3"}, {"waiter", "random"}});
    id_random = r["id"];
    for (int i = 0; i < 3 && r["type"] == "offer"; ++i) r = m.choose(id_random, r["offer"][i % 2]);
    before_builder = m.state(id_builder);
    before_random = m.state(id_random);
  }
  SessionManager again(dir.path);
  CHECK(again.size() == 2);
  CHECK(again.state(id_builder) == before_builder);
  CHECK(again.state(id_random) == before_random);
  const json last = play_out(again, id_builder, {{"type", "offer"}, {"offer", before_builder["offer"]}});
  CHECK(last["result"]["winner"] == "waiter");
  CHECK(last["result"]["rounds"] == 4);

  // A tampered transcript is skipped rather than trusted.
  const fs::path t = dir.path / (id_random + ".transcript.json");
  Transcript bad = load_transcript(t.string());
  std::swap(bad.moves[0].offer.first, bad.moves[1].offer.first);
  save_transcript(bad, t.string());
  SessionManager third(dir.path);
  CHECK(status_of([&] { third.state(id_random); }) == 404);
  CHECK(third.state(id_builder)["result"]["winner"] == "waiter");
}

TEST_CASE("concurrent duplicate submissions apply once") {
  TempDir dir;
  SessionManager m(dir.path);
  const json c = m.create(builder_config());
  const std::string id = c["id"];
  const json edge = c["offer"][0];
  std::atomic<int> ok{0}, conflict{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      try {
        m.choose(id, edge);
        ++ok;
      } catch (const ServiceError& e) {
        if (e.status() == 409) ++conflict;
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(ok == 1);
  CHECK(conflict == 7);
  CHECK(m.state(id)["round"] == 1);
}

TEST_CASE("solver-backed session") {
  TempDir dir;
  SessionManager m(dir.path);
  const json c = m.create({{"n", 4}, {"goal", "clique:2"}, {"waiter", "solver_optimal"}});
  CHECK(c["offer"] == json::array({Edge(0, 1).index(), Edge(0, 2).index()}));
  const json r = m.choose(c["id"], c["offer"][1]);
  CHECK(r["result"]["winner"] == "waiter");
  CHECK(r["result"]["rounds"] == 1);
}

TEST_CASE("listeners see every event") {
  TempDir dir;
  SessionManager m(dir.path);
  const json c = m.create(builder_config());
  const std::string id = c["id"];
  std::vector<json> seen;
  const auto token = m.subscribe(id, [&](const json& e) { seen.push_back(e); });
  const json last = play_out(m, id, c);
  REQUIRE(seen.size() == 5);
  CHECK(seen.front()["round"] == 0);
  CHECK(seen.back() == last);
  m.unsubscribe(id, token);
  CHECK(status_of([&] { m.subscribe("nope", [](const json&) {}); }) == 404);
}

TEST_CASE("dispatch routes") {
  TempDir dir;
  SessionManager m(dir.path);
  const HttpReply created = dispatch(m, "POST", "/sessions", builder_config().dump());
  CHECK(created.status == 201);
  const std::string id = json::parse(created.body)["id"];
  CHECK(dispatch(m, "GET", "/sessions/" + id, "").status == 200);
  CHECK(dispatch(m, "GET", "/sessions/" + id + "/transcript", "").status == 200);
  CHECK(dispatch(m, "GET", "/sessions/unknown", "").status == 404);
  CHECK(dispatch(m, "DELETE", "/sessions/" + id, "").status == 405);
  CHECK(dispatch(m, "GET", "/other", "").status == 404);
  CHECK(dispatch(m, "POST", "/sessions", "{bad json").status == 400);
  CHECK(dispatch(m, "POST", "/sessions/" + id + "/choice", "{}").status == 400);
  const HttpReply err = dispatch(m, "POST", "/sessions/" + id + "/choice", R"({"edge": 20})");
  CHECK(err.status == 409);
  CHECK(json::parse(err.body)["status"] == 409);
  const json offer = json::parse(dispatch(m, "GET", "/sessions/" + id, "").body)["offer"];
  const HttpReply ok = dispatch(m, "POST", "/sessions/" + id + "/choice", json{{"edge", offer[0]}}.dump());
  CHECK(ok.status == 200);
  CHECK(json::parse(ok.body)["round"] == 1);
}

TEST_CASE("HTTP and WebSocket transport") {
  TempDir dir;
  SessionManager m(dir.path);
  HttpServer server(m, "127.0.0.1", 0);
  server.start();
  const unsigned short port = server.port();
  REQUIRE(port != 0);

  auto [status, body] = request(port, http::verb::post, "/sessions", builder_config().dump());
  REQUIRE(status == 201);
  const json created = json::parse(body);
  const std::string id = created["id"];
  CHECK(request(port, http::verb::get, "/sessions/nope").first == 404);

  boost::asio::io_context io;
  websocket::stream<tcp::socket> ws(io);
  ws.next_layer().connect(tcp::endpoint(boost::asio::ip::make_address("127.0.0.1"), port));
  ws.handshake("127.0.0.1", "/sessions/" + id + "/stream");
  beast::flat_buffer buffer;
  ws.read(buffer);
  const json first = json::parse(beast::buffers_to_string(buffer.data()));
  CHECK(first["type"] == "offer");
  CHECK(first["offer"] == created["offer"]);
  buffer.clear();

  std::tie(status, body) =
      request(port, http::verb::post, "/sessions/" + id + "/choice", json{{"edge", created["offer"][0]}}.dump());
  CHECK(status == 200);
  ws.read(buffer);
  const json pushed = json::parse(beast::buffers_to_string(buffer.data()));
  CHECK(pushed == json::parse(body));
  CHECK(pushed["round"] == 1);

  std::tie(status, body) = request(port, http::verb::get, "/sessions/" + id);
  CHECK(status == 200);
  CHECK(json::parse(body)["round"] == 1);

  server.stop();
  beast::error_code ec;
  buffer.clear();
  ws.read(buffer, ec);
  CHECK(ec);
}
