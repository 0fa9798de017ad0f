#include "wcg/transcript.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wcg {

Board replay(const Transcript& transcript) {
  Board board(transcript.n);
  for (std::size_t i = 0; i < transcript.moves.size(); ++i) {
    const Move& m = transcript.moves[i];
    try {
      board.apply_round(m.offer, m.client);
    } catch (const GameError& e) {
      throw ReplayError(i, e.what());
    }
  }
  return board;
}

std::string to_text(const Transcript& t) {
  std::ostringstream out;
  out << "{\"version\":" << Transcript::kVersion << ",\"n\":" << t.n << ",\"goal\":\""
      << t.goal.to_string() << "\"";
  if (t.seed) out << ",\"seed\":" << *t.seed;
  out << ",\"moves\":[";
  for (std::size_t i = 0; i < t.moves.size(); ++i) {
    const Move& m = t.moves[i];
    out << (i ? ",\n" : "\n") << "{\"offer\":[" << m.offer.first.index() << ","
        << m.offer.second.index() << "],\"client\":" << m.client.index() << "}";
  }
  out << (t.moves.empty() ? "" : "\n") << "]}\n";
  return out.str();
}

namespace {

EdgeIndex read_edge(const nlohmann::json& j, const char* what) {
  if (!j.is_number_unsigned()) {
    throw GameError(ErrorCode::parse_error, std::string(what) + " is not a non-negative integer");
  }
  return j.get<EdgeIndex>();
}

}  // namespace

Transcript transcript_from_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw GameError(ErrorCode::parse_error, e.what());
  }
  if (!doc.is_object()) throw GameError(ErrorCode::parse_error, "transcript is not an object");
  if (doc.value("version", 0) != Transcript::kVersion) {
    throw GameError(ErrorCode::parse_error, "unsupported transcript version");
  }
  Transcript t;
  if (!doc.contains("n") || !doc["n"].is_number_unsigned()) {
    throw GameError(ErrorCode::parse_error, "missing n");
  }
  t.n = doc["n"].get<Vertex>();
  if (!doc.contains("goal") || !doc["goal"].is_string()) {
    throw GameError(ErrorCode::parse_error, "missing goal");
  }
  t.goal = GoalSpec::parse(doc["goal"].get<std::string>());
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw GameError(ErrorCode::parse_error, "bad seed");
    t.seed = doc["seed"].get<std::uint64_t>();
  }
  if (!doc.contains("moves") || !doc["moves"].is_array()) {
    throw GameError(ErrorCode::parse_error, "missing moves");
  }
  const EdgeIndex limit = edge_count(t.n);
  auto checked = [&](EdgeIndex i) {
    if (i >= limit) throw GameError(ErrorCode::parse_error, "edge index " + std::to_string(i) + " out of range");
    return Edge::from_index(i);
  };
  for (const auto& jm : doc["moves"]) {
    if (!jm.is_object() || !jm.contains("offer") || !jm["offer"].is_array() ||
        jm["offer"].size() != 2 || !jm.contains("client")) {
      throw GameError(ErrorCode::parse_error, "malformed move");
    }
    Move m;
    m.offer.first = checked(read_edge(jm["offer"][0], "offer edge"));
    m.offer.second = checked(read_edge(jm["offer"][1], "offer edge"));
    m.client = checked(read_edge(jm["client"], "client edge"));
    t.moves.push_back(m);
  }
  return t;
}

Transcript load_transcript(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GameError(ErrorCode::parse_error, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return transcript_from_text(buf.str());
}

void save_transcript(const Transcript& transcript, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw GameError(ErrorCode::config_error, "cannot write " + tmp);
    out << to_text(transcript);
    out.flush();
    if (!out) throw GameError(ErrorCode::config_error, "short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace wcg
