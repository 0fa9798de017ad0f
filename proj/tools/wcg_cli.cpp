// wcg: command-line front end for the game laboratory.

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "wcg/bounds.hpp"
#include "wcg/detectors.hpp"
#include "wcg/lemma_lab.hpp"
#include "wcg/service/http_server.hpp"
#include "wcg/sim.hpp"
#include "wcg/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

unsigned default_workers() {
  if (const char* env = std::getenv("WCG_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "ignoring WCG_WORKERS=" << env << "\n";
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw wcg::GameError(wcg::ErrorCode::config_error, "cannot write " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw wcg::GameError(wcg::ErrorCode::config_error, "cannot read " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

ordered_json offer_json(const wcg::Offer& o) { return {o.first.index(), o.second.index()}; }

std::string blocks_text(const std::vector<std::vector<wcg::Vertex>>& blocks) {
  std::string out;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.size(); ++i) out += (i ? " " : "") + std::to_string(b[i]);
    out += "\n";
  }
  return out;
}

wcg::service::HttpServer* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) std::thread([] { g_server->stop(); }).detach();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Waiter-Client clique-factor game laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned workers = default_workers();
  app.add_option("--workers", workers, "Worker threads (default: $WCG_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);

  // solve
  auto* solve = app.add_subcommand("solve", "Exact game value by memoized minimax");
  unsigned n_solve = 0;
  std::string goal_solve;
  bool iso = false;
  std::uint64_t budget = wcg::SolverConfig{}.budget;
  std::string solve_out;
  solve->add_option("--n", n_solve, "Board size")->required();
  solve->add_option("--goal", goal_solve, "factor:<k> or clique:<l>")->required();
  solve->add_flag("--iso", iso, "Merge positions equal up to relabeling");
  solve->add_option("--budget", budget, "Transposition table entries")->check(CLI::PositiveNumber);
  solve->add_option("--out", solve_out, "Write value and principal variation as JSON");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Play many seeded games");
  wcg::SimConfig sim;
  int sim_k = 0;
  std::string sim_goal, sim_out, transcripts_dir;
  std::optional<wcg::Round> round_cap;
  std::optional<std::uint64_t> d_hi;
  std::optional<std::int64_t> pair_thr;
  std::optional<int> event_k;
  std::string event_variant;
  std::size_t neighborhood_cap = 64;
  simulate->add_option("--n", sim.n, "Board size")->required();
  auto* k_opt = simulate->add_option("--k", sim_k, "Shorthand for --goal factor:<k>");
  simulate->add_option("--goal", sim_goal, "factor:<k> or clique:<l>")->excludes(k_opt);
  simulate->add_option("--waiter", sim.waiter, "random | greedy | clique_builder[:l] | factor[:k] | solver_optimal");
  simulate->add_option("--client", sim.client, "random | scripted:<bits>");
  simulate->add_option("--games", sim.games, "Number of games")->required();
  simulate->add_option("--seed", sim.seed, "Master seed")->required();
  simulate->add_option("--round-cap", round_cap, "Per-game round cap");
  simulate->add_option("--out", sim_out, "CSV file; the JSON aggregate goes next to it");
  simulate->add_option("--transcripts", transcripts_dir, "Directory for one transcript per game");
  simulate->add_option("--event-k", event_k, "Clique size for the S(v) detectors");
  simulate->add_option("--d-hi", d_hi, "High-degree threshold");
  simulate->add_option("--pair-threshold", pair_thr, "Counted pairs required at v");
  simulate->add_option("--variant", event_variant, "s2 (good pairs) or s3 (component pairs)");
  simulate->add_option("--neighborhood-cap", neighborhood_cap, "Largest red neighbourhood searched");

  // verify
  auto* verify = app.add_subcommand("verify", "Check the pair lemmas over edge orderings");
  verify->require_subcommand(1);
  int verify_k = 0;
  std::optional<std::uint64_t> samples;
  std::uint64_t verify_seed = 0;
  for (const char* name : {"good-pairs", "component-pairs"}) {
    auto* sub = verify->add_subcommand(name, std::string("Survey of ") + name);
    sub->add_option("--k", verify_k, "Clique size")->required();
    sub->add_option("--samples", samples, "Sample this many random orderings instead of all");
    sub->add_option("--seed", verify_seed, "Seed for sampling");
  }

  // construct
  auto* construct = app.add_subcommand("construct", "Build extremal orderings");
  construct->require_subcommand(1);
  auto* doubling = construct->add_subcommand("doubling", "Component-doubling ordering on 2^t vertices");
  int t = 0;
  std::string construct_out;
  doubling->add_option("--t", t, "log2 of the clique size")->required();
  doubling->add_option("--out", construct_out, "Ordering file (one edge per line)");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Union bound in log2 space");
  std::int64_t bounds_k = 0;
  std::string bounds_variant = "s2";
  bounds->add_option("--k", bounds_k, "Clique size")->required();
  bounds->add_option("--variant", bounds_variant, "s2 or s3")->check(CLI::IsMember({"s2", "s3"}));

  // detect
  auto* detect = app.add_subcommand("detect", "Run detectors on a transcript");
  detect->require_subcommand(1);
  std::string detect_transcript;
  int detect_k = 0;
  auto* detect_factor = detect->add_subcommand("factor", "Red K_k-factor");
  detect_factor->add_option("--transcript", detect_transcript, "Transcript file")->required();
  detect_factor->add_option("--k", detect_k, "Block size (default: the transcript's factor goal)");
  auto* detect_events_cmd = detect->add_subcommand("events", "X(v), Y(v), S(v) per vertex");
  std::optional<wcg::Vertex> detect_v;
  std::uint64_t detect_dhi = 0;
  std::int64_t detect_thr = 0;
  std::string detect_variant = "s2";
  detect_events_cmd->add_option("--transcript", detect_transcript, "Transcript file")->required();
  detect_events_cmd->add_option("--k", detect_k, "Clique size")->required();
  detect_events_cmd->add_option("--v", detect_v, "Single vertex (default: all)");
  detect_events_cmd->add_option("--d-hi", detect_dhi, "High-degree threshold")->required();
  detect_events_cmd->add_option("--pair-threshold", detect_thr, "Counted pairs required")->required();
  detect_events_cmd->add_option("--variant", detect_variant, "s2 or s3")->check(CLI::IsMember({"s2", "s3"}));
  detect_events_cmd->add_option("--neighborhood-cap", neighborhood_cap, "Largest red neighbourhood searched");

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP + WebSocket play server");
  std::string address = "127.0.0.1", data_dir = "sessions";
  unsigned short port = 8080;
  serve->add_option("--address", address, "Listen address");
  serve->add_option("--port", port, "Listen port (0 = any)");
  serve->add_option("--data-dir", data_dir, "Session directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*solve) {
      const auto goal = wcg::GoalSpec::parse(goal_solve);
      const auto start = std::chrono::steady_clock::now();
      wcg::Solver solver(n_solve, goal, {iso, budget, workers});
      const wcg::GameValue value = solver.solve();
      const auto pv = solver.principal_variation(wcg::Board(n_solve));
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::cout << value.to_string() << "\n";
      std::cout << "principal variation:";
      if (pv.empty()) std::cout << " none";
      for (const auto& [offer, choice] : pv) {
        std::cout << " [" << offer.first.index() << "," << offer.second.index() << "]->" << choice.index();
      }
      std::cout << "\nstates: " << solver.stats().states << "\nwall time: " << secs << " s\n";
      if (!solve_out.empty()) {
        ordered_json doc;
        doc["n"] = n_solve;
        doc["goal"] = goal.to_string();
        doc["value"] = value.to_string();
        doc["waiter_wins"] = value.waiter_wins;
        if (value.waiter_wins) doc["rounds"] = value.rounds;
        doc["isomorphism"] = iso;
        auto line = ordered_json::array();
        for (const auto& [offer, choice] : pv) line.push_back({{"offer", offer_json(offer)}, {"client", choice.index()}});
        doc["principal_variation"] = line;
        write_file(solve_out, doc.dump(2) + "\n");
      }
      return 0;
    }

    if (*simulate) {
      sim.goal = sim_k ? wcg::GoalSpec::clique_factor(sim_k)
                       : wcg::GoalSpec::parse(sim_goal.empty() ? "factor:3" : sim_goal);
      sim.round_cap = round_cap;
      sim.workers = workers;
      sim.keep_transcripts = !transcripts_dir.empty();
      if (event_k || d_hi || pair_thr || !event_variant.empty()) {
        wcg::EventParams e;
        e.k = event_k.value_or(sim.goal.size);
        e.variant = wcg::parse_event_variant(event_variant.empty() ? "s2" : event_variant);
        e.d_hi = d_hi.value_or(wcg::degree_threshold(e.k, e.variant));
        e.pair_threshold = pair_thr.value_or(wcg::pair_threshold(e.k, e.variant));
        e.neighborhood_cap = neighborhood_cap;
        sim.events = e;
      }
      const wcg::StatsReport report = wcg::run_games(sim);
      if (!sim_out.empty()) {
        write_file(sim_out, report.to_csv());
        write_file(fs::path(sim_out).replace_extension(".json").string(), report.to_json());
      }
      if (!transcripts_dir.empty()) {
        fs::create_directories(transcripts_dir);
        for (const auto& r : report.records) {
          wcg::save_transcript(*r.transcript,
                               (fs::path(transcripts_dir) / ("game_" + std::to_string(r.index) + ".json")).string());
        }
      }
      std::cout << report.to_json();
      return 0;
    }

    if (*verify) {
      const bool good = verify->got_subcommand("good-pairs");
      const wcg::SurveyMode mode =
          samples ? wcg::SurveyMode::sampled(*samples, verify_seed) : wcg::SurveyMode::all();
      const wcg::PairSurvey s =
          good ? wcg::survey_good_pairs(verify_k, mode, workers) : wcg::survey_component_pairs(verify_k, mode, workers);
      std::cout << "k: " << s.k << "\n"
                << "mode: " << (s.exhaustive ? "exhaustive" : "sampled (seed " + std::to_string(s.seed) + ")") << "\n"
                << "orderings: " << s.orderings << "\n"
                << "minimum: " << s.min_of_max << "\n"
                << (good ? "required: " : "formula: ") << s.required << "\n"
                << "good-pair total mismatches: " << s.sum_violations << "\n"
                << "witness:";
      for (auto [a, b] : s.witness.edges) std::cout << " " << a << b;
      std::cout << "\n";
      if (good && s.exhaustive && !s.holds()) {
        std::cerr << "good-pair lemma fails for k = " << s.k << "\n";
        return 1;
      }
      if (s.sum_violations != 0) {
        std::cerr << "good-pair totals differ from C(k,3)\n";
        return 1;
      }
      return 0;
    }

    if (*construct) {
      const wcg::EdgeOrdering o = wcg::doubling_ordering(t);
      const auto counts = wcg::component_pair_counts(o.timeline());
      if (construct_out.empty()) {
        std::cout << o.to_text();
      } else {
        write_file(construct_out, o.to_text());
      }
      std::cerr << "k = " << o.k << ", component pairs per vertex: " << counts.front() << "\n";
      return 0;
    }

    if (*bounds) {
      const auto variant = wcg::parse_event_variant(bounds_variant);
      const wcg::BoundReport r = wcg::union_bound_value(bounds_k, variant);
      ordered_json doc;
      doc["k"] = r.k;
      doc["variant"] = wcg::to_string(r.variant);
      doc["log2_degree_cap"] = r.log2_degree_cap;
      doc["log2_index_set"] = r.log2_index_set;
      doc["index_set_exact"] = r.index_set_exact;
      doc["log2_event"] = r.log2_event;
      doc["log2_union"] = r.log2_union;
      doc["log2_target"] = r.log2_target;
      doc["below_target"] = r.below_target;
      std::cout << doc.dump(2) << "\n";
      return 0;
    }

    if (*detect) {
      const wcg::Transcript tr = wcg::transcript_from_text(read_file(detect_transcript));
      const wcg::Board board = wcg::replay(tr);
      if (detect->got_subcommand("factor")) {
        int k = detect_k;
        if (k == 0) {
          if (tr.goal.kind != wcg::GoalSpec::Kind::clique_factor) {
            throw wcg::GameError(wcg::ErrorCode::config_error, "--k required for non-factor transcripts");
          }
          k = tr.goal.size;
        }
        const auto witness = wcg::find_red_factor(board, k);
        if (!witness) {
          std::cout << "none\n";
        } else {
          std::cout << blocks_text(*witness);
        }
        return 0;
      }
      wcg::EventParams p;
      p.k = detect_k;
      p.d_hi = detect_dhi;
      p.pair_threshold = detect_thr;
      p.variant = wcg::parse_event_variant(detect_variant);
      p.neighborhood_cap = neighborhood_cap;
      ordered_json doc;
      doc["n"] = board.n();
      doc["k"] = p.k;
      doc["d_hi"] = p.d_hi;
      doc["pair_threshold"] = p.pair_threshold;
      doc["variant"] = wcg::to_string(p.variant);
      auto rows = ordered_json::array();
      std::uint64_t s_total = 0;
      auto report = [&](wcg::Vertex v) {
        const auto r = wcg::detect_events(board, v, p);
        s_total += r.s;
        rows.push_back({{"v", r.v}, {"x", r.x}, {"y", r.y}, {"s", r.s}, {"counted_pairs", r.counted_pairs},
                        {"witness", r.witness}});
      };
      if (detect_v) {
        if (*detect_v >= board.n()) throw wcg::GameError(wcg::ErrorCode::vertex_out_of_range, "--v");
        report(*detect_v);
      } else {
        for (wcg::Vertex v = 0; v < board.n(); ++v) report(v);
      }
      doc["s_count"] = s_total;
      doc["vertices"] = rows;
      std::cout << doc.dump(2) << "\n";
      return 0;
    }

    if (*serve) {
      wcg::service::SessionManager sessions(data_dir, {false, wcg::SolverConfig{}.budget, workers});
      wcg::service::HttpServer server(sessions, address, port);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.start();
      std::cout << "listening on " << address << ":" << server.port() << std::endl;
      server.wait();
      g_server = nullptr;
      return 0;
    }
  } catch (const wcg::GameError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const wcg::service::ServiceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
