#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "llp/llp.hpp"

namespace llp::cli {

/// Process exit codes.
enum Exit : int { ok = 0, failure = 1, parse_error = 2, empty_supremal = 3, runtime_error = 4 };

struct CommandConfig {
  std::string plant;
  std::string spec;
  Attitude attitude = Attitude::optimistic;
  unsigned n = 1;
  std::uint64_t seed = 0;
  std::size_t steps = 1000;
  std::string events;  // scripted source; empty means random unless interactive
  bool interactive = false;
  std::string vlp = "off";  // off | tree | state | recursive
  bool combined_rule = false;
  std::string out;            // main output file; empty means the output stream
  std::string expansion_out;  // optional expansion CSV

  atc::AtcConfig atc;
  std::string emit_dir;
  bool count_states = false;
  bool atc_bounds = false;
  bool atc_witness = false;
  std::size_t budget = 10'000'000;
};

namespace detail {

/// Writes to `path`, or to `fallback` when the path is empty.
template <class F>
void with_output(const std::string& path, std::ostream& fallback, F&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path + "'");
  write(f);
}

inline std::pair<Automaton, Automaton> load_pair(const CommandConfig& cfg) {
  if (cfg.plant.empty() || cfg.spec.empty()) throw ConfigError("--plant and --spec are required");
  return {load_automaton(cfg.plant), load_automaton(cfg.spec)};
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const FormatError& e) {
    err << "parse error: " << e.what() << '\n';
    return parse_error;
  } catch (const ReferenceError& e) {
    err << "parse error: " << e.what() << '\n';
    return parse_error;
  } catch (const NondeterminismError& e) {
    err << "parse error: " << e.what() << '\n';
    return parse_error;
  } catch (const AlphabetError& e) {
    err << "parse error: " << e.what() << '\n';
    return parse_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return failure;
  }
}

/// Closed-loop policy for the selected supervisor family.
inline StatePolicy make_policy(const CommandConfig& cfg, const Recognizer& r) {
  if (cfg.vlp == "off") return llp_policy(r, cfg.attitude, cfg.n);
  auto plant = std::make_shared<RecognizerPlant>(r);
  if (cfg.vlp == "tree") {
    VlpOptions opt{cfg.attitude == Attitude::optimistic, cfg.combined_rule};
    auto eval = std::make_shared<VlpEvaluator<RecognizerPlant>>(*plant, opt);
    const unsigned n = cfg.n;
    return [plant, eval, n](StateId q) { return eval->decide(q, n); };
  }
  if (cfg.vlp == "state") {
    auto sup = std::make_shared<VlpsSupervisor<RecognizerPlant>>(*plant, VlpsOptions{});
    return [plant, sup](StateId q) { return sup->decide(q); };
  }
  if (cfg.vlp == "recursive") {
    const Attitude a = cfg.attitude;
    const unsigned n = cfg.n;
    return [plant, a, n](StateId q) { return cost_tree_decision(*plant, cost_tree_initial(*plant, q, n, a)); };
  }
  throw ConfigError("unknown --vlp mode '" + cfg.vlp + "'");
}

inline Supervisor<StateId> make_supervisor(const CommandConfig& cfg, const RecognizerPlant& plant) {
  if (cfg.vlp == "off") return llp_supervisor(plant, cfg.attitude, cfg.n);
  if (cfg.vlp == "tree") return vlp_supervisor(plant, cfg.n, VlpOptions{cfg.attitude == Attitude::optimistic, cfg.combined_rule});
  if (cfg.vlp == "state") return vlps_supervisor(plant);
  if (cfg.vlp == "recursive") return cost_tree_supervisor(plant, cfg.attitude, cfg.n);
  throw ConfigError("unknown --vlp mode '" + cfg.vlp + "'");
}

}  // namespace detail

/// Writes the K-up recognizer. An empty K-up is written as an automaton with
/// no states and exits with `empty_supremal`.
inline int cmd_synthesize(const CommandConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto [plant, spec] = detail::load_pair(cfg);
    const Automaton kup = supremal_controllable(plant, spec);
    detail::with_output(cfg.out, out, [&](std::ostream& o) { o << serialize_automaton(kup); });
    if (kup.is_empty()) {
      err << "supremal controllable sublanguage is empty\n";
      return static_cast<int>(empty_supremal);
    }
    return static_cast<int>(ok);
  });
}

/// Runs one supervised session and writes the trace CSV.
inline int cmd_simulate(const CommandConfig& cfg, std::istream& in, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (cfg.n < 1) throw ConfigError("--n must be at least 1");
    if (cfg.interactive && !cfg.events.empty()) throw ConfigError("--events and --interactive are exclusive");
    const auto [plant, spec] = detail::load_pair(cfg);
    const Recognizer r = build_recognizer(plant, spec);
    const RecognizerPlant rp(r);
    EventSource source;
    if (cfg.interactive) source = interactive_source(in, out);
    else if (!cfg.events.empty()) source = scripted_source(parse_trace(r.alphabet(), read_text_file(cfg.events)));
    else source = random_source(cfg.seed);
    SupervisionSession<RecognizerPlant> session(rp, detail::make_supervisor(cfg, rp));
    const TraceLog& log = session.run(source, cfg.steps);
    detail::with_output(cfg.out, out, [&](std::ostream& o) { write_trace_csv(o, r.alphabet(), log); });
    if (!cfg.expansion_out.empty())
      detail::with_output(cfg.expansion_out, out, [&](std::ostream& o) { write_expansion_csv(o, log); });
    return static_cast<int>(log.any_runtime_error() ? runtime_error : ok);
  });
}

inline int cmd_bounds(const CommandConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto [plant, spec] = detail::load_pair(cfg);
    const WindowBoundReport rep = window_bounds(plant, spec);
    detail::with_output(cfg.out, out, [&](std::ostream& o) { print_bounds_table(o, rep); });
    return static_cast<int>(ok);
  });
}

/// Verdict of the closed loop against the prefix closure of K-up.
inline std::string compare_verdict(const Automaton& closed, const Automaton& kup_closure, std::optional<Trace>& witness,
                                   const Alphabet*& witness_alphabet) {
  const LanguageCheck sub = language_subset(closed, kup_closure);
  const LanguageCheck sup = language_subset(kup_closure, closed);
  if (sub && sup) return "EQUAL";
  if (sub) {
    witness = sup.witness;
    witness_alphabet = &kup_closure.alphabet();
    return "SUBSET";
  }
  witness = sub.witness;
  witness_alphabet = &closed.alphabet();
  return sup ? "SUPERSET" : "INCOMPARABLE";
}

/// Builds the closed loop of the chosen supervisor and compares it with the
/// prefix closure of K-up. Prints the verdict and, on difference, a shortest
/// witness trace.
inline int cmd_compare(const CommandConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (cfg.n < 1) throw ConfigError("--n must be at least 1");
    const auto [plant, spec] = detail::load_pair(cfg);
    const Recognizer r = build_recognizer(plant, spec);
    const ClosedLoop loop = closed_loop(r, detail::make_policy(cfg, r));
    const Automaton kup = generated(supremal_controllable(r));
    std::optional<Trace> witness;
    const Alphabet* sigma = nullptr;
    const std::string verdict = compare_verdict(loop.automaton, kup, witness, sigma);
    detail::with_output(cfg.out, out, [&](std::ostream& o) {
      o << verdict << '\n';
      if (witness) o << "witness: " << format_trace(*sigma, *witness) << '\n';
      if (loop.any_runtime_error()) o << "runtime errors: yes\n";
    });
    return static_cast<int>(ok);
  });
}

inline int cmd_atc(const CommandConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    cfg.atc.validate();
    bool did = false;
    if (!cfg.emit_dir.empty()) {
      did = true;
      std::filesystem::create_directories(cfg.emit_dir);
      const std::filesystem::path dir(cfg.emit_dir);
      save_automaton(atc::adjacent_controllers(cfg.atc), (dir / "G0.aut").string());
      for (unsigned i = 1; i <= cfg.atc.max_aircraft; ++i)
        save_automaton(atc::aircraft_subplant(i), (dir / ("G" + std::to_string(i) + ".aut")).string());
      out << "wrote " << cfg.atc.max_aircraft + 1 << " subplant files to " << cfg.emit_dir << '\n';
    }
    if (cfg.count_states) {
      did = true;
      try {
        const std::size_t n = atc::count_states(atc::AtcPlant(cfg.atc), cfg.budget);
        out << "plant states " << n << '\n';
      } catch (const BudgetExceeded& e) {
        out << "plant states > " << e.partial_count << " (budget exceeded)\n";
      }
    }
    if (cfg.atc_witness) {
      did = true;
      const auto w = atc::witness_kup_empty(cfg.atc);
      out << "witness " << (w ? format_trace(atc::atc_alphabet(cfg.atc.max_aircraft), *w) : std::string("none")) << '\n';
    }
    if (cfg.atc_bounds) {
      did = true;
      ExploreOptions opt;
      opt.budget = cfg.budget;
      const Recognizer r = explore(atc::AtcSystem(cfg.atc), opt);
      out << "recognizer states " << r.num_states() << '\n';
      print_bounds_table(out, window_bounds(r));
    }
    if (!did) throw ConfigError("atc: nothing to do (use --emit-dir, --count-states, --witness or --bounds)");
    return static_cast<int>(ok);
  });
}

}  // namespace llp::cli
