#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "llp/automaton.hpp"
#include "llp/error.hpp"
#include "llp/lookahead.hpp"
#include "llp/recognizer.hpp"
#include "llp/synthesis.hpp"

namespace llp {

/// A window measure: a natural number or one of several reasons it has none.
struct BoundValue {
  enum class Kind : std::uint8_t {
    value,
    cycle,         // unbounded: a cycle inside an admissible segment
    empty,         // the measure ranges over an empty set
    no_kmc,        // K_mc is empty
    precondition,  // the guarantee's hypothesis fails
  };
  Kind kind = Kind::empty;
  unsigned n = 0;

  static BoundValue of(unsigned v) { return {Kind::value, v}; }
  static BoundValue cycle() { return {Kind::cycle, 0}; }
  static BoundValue empty() { return {Kind::empty, 0}; }
  static BoundValue no_kmc() { return {Kind::no_kmc, 0}; }
  static BoundValue precondition() { return {Kind::precondition, 0}; }

  bool defined() const { return kind == Kind::value; }
  unsigned value() const { return n; }
  BoundValue plus(unsigned k) const { return defined() ? of(n + k) : *this; }

  std::string str() const {
    switch (kind) {
      case Kind::value: return std::to_string(n);
      case Kind::cycle: return "undefined(cycle)";
      case Kind::empty: return "none(empty)";
      case Kind::no_kmc: return "undefined(no-kmc)";
      default: return "undefined(precondition)";
    }
  }
  bool operator==(const BoundValue&) const = default;
};

namespace detail {

/// Longest path length (in edges) in the subgraph induced by `in` on edges
/// accepted by `edge_ok`, over paths starting anywhere in `in`. Cycle -> nullopt.
template <class EdgeOk>
std::optional<unsigned> longest_path(const Automaton& a, const std::vector<char>& in, EdgeOk edge_ok) {
  const std::size_t n = a.num_states();
  std::vector<unsigned> indeg(n, 0);
  for (StateId s = 0; s < n; ++s)
    if (in[s])
      for (const auto& e : a.edges(s))
        if (in[e.target] && edge_ok(e)) ++indeg[e.target];
  std::deque<StateId> queue;
  std::vector<unsigned> dist(n, 0);
  std::size_t members = 0, done = 0;
  for (StateId s = 0; s < n; ++s)
    if (in[s]) {
      ++members;
      if (!indeg[s]) queue.push_back(s);
    }
  unsigned best = 0;
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    ++done;
    best = std::max(best, dist[s]);
    for (const auto& e : a.edges(s))
      if (in[e.target] && edge_ok(e)) {
        dist[e.target] = std::max(dist[e.target], dist[s] + 1);
        if (--indeg[e.target] == 0) queue.push_back(e.target);
      }
  }
  if (done != members) return std::nullopt;
  return best;
}

/// Longest source-to-target path whose interior lies in `inter`. Sources that
/// are themselves targets contribute length 0 when `zero_ok`.
inline BoundValue longest_segment(const Automaton& g, const std::vector<char>& sources,
                                  const std::vector<char>& targets, const std::vector<char>& inter,
                                  bool zero_ok) {
  const std::size_t n = g.num_states();
  // Interior states reachable from a source through interior states.
  std::vector<char> fwd(n, 0);
  std::deque<StateId> queue;
  for (StateId s = 0; s < n; ++s)
    if (sources[s])
      for (const auto& e : g.edges(s))
        if (inter[e.target] && !fwd[e.target]) {
          fwd[e.target] = 1;
          queue.push_back(e.target);
        }
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    for (const auto& e : g.edges(s))
      if (inter[e.target] && !fwd[e.target]) {
        fwd[e.target] = 1;
        queue.push_back(e.target);
      }
  }
  // Interior states that reach a target through interior states.
  std::vector<std::vector<StateId>> pred(n);
  for (StateId s = 0; s < n; ++s)
    if (inter[s])
      for (const auto& e : g.edges(s))
        if (inter[e.target]) pred[e.target].push_back(s);
  std::vector<char> bwd(n, 0);
  for (StateId s = 0; s < n; ++s)
    if (inter[s])
      for (const auto& e : g.edges(s))
        if (targets[e.target] && !bwd[s]) {
          bwd[s] = 1;
          queue.push_back(s);
        }
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    for (StateId p : pred[s])
      if (!bwd[p]) {
        bwd[p] = 1;
        queue.push_back(p);
      }
  }
  std::vector<char> live(n, 0);
  for (StateId s = 0; s < n; ++s) live[s] = fwd[s] && bwd[s];
  if (!longest_path(g, live, [](const Edge&) { return true; })) return BoundValue::cycle();

  // to_target[s]: longest live-interior path from s ending on a target edge.
  std::vector<int> to_target(n, -1);
  std::vector<char> state(n, 0);  // 0 new, 1 done
  auto eval = [&](auto&& self, StateId s) -> int {
    if (state[s]) return to_target[s];
    int best = -1;
    for (const auto& e : g.edges(s)) {
      if (targets[e.target]) best = std::max(best, 1);
      if (live[e.target]) {
        const int d = self(self, e.target);
        if (d >= 0) best = std::max(best, d + 1);
      }
    }
    state[s] = 1;
    to_target[s] = best;
    return best;
  };
  int best = -1;
  for (StateId s = 0; s < n; ++s) {
    if (!sources[s]) continue;
    if (zero_ok && targets[s]) best = std::max(best, 0);
    for (const auto& e : g.edges(s)) {
      if (targets[e.target]) best = std::max(best, 1);
      if (live[e.target]) {
        const int d = eval(eval, e.target);
        if (d >= 0) best = std::max(best, d + 1);
      }
    }
  }
  if (best < 0) return BoundValue::empty();
  return BoundValue::of(static_cast<unsigned>(best));
}

}  // namespace detail

/// Longest uncontrollable subtrace of the generated language (reachable states).
inline BoundValue n_u(const Automaton& a) {
  if (a.is_empty()) return BoundValue::of(0);
  auto len = detail::longest_path(a, reachable(a), [&](const Edge& e) { return !a.alphabet().controllable(e.event); });
  return len ? BoundValue::of(*len) : BoundValue::cycle();
}

/// Longest uncontrollable subtrace inside K-bar (legal recognizer states).
inline BoundValue n_u_legal(const Recognizer& r) {
  if (!r.any_legal()) return BoundValue::empty();
  std::vector<char> legal(r.num_states());
  for (StateId q = 0; q < r.num_states(); ++q) legal[q] = r.legal(q);
  const Automaton& g = r.graph();
  auto len = detail::longest_path(g, legal, [&](const Edge& e) { return !g.alphabet().controllable(e.event); });
  return len ? BoundValue::of(*len) : BoundValue::cycle();
}

/// States whose active set has no uncontrollable event (L_c).
inline std::vector<char> compute_lc(const Automaton& g) {
  std::vector<char> out(g.num_states());
  for (StateId s = 0; s < g.num_states(); ++s) out[s] = !g.has_uncontrollable(s);
  return out;
}

/// K_mc: legal-marked recognizer states in L_c.
inline std::vector<char> compute_kmc(const Recognizer& r) {
  std::vector<char> out(r.num_states());
  for (StateId q = 0; q < r.num_states(); ++q)
    out[q] = r.legality(q) == Legality::legal_marked && !r.graph().has_uncontrollable(q);
  return out;
}

/// K_fc-bar: legal recognizer states with an uncontrollable step to an illegal state.
inline std::vector<char> compute_kfcbar(const Recognizer& r) {
  const Automaton& g = r.graph();
  std::vector<char> out(r.num_states(), 0);
  for (StateId q = 0; q < r.num_states(); ++q) {
    if (!r.legal(q)) continue;
    for (const auto& e : g.edges(q))
      if (!g.alphabet().controllable(e.event) && !r.legal(e.target)) out[q] = 1;
  }
  return out;
}

inline BoundValue n_mcfc(const Recognizer& r) {
  if (!r.any_legal()) return BoundValue::empty();
  const auto kmc = compute_kmc(r);
  const auto kfc = compute_kfcbar(r);
  std::vector<char> sources = kmc, inter(r.num_states());
  sources[r.initial()] = 1;
  for (StateId q = 0; q < r.num_states(); ++q) inter[q] = r.legal(q) && !kmc[q] && !kfc[q];
  return detail::longest_segment(r.graph(), sources, kfc, inter, true);
}

inline BoundValue n_mcmc(const Recognizer& r) {
  if (!r.any_legal()) return BoundValue::empty();
  const auto kmc = compute_kmc(r);
  if (std::none_of(kmc.begin(), kmc.end(), [](char c) { return c; })) return BoundValue::no_kmc();
  std::vector<char> sources = kmc, inter(r.num_states());
  sources[r.initial()] = 1;
  for (StateId q = 0; q < r.num_states(); ++q) inter[q] = r.legal(q) && !kmc[q];
  return detail::longest_segment(r.graph(), sources, kmc, inter, true);
}

/// K-bar = closure(K_mc): every legal state reaches a K_mc state through legal states.
inline bool closure_equals_kmc(const Recognizer& r) {
  if (!r.any_legal()) return true;
  const auto kmc = compute_kmc(r);
  std::vector<char> legal(r.num_states());
  for (StateId q = 0; q < r.num_states(); ++q) legal[q] = r.legal(q);
  Automaton g = r.graph();
  for (StateId q = 0; q < g.num_states(); ++q) g.set_marked(q, kmc[q]);
  const auto co = coreachable(g, legal);
  for (StateId q = 0; q < r.num_states(); ++q)
    if (legal[q] && !co[q]) return false;
  return true;
}

/// K with every trace removed that extends a point admitting an uncontrollable
/// run of length N-1 inside K-bar. Needs a prefix-closed spec.
inline Automaton pruned_spec(const Automaton& plant, const Automaton& spec, unsigned window) {
  if (window < 1) throw ConfigError("window size must be at least 1");
  if (!spec_prefix_closed(spec)) throw PrecisionError("pruned spec needs a prefix-closed spec");
  const Recognizer r = build_recognizer(plant, spec);
  const Automaton& g = r.graph();
  const std::size_t n = r.num_states();
  // run[q] = longest uncontrollable run from q inside legal states, capped at window.
  std::vector<unsigned> run(n, 0);
  const unsigned need = window - 1;
  for (unsigned k = 1; k <= need; ++k) {
    std::vector<unsigned> next = run;
    for (StateId q = 0; q < n; ++q) {
      if (!r.legal(q)) continue;
      for (const auto& e : g.edges(q))
        if (!g.alphabet().controllable(e.event) && r.legal(e.target) && run[e.target] + 1 >= k)
          next[q] = std::max(next[q], k);
    }
    run = std::move(next);
  }
  std::vector<char> keep(n, 0);
  for (StateId q = 0; q < n; ++q) keep[q] = r.legal(q) && run[q] < need;
  if (need == 0) std::fill(keep.begin(), keep.end(), 0);
  return accessible(restrict(g, keep));
}

enum class SpecCase { prefix_closed, general };

struct WindowBoundReport {
  BoundValue n_u_plant;
  BoundValue n_u_spec;
  BoundValue n_mcfc;
  BoundValue n_mcmc;
  std::map<Attitude, BoundValue> recommended;
  SpecCase applicable_case = SpecCase::general;
  bool kup_nonempty = false;
  bool closure_is_kmc = false;
};

inline WindowBoundReport window_bounds(const Recognizer& r) {
  WindowBoundReport rep;
  rep.n_u_plant = r.graph().is_empty() ? BoundValue::of(0) : n_u(r.graph());
  rep.n_u_spec = n_u_legal(r);
  rep.n_mcfc = n_mcfc(r);
  rep.n_mcmc = n_mcmc(r);
  rep.applicable_case = r.any_legal() && r.is_prefix_closed() ? SpecCase::prefix_closed : SpecCase::general;
  rep.closure_is_kmc = closure_equals_kmc(r);
  const auto kup = supremal_states(r);
  rep.kup_nonempty = std::any_of(kup.begin(), kup.end(), [](char c) { return c; });

  if (rep.applicable_case == SpecCase::prefix_closed) {
    const BoundValue a = rep.n_u_plant.plus(1), b = rep.n_u_spec.plus(2);
    if (a.defined() && b.defined()) rep.recommended[Attitude::optimistic] = BoundValue::of(std::min(a.value(), b.value()));
    else rep.recommended[Attitude::optimistic] = a.defined() ? a : b;
    rep.recommended[Attitude::conservative] = rep.n_u_spec.defined() ? b : rep.n_u_plant.plus(2);
  } else {
    // No crossings: any window sees every frontier, so one step suffices.
    rep.recommended[Attitude::optimistic] =
        rep.n_mcfc.kind == BoundValue::Kind::empty ? BoundValue::of(1) : rep.n_mcfc.plus(1);
    rep.recommended[Attitude::conservative] =
        rep.closure_is_kmc ? rep.n_mcmc.plus(1) : BoundValue::precondition();
  }
  return rep;
}

inline WindowBoundReport window_bounds(const Automaton& plant, const Automaton& spec) {
  return window_bounds(build_recognizer(plant, spec));
}

inline BoundValue recommend_window(const Automaton& plant, const Automaton& spec, Attitude a) {
  return window_bounds(plant, spec).recommended.at(a);
}

inline void print_bounds_table(std::ostream& out, const WindowBoundReport& r) {
  auto row = [&](const std::string& name, const std::string& value) {
    out << std::left << std::setw(26) << name << value << '\n';
  };
  row("case", r.applicable_case == SpecCase::prefix_closed ? "I (prefix-closed)" : "II (general)");
  row("N_u(L(G))", r.n_u_plant.str());
  row("N_u(K)", r.n_u_spec.str());
  row("N_mcfc", r.n_mcfc.str());
  row("N_mcmc", r.n_mcmc.str());
  row("K_up nonempty", r.kup_nonempty ? "yes" : "no");
  row("K-bar = closure(K_mc)", r.closure_is_kmc ? "yes" : "no");
  row("recommended optimistic", r.recommended.at(Attitude::optimistic).str());
  row("recommended conservative", r.recommended.at(Attitude::conservative).str());
}

}  // namespace llp
