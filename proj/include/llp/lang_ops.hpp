#pragma once

#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "llp/automaton.hpp"
#include "llp/automaton_io.hpp"
#include "llp/error.hpp"

namespace llp {

/// Finite event sequence; the empty trace is epsilon.
using Trace = std::vector<EventId>;
using TraceSet = std::set<Trace>;

inline constexpr std::string_view epsilon_token = "<eps>";

inline std::string format_trace(const Alphabet& sigma, const Trace& t) {
  if (t.empty()) return std::string(epsilon_token);
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ' ';
    out += sigma.name(t[i]);
  }
  return out;
}

inline Trace parse_trace(const Alphabet& sigma, std::string_view text) {
  Trace t;
  const auto tok = detail::split_tokens(text);
  if (tok.size() == 1 && tok[0] == epsilon_token) return t;
  for (const auto& name : tok) {
    if (name == epsilon_token) throw FormatError("'<eps>' must stand alone");
    t.push_back(sigma.at(name));
  }
  return t;
}

/// State reached by `t`, or no_state when t is not in L(a).
inline StateId run(const Automaton& a, const Trace& t) {
  if (a.is_empty()) return no_state;
  StateId s = a.initial();
  for (EventId e : t) {
    s = a.successor(s, e);
    if (s == no_state) return no_state;
  }
  return s;
}

inline bool generates(const Automaton& a, const Trace& t) { return run(a, t) != no_state; }

inline bool accepts(const Automaton& a, const Trace& t) {
  const StateId s = run(a, t);
  return s != no_state && a.is_marked(s);
}

/// Re-rooted copy recognizing L(a)/s.
inline Automaton post_language(const Automaton& a, const Trace& s) {
  const StateId q = run(a, s);
  if (q == no_state)
    throw TraceNotInLanguage("trace '" + format_trace(a.alphabet(), s) + "' is not in L(G)");
  Automaton out = a;
  out.set_initial(q);
  return out;
}

/// Traces of L(a) (or L_m(a) when `marked_only`) of length at most n.
inline TraceSet truncate(const Automaton& a, std::size_t n, bool marked_only = false) {
  TraceSet out;
  if (a.is_empty()) return out;
  std::vector<std::pair<Trace, StateId>> layer{{Trace{}, a.initial()}};
  for (std::size_t depth = 0;; ++depth) {
    std::vector<std::pair<Trace, StateId>> next;
    for (auto& [t, s] : layer) {
      if (!marked_only || a.is_marked(s)) out.insert(t);
      if (depth == n) continue;
      for (const auto& e : a.edges(s)) {
        Trace u = t;
        u.push_back(e.event);
        next.emplace_back(std::move(u), e.target);
      }
    }
    if (depth == n || next.empty()) break;
    layer = std::move(next);
  }
  return out;
}

inline TraceSet prefix_closure(const TraceSet& ts) {
  TraceSet out;
  for (const auto& t : ts)
    for (std::size_t k = 0; k <= t.size(); ++k) out.emplace(t.begin(), t.begin() + k);
  return out;
}

}  // namespace llp
