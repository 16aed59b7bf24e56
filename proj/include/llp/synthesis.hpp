#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "llp/automaton.hpp"
#include "llp/error.hpp"
#include "llp/lang_ops.hpp"
#include "llp/recognizer.hpp"

namespace llp {

/// Recognizer states of K-up: the greatest set of legal states closed under
/// uncontrollable transitions and trim with respect to legal-marked states.
inline std::vector<char> supremal_states(const Recognizer& r) {
  const Automaton& g = r.graph();
  std::vector<char> good(r.num_states(), 0);
  if (!r.any_legal()) return good;
  for (StateId q = 0; q < r.num_states(); ++q) good[q] = r.legal(q);
  for (bool changed = true; changed;) {
    changed = false;
    for (StateId q = 0; q < r.num_states(); ++q) {
      if (!good[q]) continue;
      for (const auto& e : g.edges(q))
        if (!g.alphabet().controllable(e.event) && !good[e.target]) {
          good[q] = 0;
          changed = true;
          break;
        }
    }
    if (!good[g.initial()]) return std::vector<char>(r.num_states(), 0);
    // Trim: reachable through good states and co-reachable to a legal-marked one.
    std::vector<char> acc(r.num_states(), 0);
    std::deque<StateId> queue{g.initial()};
    acc[g.initial()] = 1;
    while (!queue.empty()) {
      const StateId q = queue.front();
      queue.pop_front();
      for (const auto& e : g.edges(q))
        if (good[e.target] && !acc[e.target]) {
          acc[e.target] = 1;
          queue.push_back(e.target);
        }
    }
    const auto co = coreachable(g, acc);
    for (StateId q = 0; q < r.num_states(); ++q) {
      const char keep = acc[q] && co[q];
      if (good[q] && !keep) {
        good[q] = 0;
        changed = true;
      }
    }
    if (!good[g.initial()]) return std::vector<char>(r.num_states(), 0);
  }
  return good;
}

/// Trim recognizer of K-up; the empty automaton when K-up is empty.
inline Automaton supremal_controllable(const Recognizer& r) {
  return restrict(r.graph(), supremal_states(r));
}

inline Automaton supremal_controllable(const Automaton& plant, const Automaton& spec) {
  return supremal_controllable(build_recognizer(plant, spec));
}

/// True iff every reachable, co-reachable state of `spec` is marked.
inline bool spec_prefix_closed(const Automaton& spec) {
  const Automaton t = trim(spec);
  for (StateId s = 0; s < t.num_states(); ++s)
    if (!t.is_marked(s)) return false;
  return true;
}

/// Generator of K-down for a prefix-closed spec: K-bar closed under
/// uncontrollable continuations in L(G). Every state is marked.
inline Automaton infimal_closed_controllable(const Recognizer& r) {
  const Automaton& g = r.graph();
  std::vector<char> keep(r.num_states(), 0);
  if (!r.any_legal()) return Automaton(g.alphabet());
  std::deque<StateId> queue{g.initial()};
  keep[g.initial()] = 1;
  while (!queue.empty()) {
    const StateId q = queue.front();
    queue.pop_front();
    for (const auto& e : g.edges(q)) {
      const bool follow = r.legal(q) ? (r.legal(e.target) || !g.alphabet().controllable(e.event))
                                     : !g.alphabet().controllable(e.event);
      if (follow && !keep[e.target]) {
        keep[e.target] = 1;
        queue.push_back(e.target);
      }
    }
  }
  Automaton out = restrict(g, keep, [&](StateId q, const Edge& e) {
    if (!g.alphabet().controllable(e.event)) return true;
    return r.legal(q) && r.legal(e.target);
  });
  for (StateId s = 0; s < out.num_states(); ++s) out.set_marked(s);
  return out;
}

inline Automaton infimal_closed_controllable(const Automaton& plant, const Automaton& spec) {
  if (!spec_prefix_closed(spec))
    throw PrecisionError("infimal closed controllable superlanguage needs a prefix-closed spec");
  return infimal_closed_controllable(build_recognizer(plant, spec));
}

/// Enabled-event set emitted by a supervisor at one state.
struct ControlDecision {
  std::vector<EventId> enabled;  // sorted
  bool runtime_error = false;

  bool enables(EventId e) const { return std::binary_search(enabled.begin(), enabled.end(), e); }
  bool operator==(const ControlDecision&) const = default;
};

/// L(G, gamma) for a state-feedback policy over recognizer states.
struct ClosedLoop {
  /// Every state marked: the marked language is the closed-loop language.
  Automaton automaton;
  std::vector<StateId> recognizer_state;
  std::vector<char> runtime_error;
  bool any_runtime_error() const {
    return std::find(runtime_error.begin(), runtime_error.end(), 1) != runtime_error.end();
  }
};

using StatePolicy = std::function<ControlDecision(StateId)>;

/// Explores the closed loop, evaluating the policy once per recognizer state.
/// Throws AdmissibilityError when a decision omits an active uncontrollable event.
inline ClosedLoop closed_loop(const Recognizer& r, const StatePolicy& policy) {
  const Automaton& g = r.graph();
  ClosedLoop out{Automaton(g.alphabet()), {}, {}};
  if (g.is_empty()) return out;
  std::vector<StateId> map(r.num_states(), no_state);
  std::deque<StateId> queue;
  auto intern = [&](StateId q) {
    if (map[q] == no_state) {
      map[q] = out.automaton.add_state(g.state_name(q), true);
      out.recognizer_state.push_back(q);
      out.runtime_error.push_back(0);
      queue.push_back(q);
    }
    return map[q];
  };
  out.automaton.set_initial(intern(g.initial()));
  while (!queue.empty()) {
    const StateId q = queue.front();
    queue.pop_front();
    const ControlDecision d = policy(q);
    out.runtime_error[map[q]] = d.runtime_error;
    for (const auto& e : g.edges(q)) {
      const bool uc = !g.alphabet().controllable(e.event);
      if (!d.enables(e.event)) {
        if (uc)
          throw AdmissibilityError("policy disables uncontrollable event '" +
                                   g.alphabet().name(e.event) + "' at '" + g.state_name(q) + "'");
        continue;
      }
      out.automaton.add_transition(map[q], e.event, intern(e.target));
    }
  }
  return out;
}

inline ClosedLoop closed_loop(const Automaton& plant, const Automaton& spec, const StatePolicy& policy) {
  return closed_loop(build_recognizer(plant, spec), policy);
}

struct LanguageCheck {
  bool holds = true;
  /// Shortest trace refuting the claim, over the alphabet of the automaton
  /// that accepts it (the second argument when `in_second`).
  std::optional<Trace> witness;
  bool in_second = false;
  explicit operator bool() const { return holds; }
};

/// L_m(a) ⊆ L_m(b), events matched by name.
inline LanguageCheck language_subset(const Automaton& a, const Automaton& b) {
  if (a.is_empty()) return {};
  std::vector<std::optional<EventId>> to_b(a.alphabet().size());
  for (EventId e = 0; e < a.alphabet().size(); ++e) to_b[e] = b.alphabet().find(a.alphabet().name(e));

  // Pair (p, q) with q == no_state meaning b has left its language.
  using Pair = std::pair<StateId, StateId>;
  std::map<Pair, std::pair<Pair, EventId>> parent;
  const Pair start{a.initial(), b.is_empty() ? no_state : b.initial()};
  parent.emplace(start, std::pair{start, EventId{0}});
  std::deque<Pair> queue{start};
  while (!queue.empty()) {
    const Pair cur = queue.front();
    queue.pop_front();
    const auto [p, q] = cur;
    if (a.is_marked(p) && (q == no_state || !b.is_marked(q))) {
      Trace t;
      for (Pair x = cur; x != start;) {
        const auto& [prev, ev] = parent.at(x);
        t.push_back(ev);
        x = prev;
      }
      std::reverse(t.begin(), t.end());
      return {false, std::move(t)};
    }
    for (const auto& e : a.edges(p)) {
      StateId q2 = no_state;
      if (q != no_state && to_b[e.event]) q2 = b.successor(q, *to_b[e.event]);
      const Pair next{e.target, q2};
      if (parent.emplace(next, std::pair{cur, e.event}).second) queue.push_back(next);
    }
  }
  return {};
}

inline LanguageCheck language_equal(const Automaton& a, const Automaton& b) {
  if (auto c = language_subset(a, b); !c) return c;
  auto c = language_subset(b, a);
  c.in_second = !c.holds;
  return c;
}

}  // namespace llp
