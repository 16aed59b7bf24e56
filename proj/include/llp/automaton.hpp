#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "llp/alphabet.hpp"
#include "llp/error.hpp"

namespace llp {

using StateId = std::uint32_t;
inline constexpr StateId no_state = std::numeric_limits<StateId>::max();

struct Edge {
  EventId event;
  StateId target;

  bool operator==(const Edge&) const = default;
};

/// Explicit deterministic automaton over a controllability-partitioned
/// alphabet. An automaton without states recognizes the empty language
/// (not even the empty trace).
class Automaton {
 public:
  Automaton() = default;
  explicit Automaton(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}

  StateId add_state(std::string name, bool marked = false) {
    if (name.empty()) throw FormatError("state name must not be empty");
    auto [it, fresh] = state_index_.emplace(name, static_cast<StateId>(names_.size()));
    if (!fresh) throw FormatError("duplicate state '" + name + "'");
    names_.push_back(std::move(name));
    marked_.push_back(marked);
    edges_.emplace_back();
    return it->second;
  }

  void set_initial(StateId s) {
    check_state(s);
    initial_ = s;
  }

  void set_marked(StateId s, bool marked = true) {
    check_state(s);
    marked_[s] = marked;
  }

  void add_transition(StateId src, EventId event, StateId dst) {
    check_state(src);
    check_state(dst);
    if (event >= alphabet_.size()) throw ReferenceError("event id out of range");
    auto& out = edges_[src];
    auto pos = std::lower_bound(out.begin(), out.end(), event,
                                [](const Edge& e, EventId ev) { return e.event < ev; });
    if (pos != out.end() && pos->event == event)
      throw NondeterminismError("state '" + names_[src] + "' already has a transition on '" +
                                alphabet_.name(event) + "'");
    out.insert(pos, Edge{event, dst});
    ++num_transitions_;
  }

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t num_states() const { return names_.size(); }
  std::size_t num_transitions() const { return num_transitions_; }
  bool is_empty() const { return initial_ == no_state; }
  StateId initial() const { return initial_; }
  bool is_marked(StateId s) const { return marked_[s]; }
  const std::string& state_name(StateId s) const { return names_[s]; }

  std::optional<StateId> find_state(std::string_view name) const {
    auto it = state_index_.find(std::string(name));
    if (it == state_index_.end()) return std::nullopt;
    return it->second;
  }

  std::span<const Edge> edges(StateId s) const { return edges_[s]; }

  StateId successor(StateId s, EventId e) const {
    const auto& out = edges_[s];
    auto pos = std::lower_bound(out.begin(), out.end(), e,
                                [](const Edge& x, EventId ev) { return x.event < ev; });
    return (pos != out.end() && pos->event == e) ? pos->target : no_state;
  }

  StateId step(StateId s, EventId e) const {
    const StateId t = successor(s, e);
    if (t == no_state)
      throw InactiveEventError("event '" + alphabet_.name(e) + "' is not active in state '" +
                               names_[s] + "'");
    return t;
  }

  std::vector<EventId> active(StateId s) const {
    std::vector<EventId> out;
    out.reserve(edges_[s].size());
    for (const auto& e : edges_[s]) out.push_back(e.event);
    return out;
  }

  bool has_uncontrollable(StateId s) const {
    return std::any_of(edges_[s].begin(), edges_[s].end(),
                       [&](const Edge& e) { return !alphabet_.controllable(e.event); });
  }

 private:
  void check_state(StateId s) const {
    if (s >= names_.size()) throw ReferenceError("state id out of range");
  }

  Alphabet alphabet_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, StateId> state_index_;
  std::vector<char> marked_;
  std::vector<std::vector<Edge>> edges_;
  StateId initial_ = no_state;
  std::size_t num_transitions_ = 0;
};

/// States reachable from the initial state.
inline std::vector<char> reachable(const Automaton& a) {
  std::vector<char> seen(a.num_states(), 0);
  if (a.is_empty()) return seen;
  std::deque<StateId> queue{a.initial()};
  seen[a.initial()] = 1;
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    for (const auto& e : a.edges(s))
      if (!seen[e.target]) {
        seen[e.target] = 1;
        queue.push_back(e.target);
      }
  }
  return seen;
}

/// States from which a marked state in `allowed` can be reached through `allowed`.
inline std::vector<char> coreachable(const Automaton& a, const std::vector<char>& allowed) {
  std::vector<std::vector<StateId>> preds(a.num_states());
  for (StateId s = 0; s < a.num_states(); ++s)
    if (allowed[s])
      for (const auto& e : a.edges(s))
        if (allowed[e.target]) preds[e.target].push_back(s);
  std::vector<char> seen(a.num_states(), 0);
  std::deque<StateId> queue;
  for (StateId s = 0; s < a.num_states(); ++s)
    if (allowed[s] && a.is_marked(s)) {
      seen[s] = 1;
      queue.push_back(s);
    }
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    for (StateId p : preds[s])
      if (!seen[p]) {
        seen[p] = 1;
        queue.push_back(p);
      }
  }
  return seen;
}

/// Copy of the states in `keep` (renumbered in id order) and the edges between
/// them accepted by `edge_ok`. An unkept initial state yields the empty automaton.
template <class EdgeFilter>
Automaton restrict(const Automaton& a, const std::vector<char>& keep, EdgeFilter edge_ok) {
  Automaton out(a.alphabet());
  if (a.is_empty() || !keep[a.initial()]) return out;
  std::vector<StateId> map(a.num_states(), no_state);
  for (StateId s = 0; s < a.num_states(); ++s)
    if (keep[s]) map[s] = out.add_state(a.state_name(s), a.is_marked(s));
  out.set_initial(map[a.initial()]);
  for (StateId s = 0; s < a.num_states(); ++s) {
    if (!keep[s]) continue;
    for (const auto& e : a.edges(s))
      if (keep[e.target] && edge_ok(s, e)) out.add_transition(map[s], e.event, map[e.target]);
  }
  return out;
}

inline Automaton restrict(const Automaton& a, const std::vector<char>& keep) {
  return restrict(a, keep, [](StateId, const Edge&) { return true; });
}

/// Drops unreachable states.
inline Automaton accessible(const Automaton& a) { return restrict(a, reachable(a)); }

/// Keeps states that are both reachable and co-reachable. The result is the
/// empty automaton when no marked state is reachable.
inline Automaton trim(const Automaton& a) {
  if (a.is_empty()) return Automaton(a.alphabet());
  const auto acc = reachable(a);
  const auto co = coreachable(a, acc);
  std::vector<char> keep(a.num_states());
  for (StateId s = 0; s < a.num_states(); ++s) keep[s] = acc[s] && co[s];
  // Every state on a path to a kept state is itself kept.
  return restrict(a, keep);
}

/// Reachable part with every state marked: its marked language is L(a).
inline Automaton generated(const Automaton& a) {
  Automaton out = accessible(a);
  for (StateId s = 0; s < out.num_states(); ++s) out.set_marked(s);
  return out;
}

/// Synchronous composition. Shared events (by name) move jointly, private
/// events move one side. Only reachable state pairs are built.
inline Automaton sync_product(const Automaton& a, const Automaton& b) {
  Alphabet sigma = Alphabet::merge(a.alphabet(), b.alphabet());
  Automaton out(sigma);
  if (a.is_empty() || b.is_empty()) return out;

  // For each merged event: id in a / id in b (or nullopt when private).
  std::vector<std::optional<EventId>> in_a(sigma.size()), in_b(sigma.size());
  for (EventId e = 0; e < sigma.size(); ++e) {
    in_a[e] = a.alphabet().find(sigma.name(e));
    in_b[e] = b.alphabet().find(sigma.name(e));
  }

  std::map<std::pair<StateId, StateId>, StateId> index;
  std::deque<std::pair<StateId, StateId>> queue;
  auto intern = [&](StateId p, StateId q) {
    auto [it, fresh] = index.emplace(std::pair{p, q}, static_cast<StateId>(out.num_states()));
    if (fresh) {
      out.add_state(a.state_name(p) + "|" + b.state_name(q), a.is_marked(p) && b.is_marked(q));
      queue.emplace_back(p, q);
    }
    return it->second;
  };
  out.set_initial(intern(a.initial(), b.initial()));
  while (!queue.empty()) {
    auto [p, q] = queue.front();
    queue.pop_front();
    const StateId src = index.at({p, q});
    for (EventId e = 0; e < sigma.size(); ++e) {
      StateId np = p, nq = q;
      if (in_a[e]) {
        np = a.successor(p, *in_a[e]);
        if (np == no_state) continue;
      }
      if (in_b[e]) {
        nq = b.successor(q, *in_b[e]);
        if (nq == no_state) continue;
      }
      out.add_transition(src, e, intern(np, nq));
    }
  }
  return out;
}

/// Joint exploration of two deterministic automata matching events by name:
/// true iff every reachable pair agrees on marking and active event names.
/// For deterministic automata this is equality of both generated and marked languages.
inline bool bisimilar(const Automaton& a, const Automaton& b) {
  if (a.is_empty() || b.is_empty()) return a.is_empty() == b.is_empty();
  std::map<std::pair<StateId, StateId>, bool> seen;
  std::deque<std::pair<StateId, StateId>> queue{{a.initial(), b.initial()}};
  seen[{a.initial(), b.initial()}] = true;
  while (!queue.empty()) {
    auto [p, q] = queue.front();
    queue.pop_front();
    if (a.is_marked(p) != b.is_marked(q)) return false;
    const auto ea = a.edges(p);
    const auto eb = b.edges(q);
    if (ea.size() != eb.size()) return false;
    for (const auto& e : ea) {
      auto id = b.alphabet().find(a.alphabet().name(e.event));
      if (!id) return false;
      const StateId t = b.successor(q, *id);
      if (t == no_state) return false;
      if (seen.emplace(std::pair{e.target, t}, true).second) queue.emplace_back(e.target, t);
    }
  }
  return true;
}

}  // namespace llp
