#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "llp/automaton.hpp"
#include "llp/error.hpp"
#include "llp/plant.hpp"

namespace llp {

/// Explicit product of a plant with a specification recognizer. Each state
/// carries the legality of the traces reaching it; illegal states keep the
/// plant's transitions so that L(G) is represented in full.
class Recognizer {
 public:
  Recognizer() = default;

  /// Marked states of the graph are exactly the legal-marked ones.
  const Automaton& graph() const { return graph_; }
  const Alphabet& alphabet() const { return graph_.alphabet(); }
  std::size_t num_states() const { return graph_.num_states(); }
  StateId initial() const { return graph_.initial(); }

  Legality legality(StateId q) const { return legality_[q]; }
  bool legal(StateId q) const { return legality_[q] != Legality::illegal; }
  bool plant_marked(StateId q) const { return plant_marked_[q]; }
  /// Plant / spec components when built from automata; no_state otherwise
  /// (spec component is no_state for illegal states).
  StateId plant_state(StateId q) const { return plant_state_[q]; }
  StateId spec_state(StateId q) const { return spec_state_[q]; }

  bool any_legal() const { return !graph_.is_empty() && legal(graph_.initial()); }

  /// K = K-bar: every legal state is legal-marked.
  bool is_prefix_closed() const {
    for (StateId q = 0; q < num_states(); ++q)
      if (legality_[q] == Legality::legal_unmarked) return false;
    return true;
  }

  /// Assembly interface for builders.
  StateId add(std::string name, Legality l, bool plant_marked, StateId plant_state = no_state,
              StateId spec_state = no_state) {
    const StateId q = graph_.add_state(std::move(name), l == Legality::legal_marked);
    legality_.push_back(l);
    plant_marked_.push_back(plant_marked);
    plant_state_.push_back(plant_state);
    spec_state_.push_back(spec_state);
    return q;
  }
  void set_legality(StateId q, Legality l) {
    legality_[q] = l;
    graph_.set_marked(q, l == Legality::legal_marked);
  }
  Automaton& mutable_graph() { return graph_; }

  explicit Recognizer(Alphabet sigma) : graph_(std::move(sigma)) {}

 private:
  Automaton graph_;
  std::vector<Legality> legality_;
  std::vector<char> plant_marked_;
  std::vector<StateId> plant_state_;
  std::vector<StateId> spec_state_;
};

namespace detail {

/// Demotes legal states that cannot reach a legal-marked state through legal
/// states (they lie outside the prefix closure of K).
inline void refine_to_prefix_closure(Recognizer& r) {
  std::vector<char> legal(r.num_states());
  for (StateId q = 0; q < r.num_states(); ++q) legal[q] = r.legal(q);
  const auto co = coreachable(r.graph(), legal);
  for (StateId q = 0; q < r.num_states(); ++q)
    if (legal[q] && !co[q]) r.set_legality(q, Legality::illegal);
}

inline void check_spec_closure(const Recognizer& r) {
  for (StateId q = 0; q < r.num_states(); ++q)
    if (r.legality(q) == Legality::legal_unmarked && r.plant_marked(q))
      throw SpecError("specification is not L_m(G)-closed: legal trace reaching '" +
                      r.graph().state_name(q) + "' is plant-marked but not spec-marked");
}

}  // namespace detail

/// Builds the product recognizer for plant G and spec automaton H. The legal
/// language is K = L_m(G) ∩ L_m(H); a trace is legal iff it is a prefix of K.
/// Throws AlphabetError when H uses an event G lacks or disagrees on
/// controllability, and SpecError when K is not L_m(G)-closed.
inline Recognizer build_recognizer(const Automaton& plant, const Automaton& spec) {
  for (const auto& e : spec.alphabet()) {
    auto id = plant.alphabet().find(e.name);
    if (!id) throw AlphabetError("spec event '" + e.name + "' is not in the plant alphabet");
    if (plant.alphabet().controllable(*id) != e.controllable)
      throw AlphabetError("controllability clash on event '" + e.name + "'");
  }
  Recognizer r(plant.alphabet());
  if (plant.is_empty()) return r;

  std::vector<std::optional<EventId>> to_spec(plant.alphabet().size());
  for (EventId e = 0; e < plant.alphabet().size(); ++e)
    to_spec[e] = spec.alphabet().find(plant.alphabet().name(e));

  auto spec_succ = [&](StateId h, EventId e) -> StateId {
    if (h == no_state || !to_spec[e]) return no_state;
    return spec.successor(h, *to_spec[e]);
  };

  // Pure product over pairs where the spec is defined, then its co-reachable part.
  std::map<std::pair<StateId, StateId>, StateId> pure_index;
  Automaton pure(plant.alphabet());
  if (!spec.is_empty()) {
    std::deque<std::pair<StateId, StateId>> queue;
    auto intern = [&](StateId g, StateId h) {
      auto [it, fresh] = pure_index.emplace(std::pair{g, h}, static_cast<StateId>(pure.num_states()));
      if (fresh) {
        pure.add_state(std::to_string(pure.num_states()), plant.is_marked(g) && spec.is_marked(h));
        queue.emplace_back(g, h);
      }
      return it->second;
    };
    pure.set_initial(intern(plant.initial(), spec.initial()));
    while (!queue.empty()) {
      auto [g, h] = queue.front();
      queue.pop_front();
      const StateId src = pure_index.at({g, h});
      for (const auto& e : plant.edges(g)) {
        const StateId h2 = spec_succ(h, e.event);
        if (h2 != no_state) pure.add_transition(src, e.event, intern(e.target, h2));
      }
    }
  }
  const auto pure_co = coreachable(pure, std::vector<char>(pure.num_states(), 1));
  auto in_closure = [&](StateId g, StateId h) {
    if (h == no_state) return false;
    auto it = pure_index.find({g, h});
    return it != pure_index.end() && pure_co[it->second];
  };

  std::map<std::pair<StateId, StateId>, StateId> index;
  std::deque<std::pair<StateId, StateId>> queue;
  auto intern = [&](StateId g, StateId h) {
    if (!in_closure(g, h)) h = no_state;
    auto [it, fresh] = index.emplace(std::pair{g, h}, static_cast<StateId>(r.num_states()));
    if (fresh) {
      Legality l = Legality::illegal;
      if (h != no_state)
        l = plant.is_marked(g) && spec.is_marked(h) ? Legality::legal_marked : Legality::legal_unmarked;
      const std::string name =
          plant.state_name(g) + "|" + (h == no_state ? std::string("!") : spec.state_name(h));
      r.add(name, l, plant.is_marked(g), g, h);
      queue.emplace_back(g, h);
    }
    return it->second;
  };
  r.mutable_graph().set_initial(intern(plant.initial(), spec.is_empty() ? no_state : spec.initial()));
  while (!queue.empty()) {
    auto [g, h] = queue.front();
    queue.pop_front();
    const StateId src = index.at({g, h});
    for (const auto& e : plant.edges(g))
      r.mutable_graph().add_transition(src, e.event, intern(e.target, spec_succ(h, e.event)));
  }
  detail::check_spec_closure(r);
  return r;
}

struct ExploreOptions {
  std::size_t budget = 1'000'000;
  /// Map every plant-illegal token onto one sink without outgoing transitions.
  bool collapse_illegal = false;
};

/// Materializes a labeled plant by breadth-first exploration, then refines
/// legality to exact prefix-closure membership by co-reachability.
template <LabeledPlant P>
Recognizer explore(const P& plant, ExploreOptions opts = {}) {
  using Token = typename P::token_type;
  Recognizer r(plant.alphabet());
  std::unordered_map<Token, StateId> index;
  StateId sink = no_state;
  std::deque<std::pair<StateId, Token>> queue;

  auto intern = [&](const Token& t) -> StateId {
    const Legality l = plant.legality(t);
    if (opts.collapse_illegal && l == Legality::illegal) {
      if (sink == no_state) sink = r.add("bad", Legality::illegal, false);
      return sink;
    }
    auto it = index.find(t);
    if (it != index.end()) return it->second;
    if (index.size() >= opts.budget)
      throw BudgetExceeded("exploration exceeded " + std::to_string(opts.budget) + " states",
                           index.size());
    const StateId q = r.add("x" + std::to_string(index.size()), l, plant.is_marked(t));
    index.emplace(t, q);
    queue.emplace_back(q, t);
    return q;
  };

  r.mutable_graph().set_initial(intern(plant.initial()));
  while (!queue.empty()) {
    auto [q, t] = std::move(queue.front());
    queue.pop_front();
    for (EventId e : plant.active(t)) r.mutable_graph().add_transition(q, e, intern(plant.step(t, e)));
  }
  detail::refine_to_prefix_closure(r);
  return r;
}

/// Recognizer viewed as a labeled plant (token = recognizer state).
class RecognizerPlant {
 public:
  using token_type = StateId;

  explicit RecognizerPlant(const Recognizer& r) : r_(&r) {}

  const Alphabet& alphabet() const { return r_->alphabet(); }
  StateId initial() const { return r_->initial(); }
  std::vector<EventId> active(StateId q) const { return r_->graph().active(q); }
  StateId step(StateId q, EventId e) const { return r_->graph().step(q, e); }
  bool is_marked(StateId q) const { return r_->plant_marked(q); }
  Legality legality(StateId q) const { return r_->legality(q); }
  const Recognizer& recognizer() const { return *r_; }

 private:
  const Recognizer* r_;
};

}  // namespace llp
