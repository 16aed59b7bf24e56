#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <functional>
#include <vector>

#include "llp/alphabet.hpp"
#include "llp/automaton.hpp"

namespace llp {

/// On-the-fly plant: the interface the lookahead machinery consumes. Tokens are
/// hashable values so that per-state results can be memoized.
template <class P>
concept GenerativePlant = requires(const P& p, const typename P::token_type& t, EventId e) {
  typename P::token_type;
  requires std::equality_comparable<typename P::token_type>;
  { std::hash<typename P::token_type>{}(t) } -> std::convertible_to<std::size_t>;
  { p.alphabet() } -> std::convertible_to<const Alphabet&>;
  { p.initial() } -> std::convertible_to<typename P::token_type>;
  { p.active(t) } -> std::convertible_to<std::vector<EventId>>;
  { p.step(t, e) } -> std::convertible_to<typename P::token_type>;
  { p.is_marked(t) } -> std::convertible_to<bool>;
};

/// Legality of a trace with respect to the legal language K:
/// illegal = outside the prefix closure, legal_marked = inside K.
enum class Legality : std::uint8_t { illegal, legal_unmarked, legal_marked };

inline bool is_legal(Legality l) { return l != Legality::illegal; }

/// A plant paired with a specification: every token also carries the
/// legality of the trace that reached it.
template <class P>
concept LabeledPlant = GenerativePlant<P> && requires(const P& p, const typename P::token_type& t) {
  { p.legality(t) } -> std::convertible_to<Legality>;
};

/// Automaton viewed as a generative plant; tokens are state ids.
class AutomatonPlant {
 public:
  using token_type = StateId;

  explicit AutomatonPlant(const Automaton& a) : a_(&a) {}

  const Alphabet& alphabet() const { return a_->alphabet(); }
  StateId initial() const { return a_->initial(); }
  std::vector<EventId> active(StateId s) const { return a_->active(s); }
  StateId step(StateId s, EventId e) const { return a_->step(s, e); }
  bool is_marked(StateId s) const { return a_->is_marked(s); }
  const Automaton& automaton() const { return *a_; }

 private:
  const Automaton* a_;
};

template <GenerativePlant P>
std::vector<EventId> active_set(const P& plant, const typename P::token_type& t) {
  return plant.active(t);
}

template <GenerativePlant P>
std::vector<EventId> active_uncontrollable(const P& plant, const typename P::token_type& t) {
  auto act = plant.active(t);
  std::erase_if(act, [&](EventId e) { return plant.alphabet().controllable(e); });
  return act;
}

}  // namespace llp
