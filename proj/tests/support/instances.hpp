#pragma once

#include <random>
#include <string>
#include <vector>

#include "llp/automaton.hpp"

namespace llp::testing {

enum class SpecShape {
  general,        // spec marking follows the plant on kept states
  closed_spec,    // every spec state marked (H prefix-closed, K may not be)
  closed_language // plant and spec fully marked, so K is prefix-closed
};

struct Instance {
  Automaton plant;
  Automaton spec;
  std::uint64_t seed = 0;
};

struct InstanceParams {
  unsigned max_states = 8;
  unsigned max_events = 5;
  double edge_prob = 0.35;
  double marked_prob = 0.3;
  double keep_state_prob = 0.8;
  double keep_edge_prob = 0.8;
};

/// Random trim plant with at least one controllable and one uncontrollable
/// event, and a spec that is a random trim sub-automaton of it.
inline Instance random_instance(std::uint64_t seed, SpecShape shape, InstanceParams p = {}) {
  std::mt19937_64 rng(seed);
  auto coin = [&](double prob) { return std::bernoulli_distribution(prob)(rng); };
  auto pick = [&](unsigned lo, unsigned hi) { return std::uniform_int_distribution<unsigned>(lo, hi)(rng); };
  for (;;) {
    const unsigned n_states = pick(2, p.max_states);
    const unsigned n_events = pick(2, p.max_events);
    const unsigned n_uc = pick(1, n_events - 1);
    Alphabet sigma;
    for (unsigned e = 0; e < n_events; ++e) {
      const bool uc = e >= n_events - n_uc;
      sigma.add(std::string(1, static_cast<char>(uc ? 'u' + (e - (n_events - n_uc)) : 'a' + e)), !uc);
    }
    Automaton g(sigma);
    const bool all_marked = shape == SpecShape::closed_language;
    for (unsigned s = 0; s < n_states; ++s) g.add_state("q" + std::to_string(s), all_marked || coin(p.marked_prob));
    g.set_initial(0);
    for (unsigned s = 0; s < n_states; ++s)
      for (EventId e = 0; e < n_events; ++e)
        if (coin(p.edge_prob)) g.add_transition(s, e, pick(0, n_states - 1));
    Automaton plant = trim(g);
    if (plant.is_empty() || plant.num_states() < 2) continue;
    bool has_uc = false, has_c = false;
    for (StateId s = 0; s < plant.num_states(); ++s)
      for (const auto& e : plant.edges(s)) (plant.alphabet().controllable(e.event) ? has_c : has_uc) = true;
    if (!has_uc || !has_c) continue;

    Automaton h(sigma);
    for (StateId s = 0; s < plant.num_states(); ++s) {
      const bool keep = s == plant.initial() || coin(p.keep_state_prob);
      const bool marked = shape == SpecShape::general ? plant.is_marked(s) : true;
      h.add_state("s" + plant.state_name(s).substr(1) + (keep ? "" : "x"), marked);
    }
    h.set_initial(plant.initial());
    for (StateId s = 0; s < plant.num_states(); ++s) {
      if (h.state_name(s).back() == 'x') continue;
      for (const auto& e : plant.edges(s))
        if (h.state_name(e.target).back() != 'x' && coin(p.keep_edge_prob)) h.add_transition(s, e.event, e.target);
    }
    Automaton spec = trim(h);
    if (spec.is_empty()) continue;
    return {std::move(plant), std::move(spec), seed};
  }
}

}  // namespace llp::testing
