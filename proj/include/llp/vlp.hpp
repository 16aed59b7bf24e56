#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "llp/lookahead.hpp"
#include "llp/plant.hpp"
#include "llp/session.hpp"

namespace llp {

/// Cost-to-go, totally ordered zero < undecided < inf.
enum class Cost : std::uint8_t { zero = 0, undecided = 1, inf = 2 };

inline std::string_view to_string(Cost c) {
  switch (c) {
    case Cost::zero: return "0";
    case Cost::undecided: return "U";
    default: return "inf";
  }
}

// ---------------------------------------------------------------------------
// Recursive 0/inf cost trees with reuse of the previous tree.

/// Layer j holds the distinct states j steps from the root. Illegal states are
/// costed but not expanded.
template <class Token>
struct CostTree {
  unsigned window = 1;
  Attitude attitude = Attitude::optimistic;
  std::vector<std::vector<Token>> layers;
  std::vector<std::unordered_map<Token, Cost>> costs;
  std::uint64_t expanded = 0;  // states costed by the backward rule
  std::uint64_t reused = 0;    // states whose cost came from the previous tree

  const Token& root() const { return layers.front().front(); }
  Cost root_cost() const { return costs.front().at(root()); }
  std::optional<Cost> cost(unsigned layer, const Token& t) const {
    if (layer >= costs.size()) return std::nullopt;
    auto it = costs[layer].find(t);
    if (it == costs[layer].end()) return std::nullopt;
    return it->second;
  }
};

namespace detail {

template <LabeledPlant P>
CostTree<typename P::token_type> compute_cost_tree(const P& plant, const typename P::token_type& root,
                                                   unsigned window, Attitude a,
                                                   const CostTree<typename P::token_type>* prev) {
  using Token = typename P::token_type;
  if (window < 1) throw ConfigError("window size must be at least 1");
  CostTree<Token> tree;
  tree.window = window;
  tree.attitude = a;
  tree.layers.resize(window + 1);
  tree.costs.resize(window + 1);
  tree.layers[0].push_back(root);
  for (unsigned j = 0; j < window; ++j) {
    std::unordered_set<Token> seen;
    for (const Token& x : tree.layers[j]) {
      if (plant.legality(x) == Legality::illegal) continue;
      for (EventId e : plant.active(x)) {
        Token y = plant.step(x, e);
        if (seen.insert(y).second) tree.layers[j + 1].push_back(std::move(y));
      }
    }
  }

  for (const Token& x : tree.layers[window]) {
    const bool bad = a == Attitude::conservative || plant.legality(x) == Legality::illegal;
    tree.costs[window][x] = bad ? Cost::inf : Cost::zero;
  }

  // Early all-zero termination is sound only if no earlier state can be inf
  // regardless of its successors: every state legal, and marked or expandable.
  std::vector<char> clean_prefix(window + 1, 1);
  for (unsigned j = 0; j < window; ++j) {
    bool clean = clean_prefix[j];
    for (const Token& x : tree.layers[j]) {
      const Legality l = plant.legality(x);
      if (l == Legality::illegal || (l == Legality::legal_unmarked && plant.active(x).empty())) clean = false;
    }
    clean_prefix[j + 1] = clean;
  }

  auto prev_cost = [&](unsigned j, const Token& x) -> std::optional<Cost> {
    if (!prev || prev->window != window || prev->attitude != a) return std::nullopt;
    return prev->cost(j + 1, x);
  };

  for (unsigned j = window; j-- > 0;) {
    auto& layer_cost = tree.costs[j];
    for (const Token& x : tree.layers[j]) {
      const Legality l = plant.legality(x);
      if (l == Legality::illegal) {
        layer_cost[x] = Cost::inf;
        continue;
      }
      const auto before = prev_cost(j, x);
      if (before && a == Attitude::conservative && *before == Cost::zero) {
        layer_cost[x] = Cost::zero;
        ++tree.reused;
        continue;
      }
      if (before && a == Attitude::optimistic && *before == Cost::inf) {
        layer_cost[x] = Cost::inf;
        ++tree.reused;
        continue;
      }
      bool uc_bad = false, any_zero = false;
      for (EventId e : plant.active(x)) {
        const Cost c = tree.costs[j + 1].at(plant.step(x, e));
        if (c == Cost::zero) any_zero = true;
        else if (!plant.alphabet().controllable(e)) uc_bad = true;
      }
      layer_cost[x] = !uc_bad && (l == Legality::legal_marked || any_zero) ? Cost::zero : Cost::inf;
      ++tree.expanded;
    }
    if (j == 0) break;
    const bool all_zero = std::all_of(tree.layers[j].begin(), tree.layers[j].end(),
                                      [&](const Token& x) { return layer_cost.at(x) == Cost::zero; });
    if (all_zero && clean_prefix[j]) {
      for (unsigned i = 0; i < j; ++i)
        for (const Token& x : tree.layers[i]) tree.costs[i][x] = Cost::zero;
      break;
    }
    const bool matches = prev && std::all_of(tree.layers[j].begin(), tree.layers[j].end(), [&](const Token& x) {
                           auto c = prev_cost(j, x);
                           return c && *c == layer_cost.at(x);
                         });
    if (matches) {
      bool complete = true;
      for (unsigned i = 0; i < j && complete; ++i)
        for (const Token& x : tree.layers[i])
          if (!prev_cost(i, x)) complete = false;
      if (complete) {
        for (unsigned i = 0; i < j; ++i)
          for (const Token& x : tree.layers[i]) {
            tree.costs[i][x] = *prev_cost(i, x);
            ++tree.reused;
          }
        break;
      }
    }
  }
  return tree;
}

}  // namespace detail

/// First tree, built with nothing to reuse.
template <LabeledPlant P>
CostTree<typename P::token_type> cost_tree_initial(const P& plant, const typename P::token_type& root,
                                                   unsigned window, Attitude a) {
  return detail::compute_cost_tree(plant, root, window, a, nullptr);
}

/// Tree rooted one event after `prev`'s root, reusing costs of `prev`.
template <LabeledPlant P>
CostTree<typename P::token_type> cost_tree_step(const P& plant, const CostTree<typename P::token_type>& prev,
                                                EventId event, Attitude a) {
  const auto next = plant.step(prev.root(), event);
  return detail::compute_cost_tree(plant, next, prev.window, a, &prev);
}

template <LabeledPlant P>
ControlDecision cost_tree_decision(const P& plant, const CostTree<typename P::token_type>& tree) {
  const auto& x = tree.root();
  auto uc = active_uncontrollable(plant, x);
  if (tree.root_cost() != Cost::zero) return error_decision(std::move(uc));
  std::vector<EventId> enabled;
  for (EventId e : plant.active(x)) {
    if (!plant.alphabet().controllable(e) || tree.cost(1, plant.step(x, e)) == Cost::zero) enabled.push_back(e);
  }
  std::sort(enabled.begin(), enabled.end());
  return {std::move(enabled), false};
}

/// Session supervisor that carries each tree forward to the next step.
template <LabeledPlant P>
Supervisor<typename P::token_type> cost_tree_supervisor(const P& plant, Attitude a, unsigned window) {
  using Token = typename P::token_type;
  auto prev = std::make_shared<std::optional<CostTree<Token>>>();
  return [&plant, prev, a, window](const Token& t, StepStats& st) {
    std::optional<CostTree<Token>> next;
    if (*prev && (*prev)->root() == t) {
      st.reused = 1;
      return cost_tree_decision(plant, **prev);
    }
    if (*prev)
      for (EventId e : plant.active((*prev)->root()))
        if (plant.step((*prev)->root(), e) == t) {
          next = cost_tree_step(plant, **prev, e, a);
          break;
        }
    if (!next) next = cost_tree_initial(plant, t, window, a);
    st.expanded = next->expanded;
    st.reused = next->reused;
    *prev = std::move(next);
    return cost_tree_decision(plant, **prev);
  };
}

// ---------------------------------------------------------------------------
// Three-valued labeling with the undecided cost.

struct VlpOptions {
  /// Enable controllable events whose successor cost is U ("optimistic-VLP").
  bool enable_undecided = true;
  /// At nodes with both kinds of successor, combine max over uncontrollable
  /// with min over controllable successors instead of the uncontrollable max alone.
  bool combined_rule = false;
};

namespace detail {

inline bool marked_controllable(Legality l, bool has_uc) { return l == Legality::legal_marked && !has_uc; }

inline Cost combine_interior(bool has_uc, Cost uc_max, bool has_c, Cost c_min, bool combined) {
  if (has_uc) return combined && has_c ? std::max(uc_max, c_min) : uc_max;
  return has_c ? c_min : Cost::inf;
}

}  // namespace detail

/// Labels every node of an explicit window tree. Only pending boundary nodes
/// are undecided: a depth-N marked node with no active uncontrollable event
/// is already settled at zero.
template <LabeledPlant P>
std::vector<Cost> vlp_label(const P& plant, const LookaheadTree<typename P::token_type>& tree, VlpOptions opt = {}) {
  const Alphabet& sigma = plant.alphabet();
  std::vector<Cost> cost(tree.size(), Cost::inf);
  for (std::size_t i = tree.size(); i-- > 0;) {
    const auto& n = tree.nodes[i];
    if (n.depth == tree.window) {
      const bool settled = n.label == NodeLabel::legal_marked && active_uncontrollable(plant, n.token).empty();
      cost[i] = settled ? Cost::zero : n.label == NodeLabel::illegal ? Cost::inf : Cost::undecided;
      continue;
    }
    bool has_uc = false, has_c = false;
    Cost uc_max = Cost::zero, c_min = Cost::inf;
    for (std::size_t c : n.children) {
      if (sigma.controllable(*tree.nodes[c].event)) {
        has_c = true;
        c_min = std::min(c_min, cost[c]);
      } else {
        has_uc = true;
        uc_max = std::max(uc_max, cost[c]);
      }
    }
    const Legality l = n.label == NodeLabel::illegal        ? Legality::illegal
                       : n.label == NodeLabel::legal_marked ? Legality::legal_marked
                                                            : Legality::legal_unmarked;
    if (detail::marked_controllable(l, has_uc)) cost[i] = Cost::zero;
    else if (l == Legality::illegal) cost[i] = Cost::inf;
    else cost[i] = detail::combine_interior(has_uc, uc_max, has_c, c_min, opt.combined_rule);
  }
  return cost;
}

template <LabeledPlant P>
ControlDecision vlp_decision_from(const P& plant, const typename P::token_type& t, Cost root,
                                  const std::vector<std::pair<EventId, Cost>>& child_costs, VlpOptions opt) {
  auto uc = active_uncontrollable(plant, t);
  if (root == Cost::inf) return error_decision(std::move(uc));
  std::vector<EventId> enabled = std::move(uc);
  for (const auto& [e, c] : child_costs)
    if (plant.alphabet().controllable(e) && (c == Cost::zero || (opt.enable_undecided && c == Cost::undecided)))
      enabled.push_back(e);
  std::sort(enabled.begin(), enabled.end());
  return {std::move(enabled), false};
}

/// Lazy evaluation of the same labeling on the implicit window tree. Each
/// subtree is explored only until its cost is settled (an inf among
/// uncontrollable successors, a zero among controllable ones), so the
/// visited-node count never exceeds the full tree size.
template <LabeledPlant P>
class VlpEvaluator {
 public:
  using Token = typename P::token_type;

  VlpEvaluator(const P& plant, VlpOptions opt = {}) : plant_(&plant), opt_(opt) {}

  /// Cost of a node carrying `t` at `depth` in a window of size `window`.
  Cost cost(const Token& t, unsigned depth, unsigned window) {
    return node_cost(t, depth, window, [&](EventId e) { return cost(plant_->step(t, e), depth + 1, window); });
  }

  /// Root cost plus exact costs of every depth-1 child; each child subtree is
  /// expanded once and the root cost is folded from the children.
  ControlDecision decide(const Token& t, unsigned window, Cost* root_cost = nullptr) {
    if (window < 1) throw ConfigError("window size must be at least 1");
    std::vector<std::pair<EventId, Cost>> children;
    for (EventId e : plant_->active(t)) children.emplace_back(e, cost(plant_->step(t, e), 1, window));
    const Cost root = node_cost(t, 0, window, [&](EventId e) {
      for (const auto& [ce, c] : children)
        if (ce == e) return c;
      return Cost::inf;
    });
    if (root_cost) *root_cost = root;
    return vlp_decision_from(*plant_, t, root, children, opt_);
  }

  std::uint64_t visited() const { return visited_; }
  void reset_count() { visited_ = 0; }

 private:
  template <class ChildCost>
  Cost node_cost(const Token& t, unsigned depth, unsigned window, ChildCost&& child) {
    ++visited_;
    const Legality l = plant_->legality(t);
    const auto act = plant_->active(t);
    const auto uc_count = std::count_if(act.begin(), act.end(), [&](EventId e) { return !plant_->alphabet().controllable(e); });
    const bool has_uc = uc_count > 0;
    if (depth == window) {
      if (detail::marked_controllable(l, has_uc)) return Cost::zero;
      return l == Legality::illegal ? Cost::inf : Cost::undecided;
    }
    const bool has_c = act.size() > static_cast<std::size_t>(uc_count);
    if (detail::marked_controllable(l, has_uc)) return Cost::zero;
    if (l == Legality::illegal) return Cost::inf;
    Cost uc_max = Cost::zero;
    if (has_uc) {
      for (EventId e : act) {
        if (plant_->alphabet().controllable(e)) continue;
        uc_max = std::max(uc_max, child(e));
        if (uc_max == Cost::inf) break;
      }
      if (!opt_.combined_rule || !has_c || uc_max == Cost::inf) return uc_max;
    }
    Cost c_min = Cost::inf;
    for (EventId e : act) {
      if (!plant_->alphabet().controllable(e)) continue;
      c_min = std::min(c_min, child(e));
      if (c_min == Cost::zero) break;
    }
    return detail::combine_interior(has_uc, uc_max, has_c, c_min, opt_.combined_rule);
  }

  const P* plant_;
  VlpOptions opt_;
  std::uint64_t visited_ = 0;
};

template <LabeledPlant P>
Supervisor<typename P::token_type> vlp_supervisor(const P& plant, unsigned window, VlpOptions opt = {}) {
  auto eval = std::make_shared<VlpEvaluator<P>>(plant, opt);
  return [eval, window](const typename P::token_type& t, StepStats& st) {
    eval->reset_count();
    auto d = eval->decide(t, window);
    st.expanded = eval->visited();
    return d;
  };
}

// ---------------------------------------------------------------------------
// State-based variable lookahead with a memoized cost-to-go.

template <class Token>
using MemoTable = std::unordered_map<Token, Cost>;

struct VlpsOptions {
  /// States expanded per cost computation before giving up with U.
  std::size_t node_budget = 100'000;
};

template <LabeledPlant P>
class VlpsSupervisor {
 public:
  using Token = typename P::token_type;

  explicit VlpsSupervisor(const P& plant, VlpsOptions opt = {}) : plant_(&plant), opt_(opt) {}

  /// Expands from `x` until every frontier state is illegal, marked with no
  /// active uncontrollable event, or memoized, then runs the inf-propagation
  /// fixpoint. Every expanded state is memoized. Returns U on budget overflow.
  Cost cost(const Token& x) {
    if (auto it = memo_.find(x); it != memo_.end()) {
      ++last_reused_;
      return it->second;
    }
    std::unordered_map<Token, std::size_t> index;
    std::vector<Token> states;
    std::vector<std::vector<std::pair<EventId, std::size_t>>> succ;
    std::vector<Cost> cost;
    std::vector<char> fixed, target;
    std::deque<std::size_t> queue;

    auto intern = [&](const Token& t) -> std::optional<std::size_t> {
      if (auto it = index.find(t); it != index.end()) return it->second;
      const std::size_t i = states.size();
      index.emplace(t, i);
      states.push_back(t);
      succ.emplace_back();
      const Legality l = plant_->legality(t);
      auto m = memo_.find(t);
      if (m != memo_.end()) {
        ++last_reused_;
        cost.push_back(m->second);
        fixed.push_back(1);
        target.push_back(m->second == Cost::zero);
      } else if (l == Legality::illegal) {
        cost.push_back(Cost::inf);
        fixed.push_back(1);
        target.push_back(0);
      } else {
        if (i >= opt_.node_budget) return std::nullopt;
        cost.push_back(Cost::zero);
        fixed.push_back(0);
        target.push_back(l == Legality::legal_marked);
        queue.push_back(i);
      }
      return i;
    };

    if (!intern(x)) return Cost::undecided;
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      ++last_expanded_;
      const Token t = states[i];
      const auto act = plant_->active(t);
      const bool has_uc = std::any_of(act.begin(), act.end(), [&](EventId e) { return !plant_->alphabet().controllable(e); });
      if (plant_->legality(t) == Legality::legal_marked && !has_uc) continue;  // stop state
      for (EventId e : act) {
        auto j = intern(plant_->step(t, e));
        if (!j) return Cost::undecided;
        succ[i].emplace_back(e, *j);
      }
    }

    const std::size_t n = states.size();
    for (bool blocking_changed = true; blocking_changed;) {
      for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
          if (fixed[i] || cost[i] == Cost::inf) continue;
          for (const auto& [e, j] : succ[i])
            if (!plant_->alphabet().controllable(e) && cost[j] == Cost::inf) {
              cost[i] = Cost::inf;
              changed = true;
              break;
            }
        }
      }
      // Blocking: no path through non-inf states to a marked or zero-memoized state.
      std::vector<std::vector<std::size_t>> pred(n);
      for (std::size_t i = 0; i < n; ++i)
        if (cost[i] != Cost::inf)
          for (const auto& [e, j] : succ[i])
            if (cost[j] != Cost::inf) pred[j].push_back(i);
      std::vector<char> co(n, 0);
      std::deque<std::size_t> q;
      for (std::size_t i = 0; i < n; ++i)
        if (cost[i] != Cost::inf && target[i]) {
          co[i] = 1;
          q.push_back(i);
        }
      while (!q.empty()) {
        const std::size_t i = q.front();
        q.pop_front();
        for (std::size_t p : pred[i])
          if (!co[p]) {
            co[p] = 1;
            q.push_back(p);
          }
      }
      blocking_changed = false;
      for (std::size_t i = 0; i < n; ++i)
        if (!fixed[i] && cost[i] != Cost::inf && !co[i]) {
          cost[i] = Cost::inf;
          blocking_changed = true;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!fixed[i]) memo_.emplace(states[i], cost[i]);
    return cost[0];
  }

  ControlDecision decide(const Token& x) {
    auto uc = active_uncontrollable(*plant_, x);
    const Cost cx = cost(x);
    if (cx == Cost::inf) return error_decision(std::move(uc));
    std::vector<EventId> enabled;
    for (EventId e : plant_->active(x))
      if (!plant_->alphabet().controllable(e) || cost(plant_->step(x, e)) == Cost::zero) enabled.push_back(e);
    std::sort(enabled.begin(), enabled.end());
    return {std::move(enabled), false};
  }

  const MemoTable<Token>& memo() const { return memo_; }
  std::uint64_t take_expanded() { return std::exchange(last_expanded_, 0); }
  std::uint64_t take_reused() { return std::exchange(last_reused_, 0); }

 private:
  const P* plant_;
  VlpsOptions opt_;
  MemoTable<Token> memo_;
  std::uint64_t last_expanded_ = 0;
  std::uint64_t last_reused_ = 0;
};

template <LabeledPlant P>
Supervisor<typename P::token_type> vlps_supervisor(const P& plant, VlpsOptions opt = {}) {
  auto sup = std::make_shared<VlpsSupervisor<P>>(plant, opt);
  return [sup](const typename P::token_type& t, StepStats& st) {
    auto d = sup->decide(t);
    st.expanded = sup->take_expanded();
    st.reused = sup->take_reused();
    return d;
  };
}

/// Aggregate counters over a logged run.
struct ExpansionStats {
  std::uint64_t nodes_expanded = 0;
  std::uint64_t nodes_reused = 0;
  std::vector<StepStats> history;
};

inline ExpansionStats expansion_report(const TraceLog& log) {
  ExpansionStats s;
  for (const auto& e : log.entries) {
    s.nodes_expanded += e.stats.expanded;
    s.nodes_reused += e.stats.reused;
    s.history.push_back(e.stats);
  }
  return s;
}

}  // namespace llp
