#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "llp/error.hpp"
#include "llp/plant.hpp"
#include "llp/synthesis.hpp"

namespace llp {

enum class Attitude : std::uint8_t { conservative, optimistic };

inline std::string_view to_string(Attitude a) {
  return a == Attitude::conservative ? "conservative" : "optimistic";
}

inline Attitude parse_attitude(std::string_view s) {
  if (s == "conservative" || s == "cons") return Attitude::conservative;
  if (s == "optimistic" || s == "optm") return Attitude::optimistic;
  throw ConfigError("unknown attitude '" + std::string(s) + "'");
}

/// Window label of a trace. Depth-N legal-unmarked traces are pending; a
/// legal-marked trace keeps its label at any depth.
enum class NodeLabel : std::uint8_t { illegal, legal_unmarked, legal_marked, pending };

template <class Token>
struct LookaheadNode {
  std::optional<EventId> event;  // absent at the root
  std::size_t parent = 0;
  unsigned depth = 0;
  Token token;
  NodeLabel label = NodeLabel::illegal;
  bool target = false;
  bool survives = false;
  std::vector<std::size_t> children;
};

/// Nodes in breadth-first order; nodes[0] is the root.
template <class Token>
struct LookaheadTree {
  unsigned window = 1;
  std::vector<LookaheadNode<Token>> nodes;

  const LookaheadNode<Token>& root() const { return nodes.front(); }
  std::size_t size() const { return nodes.size(); }
};

/// Expands L(G)/s|_N from `token`. Illegal nodes are expanded too, so the
/// tree holds every active continuation up to depth N.
template <LabeledPlant P>
LookaheadTree<typename P::token_type> build_tree(const P& plant, const typename P::token_type& token,
                                                unsigned window, std::size_t budget = 2'000'000) {
  if (window < 1) throw ConfigError("window size must be at least 1");
  LookaheadTree<typename P::token_type> tree;
  tree.window = window;
  auto label_of = [&](const typename P::token_type& t, unsigned depth) {
    switch (plant.legality(t)) {
      case Legality::illegal: return NodeLabel::illegal;
      case Legality::legal_marked: return NodeLabel::legal_marked;
      default: return depth == window ? NodeLabel::pending : NodeLabel::legal_unmarked;
    }
  };
  tree.nodes.push_back({std::nullopt, 0, 0, token, label_of(token, 0), false, false, {}});
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].depth == window) continue;
    const auto t = tree.nodes[i].token;
    const unsigned d = tree.nodes[i].depth + 1;
    for (EventId e : plant.active(t)) {
      if (tree.nodes.size() >= budget)
        throw BudgetExceeded("lookahead tree exceeded " + std::to_string(budget) + " nodes",
                             tree.nodes.size());
      auto child = plant.step(t, e);
      const NodeLabel l = label_of(child, d);
      tree.nodes[i].children.push_back(tree.nodes.size());
      tree.nodes.push_back({e, i, d, std::move(child), l, false, false, {}});
    }
  }
  return tree;
}

/// Marks the attitude targets f^N_a(s): legal-marked traces of length at most
/// N-1 (conservative) or N, plus every legal depth-N trace (optimistic).
template <class Token>
void label_attitude(LookaheadTree<Token>& tree, Attitude a) {
  for (auto& n : tree.nodes) {
    if (a == Attitude::conservative)
      n.target = n.label == NodeLabel::legal_marked && n.depth + 1 <= tree.window;
    else
      n.target = n.label == NodeLabel::legal_marked || n.label == NodeLabel::pending;
  }
}

/// Backward induction for the tree-level supremal controllable sublanguage of
/// the targets, then restriction to nodes whose ancestors all survive.
template <class Token>
void supremal_on_tree(LookaheadTree<Token>& tree, const Alphabet& sigma) {
  std::vector<char> ok(tree.size(), 0);
  for (std::size_t i = tree.size(); i-- > 0;) {
    const auto& n = tree.nodes[i];
    if (n.label == NodeLabel::illegal) continue;
    bool uc_ok = true, reach = n.target;
    for (std::size_t c : n.children) {
      if (ok[c]) reach = true;
      else if (!sigma.controllable(*tree.nodes[c].event)) uc_ok = false;
    }
    ok[i] = uc_ok && reach;
  }
  for (std::size_t i = 0; i < tree.size(); ++i) {
    auto& n = tree.nodes[i];
    n.survives = ok[i] && (i == 0 || tree.nodes[n.parent].survives);
  }
}

inline ControlDecision error_decision(std::vector<EventId> uncontrollable) {
  std::sort(uncontrollable.begin(), uncontrollable.end());
  return {std::move(uncontrollable), true};
}

template <LabeledPlant P>
ControlDecision control_action(const LookaheadTree<typename P::token_type>& tree, const P& plant) {
  auto uc = active_uncontrollable(plant, tree.root().token);
  if (!tree.root().survives) return error_decision(std::move(uc));
  std::vector<EventId> enabled = std::move(uc);
  for (std::size_t c : tree.root().children)
    if (tree.nodes[c].survives) enabled.push_back(*tree.nodes[c].event);
  std::sort(enabled.begin(), enabled.end());
  enabled.erase(std::unique(enabled.begin(), enabled.end()), enabled.end());
  return {std::move(enabled), false};
}

/// Full window-supervisor step on an explicit tree.
template <LabeledPlant P>
ControlDecision llp_decision(const P& plant, const typename P::token_type& token, unsigned window,
                             Attitude a, std::size_t* tree_nodes = nullptr) {
  auto tree = build_tree(plant, token, window);
  label_attitude(tree, a);
  supremal_on_tree(tree, plant.alphabet());
  if (tree_nodes) *tree_nodes = tree.size();
  return control_action(tree, plant);
}

/// Memoized form of the same backward induction. Survival of a subtree rooted
/// at a token with r levels below it depends only on (token, r), so one table
/// serves every window size of one attitude.
template <LabeledPlant P>
class WindowEvaluator {
 public:
  using Token = typename P::token_type;

  WindowEvaluator(const P& plant, Attitude a) : plant_(&plant), attitude_(a) {}

  Attitude attitude() const { return attitude_; }

  /// Whether a node carrying `t` with `r` remaining levels survives the bottom-up pass.
  bool good(const Token& t, unsigned r) {
    Entry& e0 = entry(t);
    if (e0.legality == Legality::illegal) return false;
    if (r == 0) return attitude_ == Attitude::optimistic;
    if (e0.good.size() <= r) e0.good.resize(r + 1, unknown);
    if (e0.good[r] != unknown) return e0.good[r];
    const bool marked = e0.legality == Legality::legal_marked;
    // Entries are never erased and map nodes are stable, so e0 outlives the recursion.
    const auto& succ = e0.successors;
    bool uc_ok = true, reach = marked;
    for (const auto& [ev, child] : succ) {
      const bool g = good(child, r - 1);
      if (g) reach = true;
      else if (!plant_->alphabet().controllable(ev)) {
        uc_ok = false;
        break;
      }
    }
    e0.good[r] = uc_ok && reach;
    return e0.good[r];
  }

  ControlDecision decide(const Token& t, unsigned window) {
    if (window < 1) throw ConfigError("window size must be at least 1");
    auto uc = active_uncontrollable(*plant_, t);
    if (!good(t, window)) return error_decision(std::move(uc));
    std::vector<EventId> enabled;
    const auto& succ = entry(t).successors;
    for (const auto& [ev, child] : succ)
      if (!plant_->alphabet().controllable(ev) || good(child, window - 1)) enabled.push_back(ev);
    std::sort(enabled.begin(), enabled.end());
    return {std::move(enabled), false};
  }

  std::size_t tokens_seen() const { return table_.size(); }

 private:
  static constexpr std::int8_t unknown = -1;
  struct Entry {
    Legality legality;
    std::vector<std::pair<EventId, Token>> successors;
    std::vector<std::int8_t> good;
  };

  Entry& entry(const Token& t) {
    auto it = table_.find(t);
    if (it != table_.end()) return it->second;
    Entry e{plant_->legality(t), {}, {}};
    for (EventId ev : plant_->active(t)) e.successors.emplace_back(ev, plant_->step(t, ev));
    return table_.emplace(t, std::move(e)).first->second;
  }

  const P* plant_;
  Attitude attitude_;
  std::unordered_map<Token, Entry> table_;
};

/// Node count of the full depth-N tree from `t`, saturating at the maximum of
/// std::uint64_t.
template <GenerativePlant P>
class TreeSizeCounter {
 public:
  using Token = typename P::token_type;
  explicit TreeSizeCounter(const P& plant) : plant_(&plant) {}

  std::uint64_t count(const Token& t, unsigned r) {
    if (r == 0) return 1;
    auto& row = memo_[t];
    if (row.size() > r && row[r]) return row[r];
    std::uint64_t total = 1;
    for (EventId e : plant_->active(t)) {
      const std::uint64_t c = count(plant_->step(t, e), r - 1);
      total = (c > max_count - total) ? max_count : total + c;
    }
    auto& row2 = memo_[t];
    if (row2.size() <= r) row2.resize(r + 1, 0);
    row2[r] = total;
    return total;
  }

 private:
  static constexpr std::uint64_t max_count = std::numeric_limits<std::uint64_t>::max();
  const P* plant_;
  std::unordered_map<Token, std::vector<std::uint64_t>> memo_;
};

/// State-feedback LLP policy over recognizer states, for closed-loop extraction.
inline StatePolicy llp_policy(const Recognizer& r, Attitude a, unsigned window) {
  auto plant = std::make_shared<RecognizerPlant>(r);
  auto eval = std::make_shared<WindowEvaluator<RecognizerPlant>>(*plant, a);
  return [plant, eval, window](StateId q) { return eval->decide(q, window); };
}

/// Same policy computed on explicit trees (exponential; small windows only).
inline StatePolicy llp_tree_policy(const Recognizer& r, Attitude a, unsigned window) {
  auto plant = std::make_shared<RecognizerPlant>(r);
  return [plant, a, window](StateId q) { return llp_decision(*plant, q, window, a); };
}

}  // namespace llp
