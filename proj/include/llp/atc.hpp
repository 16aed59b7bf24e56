#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "llp/alphabet.hpp"
#include "llp/automaton.hpp"
#include "llp/error.hpp"
#include "llp/lang_ops.hpp"
#include "llp/plant.hpp"

namespace llp::atc {

// Airspace ring, clockwise from the top-left corner. The airfield is the
// centre square of the 3x3 grid.
enum Section : std::uint8_t { TL, TM, TR, MR, BR, BM, BL, ML };
inline constexpr unsigned num_sections = 8;
inline constexpr std::array<std::string_view, num_sections> section_names{"TL", "TM", "TR", "MR",
                                                                          "BR", "BM", "BL", "ML"};

inline constexpr unsigned max_supported_aircraft = 8;

/// Per-aircraft event kinds. Moves are named by the section being left:
/// alpha leaves TL for TM, ..., nu leaves ML for TL.
enum class Kind : std::uint8_t {
  alpha, beta, gamma, theta, kappa, lambda, mu, nu,
  eta,     // land from MR
  delta,   // take off into ML
  rho1, rho2, rho3, rho4,  // enter at gate 1..4
  chi1, chi3,              // leave from TL / BR
  n_rho1, n_rho2, n_rho3, n_rho4,  // arrival notifications
  n_delta,                         // departure notification
};
inline constexpr unsigned kinds_per_aircraft = 21;

inline std::string_view kind_name(Kind k) {
  static constexpr std::array<std::string_view, kinds_per_aircraft> names{
      "alpha", "beta", "gamma", "theta", "kappa", "lambda", "mu",    "nu",    "eta",    "delta", "rho1",
      "rho2",  "rho3", "rho4",  "chi1",  "chi3",   "~rho1", "~rho2", "~rho3", "~rho4", "~delta"};
  return names[static_cast<unsigned>(k)];
}

inline bool kind_controllable(Kind k) { return k < Kind::n_rho1; }

/// Arrival gates rho^1..rho^4 sit at the four corners.
inline constexpr std::array<Section, 4> gate_section{TL, TR, BR, BL};

struct AtcConfig {
  unsigned max_aircraft = 5;
  /// Adds the amended plant: notification separations.
  bool modified = false;
  bool arrivals = true;
  bool departures = true;
  /// Reuse the index of an aircraft that has left; otherwise each index is used once.
  bool recycle_indices = true;
  /// Mark every plant state (and so every safe state of K).
  bool mark_safe = false;
  /// Count uncontrollable notifications as actions in delay and separation rules.
  bool count_uncontrollable_actions = false;

  unsigned arrival_delay_limit = 1;
  unsigned departure_delay_limit = 10;
  unsigned exit_separation = 5;
  unsigned departure_notice_separation = 10;  // modified only
  unsigned arrival_notice_separation = 5;     // modified only, per gate

  void validate() const {
    if (max_aircraft < 1 || max_aircraft > max_supported_aircraft)
      throw ConfigError("max_aircraft must be in 1.." + std::to_string(max_supported_aircraft));
    for (unsigned v : {arrival_delay_limit, departure_delay_limit, exit_separation, departure_notice_separation,
                       arrival_notice_separation})
      if (v < 1 || v > 100) throw ConfigError("delay and separation limits must be in 1..100");
  }
};

/// Aircraft phase codes.
namespace phase {
inline constexpr std::uint8_t absent = 0;
inline constexpr std::uint8_t dep_wait = 1;
inline constexpr std::uint8_t arr_pending = 2;  // + gate index 0..3
inline constexpr std::uint8_t dep_at = 8;       // + section
inline constexpr std::uint8_t arr_at = 16;      // + section
inline bool is_arr_pending(std::uint8_t p) { return p >= arr_pending && p < arr_pending + 4; }
inline bool is_dep_at(std::uint8_t p) { return p >= dep_at && p < dep_at + num_sections; }
inline bool is_arr_at(std::uint8_t p) { return p >= arr_at && p < arr_at + num_sections; }
inline bool airborne(std::uint8_t p) { return is_dep_at(p) || is_arr_at(p); }
inline unsigned section_of(std::uint8_t p) { return is_dep_at(p) ? p - dep_at : p - arr_at; }
}  // namespace phase

/// Plant state plus the specification monitor's counters. Byte-packed so that
/// equality and hashing are over the raw representation.
struct AtcToken {
  std::array<std::uint8_t, max_supported_aircraft> phase{};
  std::array<std::uint8_t, 4> since_arrival_notice{};  // modified plant
  std::uint8_t since_departure_notice = 0;             // modified plant
  std::uint8_t used = 0;                               // indices consumed, no-recycle mode
  std::uint8_t arrival_wait = 0;                       // spec monitor
  std::uint8_t departure_wait = 0;                     // spec monitor
  std::array<std::uint8_t, 2> exit_gap{};              // spec monitor: chi1, chi3
  std::uint8_t violated = 0;                           // spec monitor, absorbing
  std::uint8_t reserved = 0;

  bool operator==(const AtcToken&) const = default;
};
static_assert(sizeof(AtcToken) == 20);

}  // namespace llp::atc

template <>
struct std::hash<llp::atc::AtcToken> {
  std::size_t operator()(const llp::atc::AtcToken& t) const noexcept {
    return std::hash<std::string_view>{}(std::string_view(reinterpret_cast<const char*>(&t), sizeof t));
  }
};

namespace llp::atc {

inline Alphabet atc_alphabet(unsigned max_aircraft) {
  Alphabet sigma;
  for (unsigned i = 1; i <= max_aircraft; ++i)
    for (unsigned k = 0; k < kinds_per_aircraft; ++k) {
      const Kind kind = static_cast<Kind>(k);
      sigma.add(std::string(kind_name(kind)) + "_" + std::to_string(i), kind_controllable(kind));
    }
  return sigma;
}

/// The uncontrolled airspace: adjacent controllers G_0 composed with one
/// subplant per present aircraft. Subplants are added on a notification and
/// dropped after landing or leaving. Spec-monitor fields are left untouched.
class AtcPlant {
 public:
  using token_type = AtcToken;

  explicit AtcPlant(AtcConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    sigma_ = atc_alphabet(cfg_.max_aircraft);
  }

  const AtcConfig& config() const { return cfg_; }
  const Alphabet& alphabet() const { return sigma_; }

  EventId event(Kind k, unsigned aircraft) const {
    return static_cast<EventId>((aircraft - 1) * kinds_per_aircraft + static_cast<unsigned>(k));
  }
  Kind kind_of(EventId e) const { return static_cast<Kind>(e % kinds_per_aircraft); }
  unsigned aircraft_of(EventId e) const { return e / kinds_per_aircraft + 1; }

  AtcToken initial() const {
    AtcToken t;
    t.since_departure_notice = static_cast<std::uint8_t>(cfg_.departure_notice_separation);
    t.since_arrival_notice.fill(static_cast<std::uint8_t>(cfg_.arrival_notice_separation));
    t.exit_gap.fill(static_cast<std::uint8_t>(cfg_.exit_separation));
    return t;
  }

  bool is_marked(const AtcToken& t) const {
    if (cfg_.mark_safe) return true;
    for (unsigned i = 0; i < cfg_.max_aircraft; ++i)
      if (t.phase[i] != phase::absent) return false;
    return true;
  }

  std::vector<EventId> active(const AtcToken& t) const {
    std::vector<EventId> out;
    for (unsigned i = 1; i <= cfg_.max_aircraft; ++i) {
      const std::uint8_t p = t.phase[i - 1];
      if (p == phase::dep_wait) out.push_back(event(Kind::delta, i));
      else if (phase::is_arr_pending(p)) out.push_back(event(static_cast<Kind>(static_cast<unsigned>(Kind::rho1) + p - phase::arr_pending), i));
      else if (phase::is_dep_at(p)) {
        const unsigned s = phase::section_of(p);
        if (s == TL) out.push_back(event(Kind::chi1, i));
        if (s == BR) out.push_back(event(Kind::chi3, i));
        else out.push_back(event(static_cast<Kind>(s), i));
      } else if (phase::is_arr_at(p)) {
        const unsigned s = phase::section_of(p);
        out.push_back(s == MR ? event(Kind::eta, i) : event(static_cast<Kind>(s), i));
      }
    }
    if (const unsigned i = free_index(t)) {
      if (cfg_.departures && !departure_pending(t) &&
          (!cfg_.modified || t.since_departure_notice >= cfg_.departure_notice_separation))
        out.push_back(event(Kind::n_delta, i));
      if (cfg_.arrivals && !arrival_pending(t))
        for (unsigned g = 0; g < 4; ++g)
          if (!cfg_.modified || t.since_arrival_notice[g] >= cfg_.arrival_notice_separation)
            out.push_back(event(static_cast<Kind>(static_cast<unsigned>(Kind::n_rho1) + g), i));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  AtcToken step(const AtcToken& t, EventId e) const {
    auto next = successor(t, e);
    if (!next)
      throw InactiveEventError("event '" + (e < sigma_.size() ? sigma_.name(e) : std::string("?")) +
                               "' is not active");
    return *next;
  }

  /// Index a new notification would use; 0 when none is free.
  unsigned free_index(const AtcToken& t) const {
    for (unsigned i = 1; i <= cfg_.max_aircraft; ++i)
      if (t.phase[i - 1] == phase::absent && (cfg_.recycle_indices || !(t.used >> (i - 1) & 1u))) return i;
    return 0;
  }

  bool departure_pending(const AtcToken& t) const {
    for (unsigned i = 0; i < cfg_.max_aircraft; ++i)
      if (t.phase[i] == phase::dep_wait) return true;
    return false;
  }
  bool arrival_pending(const AtcToken& t) const {
    for (unsigned i = 0; i < cfg_.max_aircraft; ++i)
      if (phase::is_arr_pending(t.phase[i])) return true;
    return false;
  }

  std::string describe(const AtcToken& t) const {
    std::string out;
    for (unsigned i = 1; i <= cfg_.max_aircraft; ++i) {
      const std::uint8_t p = t.phase[i - 1];
      if (p == phase::absent) continue;
      if (!out.empty()) out += ' ';
      out += std::to_string(i) + ':';
      if (p == phase::dep_wait) out += "waiting";
      else if (phase::is_arr_pending(p)) out += "pending" + std::to_string(p - phase::arr_pending + 1);
      else out += std::string(phase::is_dep_at(p) ? "dep@" : "arr@") + std::string(section_names[phase::section_of(p)]);
    }
    return out.empty() ? "empty" : out;
  }

 private:
  std::optional<AtcToken> successor(const AtcToken& t, EventId e) const {
    if (e >= sigma_.size()) return std::nullopt;
    const auto act = active(t);
    if (!std::binary_search(act.begin(), act.end(), e)) return std::nullopt;
    const Kind k = kind_of(e);
    const unsigned i = aircraft_of(e);
    AtcToken n = t;
    std::uint8_t& p = n.phase[i - 1];
    switch (k) {
      case Kind::delta: p = phase::dep_at + ML; break;
      case Kind::rho1: case Kind::rho2: case Kind::rho3: case Kind::rho4:
        p = phase::arr_at + gate_section[static_cast<unsigned>(k) - static_cast<unsigned>(Kind::rho1)];
        break;
      case Kind::chi1: case Kind::chi3: case Kind::eta: p = phase::absent; break;
      case Kind::n_delta:
        p = phase::dep_wait;
        if (!cfg_.recycle_indices) n.used |= static_cast<std::uint8_t>(1u << (i - 1));
        break;
      case Kind::n_rho1: case Kind::n_rho2: case Kind::n_rho3: case Kind::n_rho4:
        p = static_cast<std::uint8_t>(phase::arr_pending + static_cast<unsigned>(k) - static_cast<unsigned>(Kind::n_rho1));
        if (!cfg_.recycle_indices) n.used |= static_cast<std::uint8_t>(1u << (i - 1));
        break;
      default: {  // clockwise move out of the section named by the event
        const unsigned to = (static_cast<unsigned>(k) + 1) % num_sections;
        p = static_cast<std::uint8_t>((phase::is_dep_at(p) ? phase::dep_at : phase::arr_at) + to);
      }
    }
    if (cfg_.modified) {
      const bool counts = kind_controllable(k) || cfg_.count_uncontrollable_actions;
      auto bump = [](std::uint8_t& c, unsigned cap) { c = static_cast<std::uint8_t>(std::min<unsigned>(cap, c + 1u)); };
      if (k == Kind::n_delta) n.since_departure_notice = 0;
      else if (counts) bump(n.since_departure_notice, cfg_.departure_notice_separation);
      for (unsigned g = 0; g < 4; ++g) {
        if (static_cast<unsigned>(k) == static_cast<unsigned>(Kind::n_rho1) + g) n.since_arrival_notice[g] = 0;
        else if (counts) bump(n.since_arrival_notice[g], cfg_.arrival_notice_separation);
      }
    }
    return n;
  }

  AtcConfig cfg_;
  Alphabet sigma_;
};

/// Plant plus specification monitor. A token is illegal once any rule has
/// been broken: two aircraft in one section, an arrival delayed by more than
/// the arrival limit, a departure delayed beyond its limit, or two exits
/// through one gate closer than the exit separation.
class AtcSystem {
 public:
  using token_type = AtcToken;

  explicit AtcSystem(AtcConfig cfg) : plant_(cfg) {}

  const AtcPlant& plant() const { return plant_; }
  const AtcConfig& config() const { return plant_.config(); }
  const Alphabet& alphabet() const { return plant_.alphabet(); }
  AtcToken initial() const { return plant_.initial(); }
  std::vector<EventId> active(const AtcToken& t) const { return plant_.active(t); }
  bool is_marked(const AtcToken& t) const { return plant_.is_marked(t); }

  Legality legality(const AtcToken& t) const {
    if (t.violated) return Legality::illegal;
    return plant_.is_marked(t) ? Legality::legal_marked : Legality::legal_unmarked;
  }

  AtcToken step(const AtcToken& t, EventId e) const {
    AtcToken n = plant_.step(t, e);
    if (t.violated) return n;  // monitor fields stay at their reset values
    const AtcConfig& cfg = plant_.config();
    const Kind k = plant_.kind_of(e);
    const bool counts = kind_controllable(k) || cfg.count_uncontrollable_actions;
    bool bad = false;

    // Delay of the pending arrival / departure, excluding its own entry event.
    const bool own_entry = k >= Kind::rho1 && k <= Kind::rho4;
    if (plant_.arrival_pending(t)) {
      if (own_entry) n.arrival_wait = 0;
      else if (counts && ++n.arrival_wait > cfg.arrival_delay_limit) bad = true;
    }
    if (plant_.departure_pending(t)) {
      if (k == Kind::delta) n.departure_wait = 0;
      else if (counts && ++n.departure_wait > cfg.departure_delay_limit) bad = true;
    }
    for (unsigned g = 0; g < 2; ++g) {
      const Kind exit = g == 0 ? Kind::chi1 : Kind::chi3;
      if (k == exit) {
        if (n.exit_gap[g] < cfg.exit_separation) bad = true;
        n.exit_gap[g] = 0;
      } else if (counts) {
        n.exit_gap[g] = static_cast<std::uint8_t>(std::min<unsigned>(cfg.exit_separation, n.exit_gap[g] + 1u));
      }
    }
    std::array<unsigned, num_sections> occupancy{};
    for (unsigned j = 0; j < cfg.max_aircraft; ++j)
      if (phase::airborne(n.phase[j]) && ++occupancy[phase::section_of(n.phase[j])] > 1) bad = true;

    if (bad) {
      const AtcToken fresh = plant_.initial();
      n.arrival_wait = n.departure_wait = 0;
      n.exit_gap = fresh.exit_gap;
      n.violated = 1;
    }
    return n;
  }

 private:
  AtcPlant plant_;
};

/// Number of states reachable in a generative plant, by breadth-first search.
template <GenerativePlant P>
std::size_t count_states(const P& plant, std::size_t budget) {
  using Token = typename P::token_type;
  std::unordered_set<Token> seen;
  std::deque<Token> queue{plant.initial()};
  seen.insert(plant.initial());
  while (!queue.empty()) {
    const Token t = queue.front();
    queue.pop_front();
    for (EventId e : plant.active(t)) {
      Token n = plant.step(t, e);
      if (seen.insert(n).second) {
        if (seen.size() > budget)
          throw BudgetExceeded("state count exceeded " + std::to_string(budget), budget);
        queue.push_back(std::move(n));
      }
    }
  }
  return seen.size();
}

/// Explicit automaton of a generative plant; states are named x0, x1, ...
template <GenerativePlant P>
Automaton materialize(const P& plant, std::size_t budget) {
  using Token = typename P::token_type;
  Automaton a(plant.alphabet());
  std::unordered_map<Token, StateId> index;
  std::deque<std::pair<StateId, Token>> queue;
  auto intern = [&](const Token& t) {
    auto it = index.find(t);
    if (it != index.end()) return it->second;
    if (index.size() >= budget)
      throw BudgetExceeded("explicit product exceeded " + std::to_string(budget) + " states", index.size());
    const StateId q = a.add_state("x" + std::to_string(index.size()), plant.is_marked(t));
    index.emplace(t, q);
    queue.emplace_back(q, t);
    return q;
  };
  a.set_initial(intern(plant.initial()));
  while (!queue.empty()) {
    auto [q, t] = std::move(queue.front());
    queue.pop_front();
    for (EventId e : plant.active(t)) a.add_transition(q, e, intern(plant.step(t, e)));
  }
  return a;
}

inline Automaton explicit_product(const AtcConfig& cfg, std::size_t budget) {
  return materialize(AtcPlant(cfg), budget);
}

/// Adjacent-controller subplant G_0: state "d,a" with d = pending departure
/// (0/1) and a = gate of the pending arrival (0 = none). Only "0,0" is marked.
inline Automaton adjacent_controllers(const AtcConfig& cfg) {
  cfg.validate();
  Alphabet sigma;
  for (unsigned i = 1; i <= cfg.max_aircraft; ++i)
    for (Kind k : {Kind::delta, Kind::rho1, Kind::rho2, Kind::rho3, Kind::rho4, Kind::n_rho1, Kind::n_rho2,
                   Kind::n_rho3, Kind::n_rho4, Kind::n_delta})
      sigma.add(std::string(kind_name(k)) + "_" + std::to_string(i), kind_controllable(k));
  Automaton g(sigma);
  auto name = [](unsigned d, unsigned a) { return std::to_string(d) + "," + std::to_string(a); };
  for (unsigned d = 0; d < 2; ++d)
    for (unsigned a = 0; a < 5; ++a) g.add_state(name(d, a), d == 0 && a == 0);
  g.set_initial(*g.find_state("0,0"));
  auto ev = [&](Kind k, unsigned i) { return sigma.at(std::string(kind_name(k)) + "_" + std::to_string(i)); };
  for (unsigned i = 1; i <= cfg.max_aircraft; ++i)
    for (unsigned d = 0; d < 2; ++d)
      for (unsigned a = 0; a < 5; ++a) {
        const StateId s = *g.find_state(name(d, a));
        if (d == 0) g.add_transition(s, ev(Kind::n_delta, i), *g.find_state(name(1, a)));
        else g.add_transition(s, ev(Kind::delta, i), *g.find_state(name(0, a)));
        if (a == 0) {
          for (unsigned gate = 1; gate <= 4; ++gate)
            g.add_transition(s, ev(static_cast<Kind>(static_cast<unsigned>(Kind::n_rho1) + gate - 1), i),
                             *g.find_state(name(d, gate)));
        } else {
          g.add_transition(s, ev(static_cast<Kind>(static_cast<unsigned>(Kind::rho1) + a - 1), i),
                           *g.find_state(name(d, 0)));
        }
      }
  return g;
}

/// Aircraft subplant G_i: from `idle`, either a departure (notification,
/// take-off into ML, clockwise to an exit at TL or BR) or an arrival
/// (notification, entry at a corner gate, clockwise to MR, landing). `done` is marked.
inline Automaton aircraft_subplant(unsigned i) {
  Alphabet sigma;
  for (unsigned k = 0; k < kinds_per_aircraft; ++k) {
    const Kind kind = static_cast<Kind>(k);
    sigma.add(std::string(kind_name(kind)) + "_" + std::to_string(i), kind_controllable(kind));
  }
  Automaton g(sigma);
  auto ev = [&](Kind k) { return static_cast<EventId>(k); };
  const StateId idle = g.add_state("idle");
  const StateId wait = g.add_state("waiting");
  const StateId done = g.add_state("done", true);
  g.set_initial(idle);
  std::array<StateId, num_sections> dep{}, arr{};
  for (unsigned s : {ML, TL, TM, TR, MR, BR}) dep[s] = g.add_state("dep_" + std::string(section_names[s]));
  for (unsigned s = 0; s < num_sections; ++s) arr[s] = g.add_state("arr_" + std::string(section_names[s]));
  g.add_transition(idle, ev(Kind::n_delta), wait);
  g.add_transition(wait, ev(Kind::delta), dep[ML]);
  for (unsigned s : {ML, TL, TM, TR, MR}) g.add_transition(dep[s], ev(static_cast<Kind>(s)), dep[(s + 1) % num_sections]);
  g.add_transition(dep[TL], ev(Kind::chi1), done);
  g.add_transition(dep[BR], ev(Kind::chi3), done);
  for (unsigned gate = 0; gate < 4; ++gate) {
    const StateId pend = g.add_state("pending" + std::to_string(gate + 1));
    g.add_transition(idle, ev(static_cast<Kind>(static_cast<unsigned>(Kind::n_rho1) + gate)), pend);
    g.add_transition(pend, ev(static_cast<Kind>(static_cast<unsigned>(Kind::rho1) + gate)), arr[gate_section[gate]]);
  }
  for (unsigned s = 0; s < num_sections; ++s)
    if (s != MR) g.add_transition(arr[s], ev(static_cast<Kind>(s)), arr[(s + 1) % num_sections]);
  g.add_transition(arr[MR], ev(Kind::eta), done);
  return g;
}

inline constexpr unsigned witness_horizon = 4;
inline constexpr std::string_view example_witness = "~rho1_1 rho1_1 ~rho1_2 alpha_1 rho1_2 ~rho1_3";

namespace detail {

/// Every continuation within `horizon` events breaks a rule, whatever the
/// supervisor enables: some uncontrollable event leads to doom, or the state
/// is unmarked and every event, including benign notifications the supervisor
/// could wait for, leads to doom. An unmarked dead end is doomed (blocking).
inline bool doomed(const AtcSystem& sys, const AtcToken& t, unsigned horizon) {
  if (sys.legality(t) == Legality::illegal) return true;
  if (horizon == 0) return false;
  bool all_doomed = !sys.is_marked(t);
  for (EventId e : sys.active(t)) {
    const bool d = doomed(sys, sys.step(t, e), horizon - 1);
    if (d && !sys.alphabet().controllable(e)) return true;
    if (!d) all_doomed = false;
  }
  return all_doomed;
}

}  // namespace detail

/// Replays the standard witness and checks that every policy from the reached
/// state breaks a rule within `witness_horizon` events: two controllable
/// moves plus up to two interleaved notifications. Returns
/// nullopt when the configuration does not admit the witness (modified rules,
/// arrivals disabled). Throws ModelDrift when the standard configuration fails
/// the check.
inline std::optional<Trace> witness_kup_empty(const AtcConfig& cfg) {
  const AtcSystem sys(cfg);
  const bool standard = !cfg.modified && cfg.arrivals && cfg.max_aircraft >= 3;
  auto fail = [&](const std::string& why) -> std::optional<Trace> {
    if (standard) throw ModelDrift("witness check failed: " + why);
    return std::nullopt;
  };
  if (cfg.max_aircraft < 3) return fail("fewer than three aircraft");
  const Trace s = parse_trace(sys.alphabet(), example_witness);
  AtcToken t = sys.initial();
  for (EventId e : s) {
    const auto act = sys.active(t);
    if (!std::binary_search(act.begin(), act.end(), e)) return fail("'" + sys.alphabet().name(e) + "' not active");
    t = sys.step(t, e);
    if (sys.legality(t) == Legality::illegal) return fail("witness prefix already breaks a rule");
  }
  if (!detail::doomed(sys, t, witness_horizon)) return fail("a policy avoids violation within the horizon");
  return s;
}

}  // namespace llp::atc
