#include <catch_amalgamated.hpp>

#include <deque>
#include <unordered_set>

#include "llp/atc.hpp"
#include "llp/bounds.hpp"
#include "llp/session.hpp"
#include "support/fixtures.hpp"

using namespace llp;
using namespace llp::testing;
using namespace llp::atc;

namespace {

AtcConfig with_aircraft(unsigned n) {
  AtcConfig cfg;
  cfg.max_aircraft = n;
  return cfg;
}

AtcToken replay(const AtcSystem& sys, const std::string& trace) {
  AtcToken t = sys.initial();
  for (EventId e : tr(sys.alphabet(), trace)) t = sys.step(t, e);
  return t;
}

}  // namespace

TEST_CASE("ATC alphabet and initial state", "[atc]") {
  const AtcPlant plant(with_aircraft(2));
  CHECK(plant.alphabet().size() == 42);
  CHECK(plant.alphabet().name(plant.event(Kind::n_rho1, 2)) == "~rho1_2");
  CHECK(plant.kind_of(plant.event(Kind::chi3, 2)) == Kind::chi3);
  CHECK(plant.aircraft_of(plant.event(Kind::chi3, 2)) == 2);
  const auto act = plant.active(plant.initial());
  CHECK(names(plant.alphabet(), act) == "{~rho1_1 ~rho2_1 ~rho3_1 ~rho4_1 ~delta_1}");
  for (EventId e : act) CHECK_FALSE(plant.alphabet().controllable(e));
  CHECK(plant.describe(plant.initial()) == "empty");
}

TEST_CASE("a departing aircraft crosses the airspace and leaves", "[atc]") {
  const AtcSystem sys(with_aircraft(1));
  const AtcToken mid = replay(sys, "~delta_1 delta_1 nu_1 alpha_1 beta_1 gamma_1");
  CHECK(sys.plant().describe(mid) == "1:dep@MR");
  CHECK(sys.legality(mid) == Legality::legal_unmarked);
  const AtcToken end = sys.step(sys.step(mid, sys.alphabet().at("theta_1")), sys.alphabet().at("chi3_1"));
  CHECK(sys.legality(end) == Legality::legal_marked);
  CHECK(sys.plant().describe(end) == "empty");
  // The aircraft left again, so the plant part is back where it started.
  AtcToken plant_end = end;
  plant_end.exit_gap = sys.initial().exit_gap;
  CHECK(plant_end == sys.initial());
}

TEST_CASE("arrivals fly clockwise to the runway", "[atc]") {
  const AtcPlant plant(with_aircraft(1));
  AtcToken t = plant.step(plant.initial(), plant.event(Kind::n_rho3, 1));
  CHECK(plant.describe(t) == "1:pending3");
  t = plant.step(t, plant.event(Kind::rho3, 1));
  std::string path = plant.describe(t);
  while (plant.active(t).size() == 1 && plant.kind_of(plant.active(t).front()) != Kind::eta) {
    t = plant.step(t, plant.active(t).front());
    path += " " + plant.describe(t);
  }
  CHECK(path == "1:arr@BR 1:arr@BM 1:arr@BL 1:arr@ML 1:arr@TL 1:arr@TM 1:arr@TR 1:arr@MR");
  CHECK(plant.step(t, plant.event(Kind::eta, 1)) == plant.initial());
  CHECK_THROWS_AS(plant.step(plant.initial(), plant.event(Kind::alpha, 1)), InactiveEventError);
}

TEST_CASE("departures choose between leaving and circling at TL", "[atc]") {
  const AtcPlant plant(with_aircraft(1));
  AtcToken t = plant.initial();
  for (Kind k : {Kind::n_delta, Kind::delta, Kind::nu}) t = plant.step(t, plant.event(k, 1));
  CHECK(names(plant.alphabet(), plant.active(t)) == "{alpha_1 chi1_1}");
  CHECK(plant.step(t, plant.event(Kind::chi1, 1)) == plant.initial());
}

TEST_CASE("two aircraft in one section are illegal", "[atc]") {
  const AtcSystem sys(with_aircraft(2));
  const AtcToken t = replay(sys, "~delta_1 delta_1 ~delta_2");
  CHECK(sys.legality(t) == Legality::legal_unmarked);
  const AtcToken bad = sys.step(t, sys.alphabet().at("delta_2"));
  CHECK(sys.legality(bad) == Legality::illegal);
  // The violation is absorbing.
  CHECK(sys.legality(sys.step(bad, sys.alphabet().at("nu_1"))) == Legality::illegal);
}

TEST_CASE("a late arrival violates the delay limit", "[atc]") {
  const AtcSystem sys(with_aircraft(2));
  const AtcToken t = replay(sys, "~delta_1 delta_1 ~rho2_2 nu_1");
  CHECK(sys.legality(t) == Legality::legal_unmarked);
  CHECK(sys.legality(sys.step(t, sys.alphabet().at("alpha_1"))) == Legality::illegal);
  CHECK(sys.legality(sys.step(t, sys.alphabet().at("rho2_2"))) == Legality::legal_unmarked);
}

TEST_CASE("marked exactly when the airspace is empty", "[atc][property]") {
  const AtcPlant plant(with_aircraft(2));
  std::unordered_set<AtcToken> seen{plant.initial()};
  std::deque<AtcToken> queue{plant.initial()};
  while (!queue.empty()) {
    const AtcToken t = queue.front();
    queue.pop_front();
    REQUIRE(plant.is_marked(t) == (plant.describe(t) == "empty"));
    for (EventId e : plant.active(t))
      if (const AtcToken n = plant.step(t, e); seen.insert(n).second) queue.push_back(n);
  }
  CHECK(seen.size() == 383);
}

TEST_CASE("explicit product sizes", "[atc]") {
  // One aircraft: empty, waiting to depart, 4 pending arrivals, 6 departure
  // sections (ML TL TM TR MR BR) and all 8 sections on arrival.
  CHECK(explicit_product(with_aircraft(1), 1000).num_states() == 20);
  try {
    explicit_product(with_aircraft(3), 100);
    FAIL("budget not enforced");
  } catch (const BudgetExceeded& e) {
    CHECK(e.partial_count == 100);
  }
}

TEST_CASE("ATC plant has longest uncontrollable subtrace two", "[atc]") {
  CHECK(n_u(explicit_product(with_aircraft(3), 100'000)) == BoundValue::of(2));
  CHECK(n_u(explicit_product(with_aircraft(1), 1000)) == BoundValue::of(1));
}

TEST_CASE("witness that K-up is empty", "[atc]") {
  for (unsigned n : {3u, 4u, 5u}) {
    const auto w = witness_kup_empty(with_aircraft(n));
    REQUIRE(w);
    CHECK(format_trace(atc_alphabet(n), *w) == example_witness);
  }
  AtcConfig mod = with_aircraft(3);
  mod.modified = true;
  CHECK_FALSE(witness_kup_empty(mod));
  // The amended separation blocks the second arrival notice at gate 1.
  const AtcSystem msys(mod);
  const AtcToken t = replay(msys, "~rho1_1 rho1_1");
  for (EventId e : msys.active(t)) CHECK(msys.alphabet().name(e) != "~rho1_2");

  AtcConfig no_arr = with_aircraft(3);
  no_arr.arrivals = false;
  CHECK_FALSE(witness_kup_empty(no_arr));
}

TEST_CASE("modified plant spaces notifications", "[atc]") {
  AtcConfig cfg = with_aircraft(3);
  cfg.modified = true;
  const AtcPlant plant(cfg);
  AtcToken t = plant.step(plant.initial(), plant.event(Kind::n_delta, 1));
  t = plant.step(t, plant.event(Kind::delta, 1));
  unsigned actions = 1;
  auto has_departure_notice = [&] {
    for (EventId e : plant.active(t))
      if (plant.kind_of(e) == Kind::n_delta) return true;
    return false;
  };
  CHECK_FALSE(has_departure_notice());
  for (Kind k : {Kind::nu, Kind::alpha, Kind::beta, Kind::gamma, Kind::theta}) {
    t = plant.step(t, plant.event(k, 1));
    ++actions;
  }
  t = plant.step(t, plant.event(Kind::chi3, 1));
  ++actions;
  CHECK(actions == 7);
  CHECK_FALSE(has_departure_notice());
}

TEST_CASE("finite traffic uses each index once", "[atc]") {
  AtcConfig cfg = with_aircraft(1);
  cfg.recycle_indices = false;
  const AtcPlant plant(cfg);
  AtcToken t = plant.initial();
  for (Kind k : {Kind::n_rho2, Kind::rho2, Kind::gamma, Kind::eta}) t = plant.step(t, plant.event(k, 1));
  CHECK(plant.describe(t) == "empty");
  CHECK(plant.active(t).empty());
  CHECK(plant.free_index(t) == 0);
}

TEST_CASE("mark_safe marks every safe state along supervised runs", "[atc]") {
  AtcConfig cfg = with_aircraft(2);
  cfg.modified = true;
  cfg.mark_safe = true;
  const AtcSystem sys(cfg);
  const Recognizer r = explore(sys);
  const RecognizerPlant p(r);
  const BoundValue n = window_bounds(r).recommended.at(Attitude::optimistic);
  REQUIRE(n.defined());
  std::size_t steps = 0;
  for (std::uint64_t seed = 1; steps < 500; ++seed) {
    SupervisionSession<RecognizerPlant> sess(p, llp_supervisor(p, Attitude::optimistic, n.value()));
    sess.run(random_source(seed), 500 - steps);
    steps += sess.trace().size() + 1;
    StateId q = r.initial();
    for (EventId e : sess.trace()) {
      q = r.graph().step(q, e);
      REQUIRE(r.legality(q) == Legality::legal_marked);
    }
  }
}

TEST_CASE("ATC configuration validation", "[atc]") {
  AtcConfig cfg;
  cfg.max_aircraft = 0;
  CHECK_THROWS_AS(AtcPlant(cfg), ConfigError);
  cfg.max_aircraft = max_supported_aircraft + 1;
  CHECK_THROWS_AS(AtcPlant(cfg), ConfigError);
  cfg = AtcConfig{};
  cfg.exit_separation = 0;
  CHECK_THROWS_AS(AtcPlant(cfg), ConfigError);
  CHECK_NOTHROW(AtcPlant(AtcConfig{}));
}

TEST_CASE("subplant automata", "[atc]") {
  const Automaton g0 = adjacent_controllers(with_aircraft(2));
  CHECK(g0.num_states() == 10);
  const Automaton g1 = aircraft_subplant(1);
  CHECK(g1.num_states() == 21);
  CHECK(g1.alphabet().size() == kinds_per_aircraft);
  CHECK(accepts(g1, tr(g1.alphabet(), "~delta_1 delta_1 nu_1 alpha_1 beta_1 gamma_1 theta_1 chi3_1")));
  CHECK(accepts(g1, tr(g1.alphabet(), "~rho2_1 rho2_1 gamma_1 eta_1")));
}
