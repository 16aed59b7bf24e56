#include <catch_amalgamated.hpp>

#include <algorithm>

#include "llp/atc.hpp"
#include "llp/lookahead.hpp"
#include "llp/synthesis.hpp"
#include "support/fixtures.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace llp;
using namespace llp::testing;

namespace {

std::set<std::string> lang(const Automaton& a, unsigned depth, bool marked_only) {
  std::set<std::string> out;
  for (const auto& t : enumerate(a, depth, marked_only)) out.insert(format_trace(a.alphabet(), t));
  return out;
}

std::set<std::string> lang(const Alphabet& sigma, const TraceSetO& ts) {
  std::set<std::string> out;
  for (const auto& t : ts) out.insert(format_trace(sigma, t));
  return out;
}

StatePolicy enable_all(const Recognizer& r) {
  return [&r](StateId q) { return ControlDecision{r.graph().active(q), false}; };
}

/// Offline-optimal policy: enable uncontrollable events and controllable
/// events that stay inside K-up.
StatePolicy offline_policy(const Recognizer& r) {
  auto kup = std::make_shared<std::vector<char>>(supremal_states(r));
  return [&r, kup](StateId q) {
    std::vector<EventId> en;
    for (const auto& e : r.graph().edges(q))
      if (!r.alphabet().controllable(e.event) || (*kup)[e.target]) en.push_back(e.event);
    return ControlDecision{en, false};
  };
}

Automaton closed_spec_of(const Automaton& spec) {
  Automaton s = spec;
  for (StateId q = 0; q < s.num_states(); ++q) s.set_marked(q);
  return s;
}

}  // namespace

TEST_CASE("supremal controllable sublanguage on fixtures", "[synthesis]") {
  const Automaton f2 = fixture("f2_plant"), f2s = fixture("f2_spec");
  const Automaton k2 = supremal_controllable(f2, f2s);
  CHECK(lang(k2, 6, true) == std::set<std::string>{"a b"});
  CHECK(k2.num_states() == 3);
  // Brute force: the largest controllable sublanguage of K's depth-4 marked traces.
  const TraceOracle o2(f2, f2s);
  const auto subs2 = controllable_sublanguages(o2, k_marked_traces(f2, f2s, 4));
  REQUIRE(subs2);
  TraceSetO union2;
  for (const auto& s : *subs2) union2.insert(s.begin(), s.end());
  CHECK(lang(f2.alphabet(), union2) == std::set<std::string>{"a b"});

  const Automaton f1 = fixture("f1_plant"), f1s = fixture("f1_spec");
  CHECK(supremal_controllable(f1, f1s).is_empty());
  const TraceOracle o1(f1, f1s);
  const auto subs1 = controllable_sublanguages(o1, k_marked_traces(f1, f1s, 4));
  REQUIRE(subs1);
  CHECK(subs1->empty());
}

TEST_CASE("ATC unmodified supremal is empty", "[synthesis][atc]") {
  const auto w = atc::witness_kup_empty(atc::AtcConfig{});
  REQUIRE(w);
  CHECK(format_trace(atc::atc_alphabet(5), *w) == "~rho1_1 rho1_1 ~rho1_2 alpha_1 rho1_2 ~rho1_3");
}

TEST_CASE("infimal closed controllable superlanguage", "[synthesis]") {
  const Automaton f1 = fixture("f1_plant");
  const Automaton kdown = infimal_closed_controllable(f1, fixture("f1_spec_closed"));
  CHECK(lang(kdown, 6, true) == std::set<std::string>{"<eps>", "a", "a b", "a u"});

  // Spec equal to L(G): already controllable and closed.
  const Automaton lg = generated(f1);
  CHECK(lang(infimal_closed_controllable(f1, lg), 6, true) == lang(f1, 6, false));

  // Fully controllable alphabet: nothing to add. The plant is fully marked so K is closed.
  const Automaton f2 = generated(fixture("f2_plant"));
  const Automaton f2short = parse_automaton("alphabet:\n a c\n b c\nstates:\n s0 initial marked\n s1 marked\ntransitions:\n s0 a s1\n");
  CHECK(lang(infimal_closed_controllable(f2, f2short), 6, true) == std::set<std::string>{"<eps>", "a"});
  CHECK(lang(infimal_closed_controllable(f2, closed_spec_of(fixture("f2_spec"))), 6, true) ==
        std::set<std::string>{"<eps>", "a", "a b"});

  CHECK_THROWS_AS(infimal_closed_controllable(f1, fixture("f1_spec")), PrecisionError);
}

TEST_CASE("closed loop on fixtures", "[synthesis]") {
  const Automaton f1 = fixture("f1_plant"), f1s = fixture("f1_spec");
  const Recognizer r1 = build_recognizer(f1, f1s);
  const ClosedLoop all = closed_loop(r1, enable_all(r1));
  CHECK(language_equal(all.automaton, generated(f1)));

  const Automaton f2 = fixture("f2_plant"), f2s = fixture("f2_spec");
  const Recognizer r2 = build_recognizer(f2, f2s);
  const ClosedLoop opt = closed_loop(r2, offline_policy(r2));
  CHECK(lang(opt.automaton, 4, false) == std::set<std::string>{"<eps>", "a", "a b"});
  CHECK(lang(opt.automaton, 4, false) == lang(f2.alphabet(), TraceOracle(f2, f2s).closed_loop(3, Attitude::optimistic, 4)));

  const ClosedLoop llp1 = closed_loop(r1, llp_policy(r1, Attitude::optimistic, 2));
  CHECK(lang(llp1.automaton, 6, false) == std::set<std::string>{"<eps>"});
  CHECK(llp1.runtime_error[llp1.automaton.initial()]);
}

TEST_CASE("closed loop rejects a policy disabling an uncontrollable event", "[synthesis]") {
  const Recognizer r1 = build_recognizer(fixture("f1_plant"), fixture("f1_spec"));
  const StatePolicy only_c = [&r1](StateId q) {
    std::vector<EventId> en;
    for (EventId e : r1.graph().active(q))
      if (r1.alphabet().controllable(e)) en.push_back(e);
    return ControlDecision{en, false};
  };
  CHECK_THROWS_AS(closed_loop(r1, only_c), AdmissibilityError);
}

TEST_CASE("language comparison", "[synthesis]") {
  const Automaton f1 = fixture("f1_plant");
  CHECK(language_equal(f1, f1));
  const Recognizer r1 = build_recognizer(f1, fixture("f1_spec"));
  const ClosedLoop cons3 = closed_loop(r1, llp_policy(r1, Attitude::conservative, 3));
  const ClosedLoop optm2 = closed_loop(r1, llp_policy(r1, Attitude::optimistic, 2));
  CHECK(language_subset(cons3.automaton, optm2.automaton));

  const Automaton f2 = fixture("f2_plant");
  const auto neq = language_equal(generated(f2), f2);
  CHECK_FALSE(neq);
  REQUIRE(neq.witness);
  CHECK(format_trace(f2.alphabet(), *neq.witness) == "<eps>");
  CHECK_FALSE(neq.in_second);
}

TEST_CASE("language check agrees with bounded enumeration", "[synthesis][property]") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = random_instance(seed, SpecShape::general);
    const Automaton pairs[][2] = {{inst.spec, inst.plant}, {inst.plant, inst.spec}, {generated(inst.spec), generated(inst.plant)}};
    for (const auto& pr : pairs) {
      const LanguageCheck c = language_subset(pr[0], pr[1]);
      const auto la = lang(pr[0], 8, true), lb = lang(pr[1], 8, true);
      const bool bounded = std::includes(lb.begin(), lb.end(), la.begin(), la.end());
      if (c) {
        REQUIRE(bounded);
      } else {
        REQUIRE(c.witness);
        REQUIRE(accepts(pr[0], *c.witness));
        if (c.witness->size() <= 8) REQUIRE_FALSE(bounded);
      }
    }
  }
}

TEST_CASE("K-up contains every brute-force controllable sublanguage", "[synthesis][property]") {
  InstanceParams small;
  small.max_states = 6;
  unsigned checked = 0;
  for (std::uint64_t seed = 0; seed < 300 && checked < 60; ++seed) {
    const Instance inst = random_instance(seed, SpecShape::general, small);
    const TraceOracle o(inst.plant, inst.spec);
    const auto subs = controllable_sublanguages(o, k_marked_traces(inst.plant, inst.spec, 5), 10);
    if (!subs) continue;
    ++checked;
    const Automaton kup = supremal_controllable(inst.plant, inst.spec);
    for (const auto& s : *subs)
      for (const auto& t : s) REQUIRE(accepts(kup, t));
    // K-up is itself controllable and inside K.
    for (const auto& t : enumerate(kup, 5, true)) REQUIRE(o.legality(t) == Legality::legal_marked);
  }
  CHECK(checked >= 30);
}

TEST_CASE("closed loops keep every active uncontrollable event", "[synthesis][property]") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Instance inst = random_instance(seed, SpecShape::general);
    const Recognizer r = build_recognizer(inst.plant, inst.spec);
    for (Attitude a : {Attitude::conservative, Attitude::optimistic}) {
      const ClosedLoop loop = closed_loop(r, llp_policy(r, a, 3));
      for (StateId s = 0; s < loop.automaton.num_states(); ++s) {
        const StateId q = loop.recognizer_state[s];
        for (EventId e : active_uncontrollable(RecognizerPlant(r), q))
          REQUIRE(loop.automaton.successor(s, e) != no_state);
      }
    }
  }
}

TEST_CASE("optimistic closed loop lies between K-up closure and K-down", "[synthesis][property]") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    // The bounds presume a prefix-closed K, which the fully marked shape guarantees.
    const Instance inst = random_instance(seed, SpecShape::closed_language);
    const Recognizer r = build_recognizer(inst.plant, inst.spec);
    const Automaton kup = generated(supremal_controllable(r));
    const Automaton kdown = infimal_closed_controllable(inst.plant, inst.spec);
    for (unsigned n = 1; n <= 5; ++n) {
      const ClosedLoop loop = closed_loop(r, llp_policy(r, Attitude::optimistic, n));
      REQUIRE(language_subset(kup, loop.automaton));
      REQUIRE(language_subset(loop.automaton, kdown));
    }
  }
}

TEST_CASE("K-up nonempty iff conservative closed loop stays in its closure", "[synthesis][property]") {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const Instance inst = random_instance(seed, SpecShape::general);
    const Recognizer r = build_recognizer(inst.plant, inst.spec);
    const Automaton kup = supremal_controllable(r);
    for (unsigned n = 1; n <= 5; ++n) {
      const ClosedLoop loop = closed_loop(r, llp_policy(r, Attitude::conservative, n));
      const bool inside = static_cast<bool>(language_subset(loop.automaton, generated(kup)));
      // An empty K-up has an empty closure, which cannot contain epsilon.
      REQUIRE(inside == !kup.is_empty());
    }
  }
}
