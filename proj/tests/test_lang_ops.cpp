#include <catch_amalgamated.hpp>

#include <algorithm>

#include "llp/atc.hpp"
#include "llp/lang_ops.hpp"
#include "support/fixtures.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace llp;
using namespace llp::testing;

namespace {

std::set<std::string> as_strings(const Alphabet& sigma, const TraceSet& ts) {
  std::set<std::string> out;
  for (const auto& t : ts) out.insert(format_trace(sigma, t));
  return out;
}

bool subset(const TraceSet& a, const TraceSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

Automaton atc_two_aircraft() {
  atc::AtcConfig cfg;
  cfg.max_aircraft = 2;
  return atc::explicit_product(cfg, 100'000);
}

}  // namespace

TEST_CASE("trace format", "[lang_ops]") {
  const Automaton f1 = fixture("f1_plant");
  CHECK(format_trace(f1.alphabet(), {}) == "<eps>");
  CHECK(parse_trace(f1.alphabet(), "<eps>").empty());
  CHECK(format_trace(f1.alphabet(), parse_trace(f1.alphabet(), "a  u\n")) == "a u");
  CHECK_THROWS(parse_trace(f1.alphabet(), "a zz"));
}

TEST_CASE("post_language", "[lang_ops]") {
  const Automaton f2 = fixture("f2_plant");
  CHECK(bisimilar(post_language(f2, {}), f2));
  const Automaton p = post_language(f2, tr(f2.alphabet(), "a"));
  CHECK(as_strings(p.alphabet(), enumerate(p, 4)) == std::set<std::string>{"<eps>", "b"});
  CHECK(as_strings(p.alphabet(), enumerate(p, 4, true)) == std::set<std::string>{"b"});
  CHECK_THROWS_AS(post_language(f2, tr(f2.alphabet(), "b")), TraceNotInLanguage);
}

TEST_CASE("ATC post-language after a departure reaches MR", "[lang_ops][atc]") {
  const Automaton g = atc_two_aircraft();
  const Alphabet& s = g.alphabet();
  const Automaton p = post_language(g, tr(s, "~delta_1 delta_1 nu_1 alpha_1 beta_1 gamma_1"));
  CHECK(generates(p, tr(s, "theta_1")));
  CHECK(generates(p, tr(s, "theta_1 chi3_1")));
  CHECK(accepts(p, tr(s, "theta_1 chi3_1")));
  const auto t3 = as_strings(s, truncate(p, 3));
  CHECK(t3.count("theta_1"));
  CHECK(t3.count("theta_1 chi3_1"));
  CHECK(t3.count("~rho1_2 theta_1 rho1_2"));
  CHECK(generates(p, tr(s, "~rho2_2 rho2_2 theta_1 gamma_2 chi3_1 eta_2")));
}

TEST_CASE("truncate", "[lang_ops]") {
  const Automaton f2 = fixture("f2_plant");
  CHECK(as_strings(f2.alphabet(), truncate(f2, 0)) == std::set<std::string>{"<eps>"});
  CHECK(as_strings(f2.alphabet(), truncate(f2, 1)) == std::set<std::string>{"<eps>", "a"});
  CHECK(as_strings(f2.alphabet(), truncate(f2, 5, true)) == std::set<std::string>{"a b"});
  const Automaton f1 = fixture("f1_plant");
  CHECK(as_strings(f1.alphabet(), truncate(f1, 2)) == std::set<std::string>{"<eps>", "a", "a b", "a u"});
}

TEST_CASE("prefix_closure", "[lang_ops]") {
  const Automaton f2 = fixture("f2_plant");
  CHECK(prefix_closure({}).empty());
  CHECK(as_strings(f2.alphabet(), prefix_closure({tr(f2.alphabet(), "a b")})) ==
        std::set<std::string>{"<eps>", "a", "a b"});
  const Automaton f1 = fixture("f1_plant");
  CHECK(prefix_closure(truncate(f1, 2)) == truncate(f1, 2));
}

TEST_CASE("truncation agrees with enumeration and is monotone", "[lang_ops][property]") {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const Automaton a = random_instance(seed, SpecShape::general).plant;
    for (unsigned n = 0; n <= 6; ++n) {
      REQUIRE(truncate(a, n) == enumerate(a, n));
      REQUIRE(truncate(a, n, true) == enumerate(a, n, true));
      if (n < 6) REQUIRE(subset(truncate(a, n), truncate(a, n + 1)));
    }
  }
}

TEST_CASE("post-language truncation is compositional", "[lang_ops][property]") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Automaton a = random_instance(seed, SpecShape::general).plant;
    const auto all = enumerate(a, 7);
    for (const auto& s : enumerate(a, 3)) {
      const Automaton p = post_language(a, s);
      TraceSet expected;
      for (const auto& t : all)
        if (t.size() >= s.size() && t.size() - s.size() <= 4 && std::equal(s.begin(), s.end(), t.begin()))
          expected.insert(Trace(t.begin() + static_cast<long>(s.size()), t.end()));
      REQUIRE(truncate(p, 4) == expected);
    }
  }
}

TEST_CASE("prefix_closure is idempotent and extensive", "[lang_ops][property]") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Automaton a = random_instance(seed, SpecShape::general).plant;
    const TraceSet m = truncate(a, 5, true);
    const TraceSet c = prefix_closure(m);
    REQUIRE(subset(m, c));
    REQUIRE(prefix_closure(c) == c);
    REQUIRE(c == prefixes(m));
  }
}
