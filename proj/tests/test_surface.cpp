#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "support/builders.hpp"
#include "tropc/surface.hpp"

using namespace tropc;
namespace sf = tropc::surface;
namespace cv = tropc::charvar;
namespace fam = tropc::families;

namespace {

const sf::TraceTriple kBase{3, 3, 3};

sf::Slope S(long p, long q) { return sf::Slope::of(p, q); }

Vec intersection_vector(const sf::Slope& s, const std::vector<sf::Slope>& curves) {
  Vec v;
  for (const auto& c : curves)
    v.push_back(static_cast<double>(sf::intersection_number(s, c)));
  return v;
}

}  // namespace

TEST_CASE("slopes canonicalize") {
  CHECK(S(2, 4) == S(1, 2));
  CHECK(S(-3, -6) == S(1, 2));
  CHECK(S(3, -6) == S(-1, 2));
  CHECK(S(5, 0) == S(1, 0));
  CHECK(S(-5, 0) == S(1, 0));
  CHECK(sf::Slope::parse("2/3") == S(2, 3));
  CHECK(sf::Slope::parse("-1/2") == S(-1, 2));
  CHECK(sf::Slope::parse("4") == S(4, 1));
  CHECK_THROWS_AS(sf::Slope::of(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(sf::Slope::parse("x/y"), SchemaError);
}

TEST_CASE("intersection numbers") {
  CHECK(sf::intersection_number(S(0, 1), S(1, 0)) == 1);
  CHECK(sf::intersection_number(S(2, 3), S(2, 3)) == 0);
  CHECK(sf::intersection_number(S(1, 2), S(1, 3)) == 1);
  CHECK(sf::intersection_number(S(1, 2), S(2, 1)) == 3);
}

TEST_CASE("intersection numbers match the flat-torus crossing oracle") {
  for (long p1 = -8; p1 <= 8; ++p1)
    for (long q1 = 0; q1 <= 8; ++q1) {
      if (std::gcd(std::labs(p1), q1) != 1) continue;
      const auto s1 = S(p1 == 0 && q1 == 0 ? 1 : p1, q1);
      for (long p2 = -8; p2 <= 8; ++p2)
        for (long q2 = 0; q2 <= 8; ++q2) {
          if (std::gcd(std::labs(p2), q2) != 1) continue;
          const auto s2 = S(p2 == 0 && q2 == 0 ? 1 : p2, q2);
          CHECK(sf::intersection_number(s1, s2) ==
                ts::crossing_count(s1.p, s1.q, s2.p, s2.q));
        }
    }
}

TEST_CASE("slope words") {
  CHECK(sf::slope_word(S(0, 1)).str() == "a");
  CHECK(sf::slope_word(S(1, 0)).str() == "b");
  CHECK(sf::slope_word(S(1, 1)).str() == "ab");
  CHECK(sf::slope_word(S(1, 2)).str() == "aab");
  CHECK(sf::slope_word(S(2, 1)).str() == "abb");
  CHECK(sf::slope_word(S(2, 3)).str() == "aabab");
  CHECK(sf::slope_word(S(-1, 1)).str() == "aB");
  // exponent sums (a: q, b: p); primitive by coprimality
  for (long p = -6; p <= 6; ++p)
    for (long q = 1; q <= 6; ++q) {
      if (std::gcd(std::labs(p), q) != 1) continue;
      const auto w = sf::slope_word(S(p, q));
      CHECK(w.exponent_sum(1) == q);
      CHECK(w.exponent_sum(2) == p);
    }
}

TEST_CASE("trace triples and the relation locus") {
  CHECK(kBase.on_teichmuller_locus());
  CHECK_FALSE(sf::TraceTriple{3, 3, 4}.on_teichmuller_locus());
  CHECK_FALSE(sf::TraceTriple{2, 2, 2}.on_teichmuller_locus());  // below 3
}

TEST_CASE("markov steps") {
  const auto t1 = sf::markov_step(kBase, 3);
  CHECK(t1.x == 3.0);
  CHECK(t1.y == 3.0);
  CHECK(t1.z == 6.0);
  CHECK(t1.on_teichmuller_locus(1e-9));  // 9+9+36 = 54 = 3*3*6

  // inverse pair returns exactly
  const auto back = sf::markov_step(t1, 3, true);
  CHECK(back.x == 3.0);
  CHECK(back.y == 3.0);
  CHECK(back.z == 3.0);

  // which=3 fixes x, which=2 fixes y, which=1 fixes z
  CHECK(sf::markov_step(kBase, 3).x == 3.0);
  CHECK(sf::markov_step(kBase, 2).y == 3.0);
  CHECK(sf::markov_step(kBase, 1).z == 3.0);
  CHECK_THROWS_AS(sf::markov_step(kBase, 4), std::invalid_argument);
  CHECK_THROWS_AS(sf::markov_step({3, 3, 4}, 3), std::invalid_argument);

  // growth rate of the z-recurrence is (3+sqrt(5))/2
  sf::TraceTriple t = kBase;
  double prev = t.z;
  double ratio = 0.0;
  for (int k = 0; k < 25; ++k) {
    t = sf::markov_step(t, 3);
    ratio = t.z / prev;
    prev = t.z;
  }
  CHECK_THAT(ratio, Catch::Matchers::WithinRel((3.0 + std::sqrt(5.0)) / 2.0, 1e-6));
}

TEST_CASE("twists fix their own slope and its trace") {
  const std::vector<sf::Slope> slopes{S(0, 1), S(1, 0), S(1, 1), S(1, 2), S(2, 1), S(2, 3)};
  const auto rho0 = cv::fricke_representation(3, 3, 3);
  for (const auto& c : slopes) {
    const auto w = sf::slope_word(c);
    const double tr0 = cv::trace_of_word(rho0, w);
    // the trace maps preserve the relation locus (reading the fixed trace
    // off a degenerated triple cancels catastrophically, so the constancy
    // check itself goes through word pullback below)
    sf::TraceTriple t = kBase;
    for (int k = 0; k < 3; ++k) {
      t = sf::twist_along(c, t);
      CHECK(t.relation_residual() <= 1e-9);
    }
    // word-pullback route at depth: the twisted word cyclically reduces to
    // a conjugate of the original, so its trace is reproduced exactly
    const auto twist = sf::twist_word_action(c);
    cv::Word wk = w;
    for (int k = 0; k < 30; ++k) wk = twist(wk);
    CHECK_THAT(cv::trace_of_word(rho0, wk.cyclically_reduced()),
               Catch::Matchers::WithinRel(tr0, 1e-11));
    // inverse twist returns to the start
    sf::TraceTriple u = sf::twist_along(c, kBase);
    u = sf::twist_along(c, u, true);
    CHECK_THAT(u.x, Catch::Matchers::WithinRel(3.0, 1e-12));
    CHECK_THAT(u.y, Catch::Matchers::WithinRel(3.0, 1e-12));
    CHECK_THAT(u.z, Catch::Matchers::WithinRel(3.0, 1e-12));
    // the inverse word action undoes the action
    const auto untwist = sf::twist_word_action(c, true);
    CHECK(untwist(twist(sf::slope_word(S(1, 3)))) == sf::slope_word(S(1, 3)));
  }
  CHECK_THROWS_AS(sf::twist_along(S(-1, 2), kBase), std::invalid_argument);
}

TEST_CASE("word action and trace maps implement the same twist") {
  const auto rho0 = cv::fricke_representation(3, 3, 3);
  for (const auto& c : {S(0, 1), S(1, 0), S(1, 2), S(2, 3)}) {
    const auto twist = sf::twist_word_action(c);
    cv::Word wa = cv::Word::parse("a"), wb = cv::Word::parse("b");
    sf::TraceTriple t = kBase;
    for (int k = 0; k < 4; ++k) {
      t = sf::twist_along(c, t);
      wa = twist(wa);
      wb = twist(wb);
      CHECK_THAT(cv::trace_of_word(rho0, wa.cyclically_reduced()),
                 Catch::Matchers::WithinRel(t.x, 1e-9));
      CHECK_THAT(cv::trace_of_word(rho0, wb.cyclically_reduced()),
                 Catch::Matchers::WithinRel(t.y, 1e-9));
      CHECK_THAT(cv::trace_of_word(rho0, (wa * wb).cyclically_reduced()),
                 Catch::Matchers::WithinRel(t.z, 1e-9));
    }
  }
}

TEST_CASE("twist paths") {
  // twist along a: x fixed, y advances through the three-term recurrence
  const auto path = sf::twist_path(kBase, S(0, 1), 10);
  REQUIRE(path.max_steps == 11);
  Vec prev2 = path.point(0), prev1 = path.point(1);
  CHECK(prev1[1] == prev2[2]);  // y' = z
  for (std::size_t k = 2; k <= 10; ++k) {
    const Vec p = path.point(k);
    CHECK(p[0] == 3.0);
    CHECK_THAT(p[1], Catch::Matchers::WithinRel(3.0 * prev1[1] - prev2[1], 1e-12));
    prev2 = prev1;
    prev1 = p;
  }

  // translation length of the twisting curve is constant along the path
  const auto wa = sf::slope_word(S(0, 1));
  for (std::size_t k = 0; k <= 10; ++k) {
    const Vec p = path.point(k);
    const auto rho = cv::fricke_representation(p[0], p[1], p[2]);
    CHECK_THAT(cv::translation_length(cv::evaluate_word(rho, wa)),
               Catch::Matchers::WithinAbs(2.0 * std::acosh(1.5), 1e-9));
  }

  // zero steps: constant path
  const auto still = sf::twist_path(kBase, S(1, 2), 0);
  CHECK(still.max_steps == 1);
  CHECK_THROWS_AS(sf::twist_path({3, 3, 4}, S(0, 1), 5), std::invalid_argument);
}

TEST_CASE("limit spectra reproduce intersection vectors") {
  const std::vector<sf::Slope> curves{S(0, 1), S(1, 0), S(1, 1)};
  struct Case {
    sf::Slope twist;
    Vec expected;
  };
  const std::vector<Case> cases{
      {S(0, 1), {0, 1, 1}},
      {S(1, 1), {1, 1, 0}},
      {S(1, 2), {1, 2, 1}},
  };
  for (const auto& c : cases) {
    const auto res = sf::twist_limit_spectrum(kBase, c.twist, curves, 60);
    REQUIRE(res.status == fam::LimitStatus::Converged);
    CHECK(res.steps_used <= 60);
    CHECK(angle_between(res.direction, c.expected) <= 1e-3);
    CHECK(angle_between(res.direction, intersection_vector(c.twist, curves)) <= 1e-3);
  }
}

TEST_CASE("trace-triple and word-pullback spectra agree on a gentle flow") {
  const std::vector<sf::Slope> curves{S(0, 1), S(1, 0), S(1, 1)};
  const auto path = sf::twist_path(kBase, S(0, 1), 30);
  const auto via_triples = sf::limit_spectrum(path, curves, kBase);
  const auto via_words = sf::twist_limit_spectrum(kBase, S(0, 1), curves, 30);
  REQUIRE(via_triples.status == fam::LimitStatus::Converged);
  REQUIRE(via_words.status == fam::LimitStatus::Converged);
  CHECK(angle_between(via_triples.direction, via_words.direction) <= 1e-6);
}

TEST_CASE("train track chart") {
  CHECK(sf::chart_intersection(1, 0, S(0, 1)) == 1.0);
  CHECK(sf::chart_intersection(1, 1, S(1, 1)) == 0.0);
  CHECK_THROWS_AS(sf::chart_intersection(0, 0, S(1, 1)), std::invalid_argument);
  CHECK_THROWS_AS(sf::chart_intersection(-1, 1, S(1, 1)), std::invalid_argument);
  // integral coprime measures reproduce intersection numbers exactly
  for (long u = 0; u <= 10; ++u)
    for (long v = 0; v <= 10; ++v) {
      if (u == 0 && v == 0) continue;
      if (std::gcd(u, v) != 1) continue;
      for (long p = -10; p <= 10; ++p)
        for (long q = 0; q <= 10; ++q) {
          if (std::gcd(std::labs(p), q) != 1) continue;
          const auto s = S(p == 0 && q == 0 ? 1 : p, q);
          CHECK(sf::chart_intersection(static_cast<double>(u), static_cast<double>(v), s) ==
                static_cast<double>(sf::intersection_number(sf::Slope::of(u, v), s)));
        }
    }
  // the chart map is piecewise linear: positively homogeneous and convex
  // along rays in measure space
  CHECK(sf::chart_intersection(2.5, 1.5, S(1, 2)) == 2.5 * sf::chart_intersection(1, 0.6, S(1, 2)));
}

TEST_CASE("curve system sizes") {
  CHECK(sf::curve_system_sizes(2, 0) == std::pair<long, long>{9, 7});
  CHECK(sf::curve_system_sizes(1, 1) == std::pair<long, long>{3, 3});
  CHECK_THROWS_AS(sf::curve_system_sizes(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sf::curve_system_sizes(1, 0), std::invalid_argument);  // torus, chi = 0
}

TEST_CASE("length recovery from log traces") {
  CHECK_THAT(sf::length_from_log_trace(std::log(3.0)),
             Catch::Matchers::WithinRel(2.0 * std::acosh(1.5), 1e-12));
  CHECK_THAT(sf::length_from_log_trace(500.0), Catch::Matchers::WithinRel(1000.0, 1e-10));
  CHECK(sf::length_from_log_trace(std::log(2.0)) == 0.0);
}

TEST_CASE("thurston correspondence on a slope sample") {
  const std::vector<sf::Slope> curves{S(0, 1), S(1, 0), S(1, 1), S(1, 2), S(2, 1)};
  for (const auto& twist : {S(2, 1), S(1, 3)}) {
    const auto res = sf::twist_limit_spectrum(kBase, twist, curves, 60);
    REQUIRE(res.status == fam::LimitStatus::Converged);
    CHECK(angle_between(res.direction, intersection_vector(twist, curves)) <= 1e-3);
  }
}

TEST_CASE("mapping class relabeling permutes spectra exactly") {
  // the order-4 mapping class (p,q) -> (-q,p) swaps 0/1 <-> 1/0 and
  // 1/1 <-> -1/1; it is the composite of twists along 0/1, 1/0, 0/1
  const std::vector<sf::Slope> curves{S(0, 1), S(1, 0), S(1, 1), S(-1, 1)};
  const auto family = sf::twist_table_family(kBase, S(1, 2), curves, 60);
  const std::map<std::string, std::string> sigma{
      {"0/1", "1/0"}, {"1/0", "0/1"}, {"1/1", "-1/1"}, {"-1/1", "1/1"}};
  const auto relabeled = family.relabeled(sigma);
  const auto path = sf::step_path(60, 1e-4);
  fam::LimitOptions opts;
  opts.estimator = fam::LimitOptions::Estimator::Increment;
  opts.escape_norm = 20.0;
  const auto r0 = fam::boundary_limit(family, path, 0.36787944117144233, opts);
  const auto r1 = fam::boundary_limit(relabeled, path, 0.36787944117144233, opts);
  REQUIRE(r0.status == fam::LimitStatus::Converged);
  REQUIRE(r1.status == fam::LimitStatus::Converged);
  const Vec expected = family.permute_like(sigma, r0.direction);
  CHECK(r1.direction == expected);  // exact coordinate equality
}
