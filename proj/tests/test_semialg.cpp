#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support/builders.hpp"
#include "tropc/json_io.hpp"
#include "tropc/semialg.hpp"

using namespace tropc;
namespace sa = tropc::semialg;

TEST_CASE("polynomial evaluation matches hand arithmetic") {
  const auto markov = ts::markov_poly();
  const Vec p333{3, 3, 3};
  CHECK(markov.eval(p333) == 0.0);  // 27 - 27
  const std::vector<sa::Rational> r333{3, 3, 3};
  CHECK(markov.eval_exact(r333) == 0);

  const auto one = sa::Polynomial::constant({"x", "y"}, 1);
  CHECK(one.eval(Vec{17.0, 0.3}) == 1.0);

  const auto plane = ts::plane_poly();
  CHECK(plane.eval(Vec{1, 1, 1}) == 0.0);  // 1 - 1 - 0
  CHECK(plane.eval(Vec{1, 1, 2}) == 1.0);
}

TEST_CASE("polynomial evaluation errors") {
  const auto p = ts::make_poly({"x", "y"}, {{{-1, 0}, "1"}});
  CHECK_THROWS_AS(p.eval(Vec{1.0}), std::invalid_argument);        // arity
  CHECK_THROWS_AS(p.eval(Vec{0.0, 1.0}), std::invalid_argument);   // x^-1 at 0
  CHECK_THROWS_AS(p.eval(Vec{-1.0, 1.0}), std::invalid_argument);  // negative base
  CHECK(p.eval(Vec{4.0, 9.0}) == 0.25);
}

TEST_CASE("polynomial arithmetic and exact rational coefficients") {
  CHECK(sa::parse_rational("3/4") == sa::Rational(3, 4));
  CHECK(sa::parse_rational("-0.25") == sa::Rational(-1, 4));
  CHECK(sa::parse_rational("7") == 7);
  CHECK_THROWS_AS(sa::parse_rational("x"), SchemaError);

  const auto p = ts::make_poly({"x"}, {{{2}, "1/3"}});
  const auto q = ts::make_poly({"x"}, {{{2}, "2/3"}, {{0}, "-1"}});
  const auto s = p + q;
  CHECK(s.eval(Vec{2.0}) == 3.0);  // x^2 - 1 at 2
  const auto z = p - p;
  CHECK(z.is_zero());
}

TEST_CASE("log-space evaluation is overflow-free and signed") {
  // x + y at log point (700, 700): value exp(700)*2, far past double overflow
  const auto p = ts::make_poly({"x", "y"}, {{{1, 0}, "1"}, {{0, 1}, "1"}});
  const auto le = p.eval_log(Vec{700.0, 700.0});
  CHECK(le.sign == 1);
  CHECK_THAT(le.log_abs, Catch::Matchers::WithinAbs(700.0 + std::log(2.0), 1e-12));

  const auto d = ts::make_poly({"x", "y"}, {{{1, 0}, "1"}, {{0, 1}, "-1"}});
  CHECK(d.eval_log(Vec{700.0, 700.0}, 1e-9).sign == 0);
  CHECK(d.eval_log(Vec{700.0, 699.0}, 1e-9).sign == 1);
  CHECK(d.eval_log(Vec{699.0, 700.0}, 1e-9).sign == -1);
}

TEST_CASE("set containment") {
  const auto S = ts::plane_set();
  CHECK(S.contains(Vec{1, 1, 1}));
  CHECK_FALSE(S.contains(Vec{1, 1, 2}));
  CHECK_FALSE(S.contains(Vec{-1, 1, 1}));  // orthant restriction
  CHECK_THROWS_AS(S.contains(Vec{1, 1}), std::invalid_argument);

  const auto orthant = sa::SemiAlgebraicSet::orthant({"x", "y", "z"});
  CHECK(orthant.contains(Vec{1, 1, 1}));

  // boolean tree: (x - 2 >= 0) or (1 - x >= 0), on the line
  auto ge = [](sa::Polynomial p) {
    sa::Condition c;
    c.poly = std::move(p);
    c.rel = sa::Rel::GeZero;
    return sa::SetNode::sign(std::move(c));
  };
  sa::SemiAlgebraicSet U(
      {"x"},
      sa::SetNode::any({ge(ts::make_poly({"x"}, {{{1}, "1"}, {{0}, "-2"}})),
                        ge(ts::make_poly({"x"}, {{{1}, "-1"}, {{0}, "1"}}))}),
      true);
  CHECK(U.contains(Vec{0.5}));
  CHECK(U.contains(Vec{3.0}));
  CHECK_FALSE(U.contains(Vec{1.5}));
}

TEST_CASE("sampling a full-measure set is deterministic") {
  const auto orthant = sa::SemiAlgebraicSet::orthant({"x", "y"});
  const std::vector<std::pair<double, double>> box{{1, 2}, {1, 2}};
  const auto pts = sa::sample(orthant, box, 4, 7);
  REQUIRE(pts.size() == 4);
  for (const auto& p : pts) {
    CHECK((p[0] >= 1 && p[0] <= 2));
    CHECK((p[1] >= 1 && p[1] <= 2));
  }
  const auto again = sa::sample(orthant, box, 4, 7);
  CHECK(pts == again);  // bit-for-bit
  CHECK(sa::sample(orthant, box, 4, 8) != pts);
}

TEST_CASE("sampling solves equality constraints from the hint") {
  const auto S = ts::plane_set(true);
  const std::vector<std::pair<double, double>> box{{1, 10}, {1, 10}, {1e-3, 200}};
  sa::SampleDiagnostics diag;
  const auto pts = sa::sample(S, box, 10, 42, {}, &diag);
  REQUIRE(pts.size() == 10);
  for (const auto& p : pts) {
    const double z = p[0] * p[0] + (p[1] - 1) * (p[1] - 1);
    CHECK_THAT(p[2], Catch::Matchers::WithinRel(z, 1e-12));
    CHECK(S.contains(p, 1e-9));
  }
  CHECK(diag.accepted == 10);
}

TEST_CASE("sampling solves equality constraints by line bisection without a hint") {
  const auto S = ts::plane_set(false);
  const std::vector<std::pair<double, double>> box{{1, 3}, {1, 3}, {1e-3, 20}};
  const auto pts = sa::sample(S, box, 6, 11);
  REQUIRE(pts.size() == 6);
  for (const auto& p : pts) CHECK(S.contains(p, 1e-9));
}

TEST_CASE("sampling an empty set exhausts the budget") {
  // x < 0 intersected with the positive orthant is empty: -x > 0
  sa::Condition c;
  c.poly = ts::make_poly({"x", "y"}, {{{1, 0}, "-1"}});
  c.rel = sa::Rel::GtZero;
  sa::SemiAlgebraicSet S({"x", "y"}, sa::SetNode::sign(std::move(c)), true);
  sa::SampleOptions opt;
  opt.max_attempts_per_point = 200;
  CHECK_THROWS_AS(sa::sample(S, {{1, 2}, {1, 2}}, 2, 1, opt), NumericError);
}

TEST_CASE("evaluation is linear in coefficients (property)") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    sa::Polynomial::TermMap ta, tb;
    for (int t = 0; t < 5; ++t) {
      std::vector<int> e{static_cast<int>(rng.below(4)), static_cast<int>(rng.below(4)),
                         static_cast<int>(rng.below(4))};
      ta[e] = sa::Rational(static_cast<long>(rng.below(19)) - 9);
      std::vector<int> f{static_cast<int>(rng.below(4)), static_cast<int>(rng.below(4)),
                         static_cast<int>(rng.below(4))};
      tb[f] = sa::Rational(static_cast<long>(rng.below(19)) - 9);
    }
    const sa::Polynomial p({"x", "y", "z"}, ta), q({"x", "y", "z"}, tb);
    const Vec x{rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
    const double lhs = (p + q).eval(x);
    const double rhs = p.eval(x) + q.eval(x);
    CHECK_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-12 * (1.0 + std::fabs(rhs))));
  }
}

TEST_CASE("json schemas parse and reject garbage") {
  const auto pj = io::parse_json(R"({"vars":["x","y"],
    "terms":[{"exp":[2,0],"coef":"1"},{"exp":[0,1],"coef":"-1/2"}]})", "test");
  const auto p = io::polynomial_from_json(pj);
  CHECK(p.eval(Vec{2.0, 4.0}) == 2.0);
  const auto back = io::polynomial_to_json(p);
  CHECK(io::polynomial_from_json(back).eval(Vec{2.0, 4.0}) == 2.0);

  const auto sj = io::parse_json(R"({"vars":["x","y","z"],"orthant":true,
    "set":{"all":[{"sign":{"poly":{"terms":[{"exp":[0,0,1],"coef":"1"},
      {"exp":[2,0,0],"coef":"-1"},{"exp":[0,2,0],"coef":"-1"},
      {"exp":[0,1,0],"coef":"2"},{"exp":[0,0,0],"coef":"-1"}]},
      "rel":"=0","solve":"z"}}]}})", "test");
  const auto S = io::set_from_json(sj);
  CHECK(S.contains(Vec{1, 1, 1}));
  CHECK_FALSE(S.contains(Vec{1, 1, 2}));

  CHECK_THROWS_AS(io::polynomial_from_json(io::parse_json(R"({"terms":[]})", "t")), SchemaError);
  CHECK_THROWS_AS(io::set_from_json(io::parse_json(R"({"vars":["x"],"set":{"xor":[]}})", "t")),
                  SchemaError);
  CHECK_THROWS_AS(io::parse_json("{", "t"), SchemaError);
}
