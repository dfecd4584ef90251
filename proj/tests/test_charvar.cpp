#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support/builders.hpp"
#include "tropc/charvar.hpp"

using namespace tropc;
namespace cv = tropc::charvar;

namespace {

cv::Representation diag_rep2(double l) {
  return cv::Representation(2, {{"a", cv::Mat::diag({l, 1.0 / l})}});
}

cv::Word W(const char* s) { return cv::Word::parse(s); }

const double kSqrt5 = std::sqrt(5.0);

}  // namespace

TEST_CASE("words reduce and compose") {
  CHECK(W("aA").empty());
  CHECK(W("abBA").empty());
  CHECK(W("aab").str() == "aab");
  CHECK(W("ab").inverse().str() == "BA");
  CHECK((W("ab") * W("BA")).empty());
  CHECK(W("ab").pow(2).str() == "abab");
  CHECK(W("ab").pow(-1).str() == "BA");
  CHECK(W("aaBab").exponent_sum(1) == 3);
  CHECK(W("aaBab").exponent_sum(2) == 0);
  CHECK_THROWS_AS(W("a$b"), SchemaError);
}

TEST_CASE("word evaluation") {
  const auto rho = diag_rep2(2.0);
  const auto id = cv::evaluate_word(rho, W(""));
  CHECK(id.at(0, 0) == 1.0);
  CHECK(id.at(0, 1) == 0.0);
  const auto sq = cv::evaluate_word(rho, W("aa"));
  CHECK(sq.at(0, 0) == 4.0);
  CHECK(sq.at(1, 1) == 0.25);
  CHECK(cv::evaluate_word(rho, W("aA")).at(0, 0) == 1.0);
  CHECK_THROWS_AS(cv::evaluate_word(rho, W("b")), std::invalid_argument);
}

TEST_CASE("trace functions") {
  CHECK(cv::trace_of_word(diag_rep2(2.0), W("")) == 2.0);
  const cv::Representation rho3(3, {{"a", cv::Mat::diag({2.0, 1.0, 0.5})}});
  CHECK(cv::trace_of_word(rho3, W("")) == 3.0);
  CHECK(cv::trace_of_word(diag_rep2(2.0), W("a")) == 2.5);
  const cv::Representation rot(2, {{"a", cv::Mat::of2(0, -1, 1, 0)}});
  CHECK(cv::trace_of_word(rot, W("a")) == 0.0);
}

TEST_CASE("scaled word evaluation tracks huge products") {
  const auto rho = diag_rep2(1e80);
  const auto [m, ls] = cv::evaluate_word_scaled(rho, W("aaaaa"));  // 1e400 overflows plainly
  const auto [sign, logt] = cv::log_abs_trace(rho, W("aaaaa"));
  CHECK(sign == 1);
  CHECK_THAT(logt, Catch::Matchers::WithinRel(5.0 * std::log(1e80), 1e-12));
  CHECK(std::isfinite(m.max_abs()));
  CHECK(ls > 0.0);
}

TEST_CASE("eigenvalues of small matrices") {
  const auto d = cv::eigen(cv::Mat::diag({4.0, 1.0, 0.25}));
  CHECK_THAT(d.values[0].real(), Catch::Matchers::WithinAbs(4.0, 1e-12));
  CHECK_THAT(d.values[1].real(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(d.values[2].real(), Catch::Matchers::WithinAbs(0.25, 1e-12));
  CHECK((d.values[0].imag() == 0.0 && d.values[1].imag() == 0.0));
  CHECK((d.is_real[0] && d.is_real[1] && d.is_real[2]));
  CHECK_FALSE(d.near_degenerate);

  const auto f = cv::eigen(cv::Mat::of2(2, 1, 1, 1));
  CHECK_THAT(f.values[0].real(), Catch::Matchers::WithinAbs((3.0 + kSqrt5) / 2.0, 1e-12));
  CHECK_THAT(f.values[1].real(), Catch::Matchers::WithinAbs((3.0 - kSqrt5) / 2.0, 1e-12));

  const auto r = cv::eigen(cv::Mat::of2(0, -1, 1, 0));
  CHECK(r.values[0] == std::complex<double>(0.0, 1.0));
  CHECK(r.values[1] == std::complex<double>(0.0, -1.0));
  CHECK_FALSE(r.is_real[0]);

  // 3x3 with a complex pair: rotation block plus a fixed axis
  const auto rc = cv::eigen(cv::Mat::of3({0, -1, 0, 1, 0, 0, 0, 0, 1}));
  CHECK(rc.is_real[0]);  // modulus ties put the real value first
  CHECK_THAT(rc.values[0].real(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_FALSE(rc.is_real[1]);
  CHECK_THAT(std::fabs(rc.values[1].imag()), Catch::Matchers::WithinAbs(1.0, 1e-9));
  CHECK(cv::proximality(rc) == cv::Proximality::No);

  CHECK_THROWS_AS(cv::eigen(cv::Mat::of2(2, 0, 0, 2)), std::invalid_argument);  // det 4
}

TEST_CASE("eigenvalue products stay near one (property)") {
  Rng rng(5150);
  for (int t = 0; t < 200; ++t) {
    const auto m = ts::random_positive_spectrum3(rng);
    const auto e = cv::eigen(m);
    const auto prod = e.values[0] * e.values[1] * e.values[2];
    CHECK_THAT(prod.real(), Catch::Matchers::WithinAbs(1.0, 1e-7));
    CHECK_THAT(prod.imag(), Catch::Matchers::WithinAbs(0.0, 1e-7));
    CHECK(std::abs(e.values[0]) >= std::abs(e.values[1]));
    CHECK(std::abs(e.values[1]) >= std::abs(e.values[2]));
  }
}

TEST_CASE("proximality is a tri-state") {
  CHECK(cv::proximality(cv::Mat::diag({4.0, 1.0, 0.25})) == cv::Proximality::Yes);
  CHECK(cv::proximality(cv::Mat::of2(0, -1, 1, 0)) == cv::Proximality::No);
  CHECK(cv::proximality(cv::Mat::identity(2)) == cv::Proximality::No);
  CHECK(cv::proximality(cv::Mat::of2(1, 1, 0, 1)) == cv::Proximality::No);  // parabolic
  CHECK(cv::is_proximal(cv::Mat::of2(2, 1, 1, 1)));

  // the indeterminate band: top-modulus gap positive but within threshold
  cv::EigenData nearly;
  nearly.n = 2;
  nearly.values = {std::complex<double>(1.0 + 4e-10, 0.0), std::complex<double>(1.0, 0.0), 0.0};
  nearly.is_real = {true, true, false};
  CHECK(cv::proximality(nearly) == cv::Proximality::Indeterminate);
  nearly.near_degenerate = true;
  nearly.values[0] = 1.0;  // equal moduli but flagged ill-separated
  CHECK(cv::proximality(nearly) == cv::Proximality::Indeterminate);
}

TEST_CASE("eigenvalue ratio and translation length") {
  CHECK_THAT(cv::eigen_ratio(cv::Mat::diag({4.0, 1.0, 0.25})),
             Catch::Matchers::WithinRel(16.0, 1e-12));
  const double phi2 = (3.0 + kSqrt5) / 2.0;
  CHECK_THAT(cv::eigen_ratio(cv::Mat::of2(2, 1, 1, 1)),
             Catch::Matchers::WithinRel(phi2 * phi2, 1e-12));
  CHECK_THROWS_AS(cv::eigen_ratio(cv::Mat::identity(2)), std::invalid_argument);

  CHECK_THAT(cv::translation_length(cv::Mat::diag({4.0, 1.0, 0.25})),
             Catch::Matchers::WithinRel(std::log(16.0), 1e-12));
  // SL2 with trace 3: length 2 arccosh(3/2)
  CHECK_THAT(cv::translation_length(cv::Mat::of2(2, 1, 1, 1)),
             Catch::Matchers::WithinAbs(2.0 * std::acosh(1.5), 1e-12));
  const double e1 = std::exp(1.0);
  CHECK_THAT(cv::translation_length(cv::Mat::diag({e1, 1.0, 1.0 / e1})),
             Catch::Matchers::WithinAbs(2.0, 1e-12));
}

TEST_CASE("positive trace fixes signs at the base point") {
  // hyperbolic with trace -3
  const double mu = (3.0 + kSqrt5) / 2.0;
  const cv::Representation neg(2, {{"a", cv::Mat::diag({-mu, -1.0 / mu})}});
  CHECK_THAT(cv::positive_trace(neg, neg, W("a")), Catch::Matchers::WithinRel(3.0, 1e-12));
  // parabolic boundary of the locus: J = 2 = 2 cosh(0)
  const cv::Representation par(2, {{"a", cv::Mat::of2(1, 1, 0, 1)}});
  CHECK(cv::positive_trace(par, par, W("a")) == 2.0);
  // cosh round trip at trace 3
  const cv::Representation pos(2, {{"a", cv::Mat::diag({mu, 1.0 / mu})}});
  const double ell = cv::translation_length(cv::evaluate_word(pos, W("a")));
  CHECK_THAT(2.0 * std::cosh(ell / 2.0),
             Catch::Matchers::WithinRel(cv::positive_trace(pos, pos, W("a")), 1e-12));
  // vanishing trace at the base is an error
  const cv::Representation rot(2, {{"a", cv::Mat::of2(0, -1, 1, 0)}});
  CHECK_THROWS_AS(cv::positive_trace(rot, rot, W("a")), std::invalid_argument);
}

TEST_CASE("fixed points") {
  const auto [att, rep] = cv::fixed_points(cv::Mat::diag({4.0, 1.0, 0.25}));
  CHECK(att == Vec{1, 0, 0});
  CHECK(rep == Vec{0, 0, 1});

  const cv::Mat m = cv::Mat::of2(2, 1, 1, 1);
  const auto [x, y] = cv::fixed_points(m);
  const auto e = cv::eigen(m);
  // eigenvector residual check, independent of the solve route
  const Vec mx = m.apply(x);
  CHECK_THAT(mx[0], Catch::Matchers::WithinAbs(e.values[0].real() * x[0], 1e-12));
  CHECK_THAT(mx[1], Catch::Matchers::WithinAbs(e.values[0].real() * x[1], 1e-12));
  const Vec my = m.apply(y);
  CHECK_THAT(my[0], Catch::Matchers::WithinAbs(e.values[1].real() * y[0], 1e-12));

  // conjugation equivariance: fixed points of C A C^-1 are C * (fixed of A)
  Rng rng(31);
  const cv::Mat c = ts::random_unimodular2(rng);
  const auto [xc, yc] = cv::fixed_points(c * m * c.inverse());
  Vec cx = c.apply(x);
  double n = stable_norm(cx);
  for (auto& v : cx) v /= n;
  for (double v : cx)
    if (std::fabs(v) > 1e-12) {
      if (v < 0)
        for (auto& vv : cx) vv = -vv;
      break;
    }
  CHECK_THAT(xc[0], Catch::Matchers::WithinAbs(cx[0], 1e-9));
  CHECK_THAT(xc[1], Catch::Matchers::WithinAbs(cx[1], 1e-9));

  CHECK_THROWS_AS(cv::fixed_points(cv::Mat::identity(2)), std::invalid_argument);
}

TEST_CASE("fricke normal form realizes prescribed traces") {
  const auto rho = cv::fricke_representation(3, 3, 3);
  CHECK_THAT(cv::trace_of_word(rho, W("a")), Catch::Matchers::WithinAbs(3.0, 1e-12));
  CHECK_THAT(cv::trace_of_word(rho, W("b")), Catch::Matchers::WithinAbs(3.0, 1e-12));
  CHECK_THAT(cv::trace_of_word(rho, W("ab")), Catch::Matchers::WithinAbs(3.0, 1e-12));
  CHECK_THAT(cv::trace_of_word(rho, W("abAB")), Catch::Matchers::WithinAbs(-2.0, 1e-9));

  CHECK_THROWS_AS(cv::fricke_representation(0, 0, 0), std::invalid_argument);

  Rng rng(808);
  int done = 0;
  while (done < 100) {
    const double x = rng.uniform(2.2, 6.0), y = rng.uniform(2.2, 6.0),
                 z = rng.uniform(2.2, 6.0);
    const double s = z - x * y;
    if (s * s < 4.0) continue;
    ++done;
    const auto r = cv::fricke_representation(x, y, z);
    CHECK_THAT(cv::trace_of_word(r, W("a")), Catch::Matchers::WithinRel(x, 1e-12));
    CHECK_THAT(cv::trace_of_word(r, W("b")), Catch::Matchers::WithinRel(y, 1e-12));
    CHECK_THAT(cv::trace_of_word(r, W("ab")), Catch::Matchers::WithinRel(z, 1e-10));
  }
}

TEST_CASE("conjugation invariance of traces (property)") {
  Rng rng(99);
  const auto base = cv::fricke_representation(3.2, 3.7, 4.4);
  const std::vector<cv::Word> words{W("a"), W("b"), W("ab"), W("aB"), W("aabAB"), W("abb")};
  for (int t = 0; t < 100; ++t) {
    const cv::Mat c = ts::random_unimodular2(rng);
    const cv::Representation conj(
        2,
        {{"a", c * cv::evaluate_word(base, W("a")) * c.inverse()},
         {"b", c * cv::evaluate_word(base, W("b")) * c.inverse()}},
        1e-6);
    for (const auto& w : words) {
      const double t0 = cv::trace_of_word(base, w);
      const double t1 = cv::trace_of_word(conj, w);
      CHECK_THAT(t1, Catch::Matchers::WithinAbs(t0, 1e-9 * (1.0 + std::fabs(t0))));
    }
  }
}

TEST_CASE("SL2 length identity (property, 1000 seeded)") {
  Rng rng(424242);
  for (int t = 0; t < 1000; ++t) {
    const cv::Mat m = ts::random_hyperbolic_sl2(rng);
    const auto e = cv::eigen(m);
    const double lhs = 2.0 * std::acosh(std::fabs(m.trace()) / 2.0);
    const double rhs = std::log(std::fabs(e.values[0].real() / e.values[1].real()));
    CHECK_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-9));
  }
}

TEST_CASE("trace bound for positive-spectrum 3x3 (property, 1000 seeded)") {
  Rng rng(777);
  for (int t = 0; t < 1000; ++t) {
    const auto m = ts::random_positive_spectrum3(rng);
    const auto e = cv::eigen(m);
    const double ratio = e.values[0].real() / e.values[2].real();
    CHECK(std::fabs(m.trace()) <= 3.0 * ratio + 1e-9);
  }
}

TEST_CASE("translation length is additive on powers (property)") {
  Rng rng(1212);
  for (int t = 0; t < 50; ++t) {
    cv::Mat m = ts::random_hyperbolic_sl2(rng);
    // keep fifth powers well-conditioned for the |det-1| precondition
    while (std::fabs(m.trace()) > 4.0) m = ts::random_hyperbolic_sl2(rng);
    const double ell = cv::translation_length(m);
    cv::Mat p = m;
    for (int k = 2; k <= 5; ++k) {
      p = p * m;
      CHECK_THAT(cv::translation_length(p),
                 Catch::Matchers::WithinAbs(k * ell, 1e-8 * (1.0 + k * ell)));
    }
  }
}

TEST_CASE("fundamental SL2 trace identity (property)") {
  Rng rng(606);
  for (int t = 0; t < 200; ++t) {
    const cv::Mat a = ts::random_unimodular2(rng);
    const cv::Mat b = ts::random_unimodular2(rng);
    const double lhs = (a * b).trace() + (a * b.inverse()).trace();
    const double rhs = a.trace() * b.trace();
    CHECK_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-10 * (1.0 + std::fabs(rhs))));
  }
}
