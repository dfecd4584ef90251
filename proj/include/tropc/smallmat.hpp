#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace tropc {

/// Roots of x^3 + a2 x^2 + a1 x + a0 over the reals: either three real roots
/// or one real root plus a conjugate complex pair. Real roots are polished
/// with a few Newton steps on the original cubic.
struct CubicRoots {
  int n_real = 0;
  std::array<double, 3> real{};        // first n_real entries valid
  std::complex<double> complex_root{}; // valid when n_real == 1 (with conjugate)
};

inline CubicRoots solve_cubic(double a2, double a1, double a0) {
  auto f = [&](double x) { return ((x + a2) * x + a1) * x + a0; };
  auto fp = [&](double x) { return (3.0 * x + 2.0 * a2) * x + a1; };
  auto polish = [&](double x) {
    for (int k = 0; k < 4; ++k) {
      const double d = fp(x);
      if (std::fabs(d) < 1e-300) break;
      const double step = f(x) / d;
      if (!std::isfinite(step)) break;
      x -= step;
    }
    return x;
  };

  CubicRoots out;
  const double p = a1 - a2 * a2 / 3.0;
  const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
  const double shift = -a2 / 3.0;
  const double disc = -4.0 * p * p * p - 27.0 * q * q;

  if (disc >= 0.0 && p < 0.0) {
    // three real roots (trigonometric form)
    const double m = 2.0 * std::sqrt(-p / 3.0);
    double arg = 3.0 * q / (p * m);
    arg = std::min(1.0, std::max(-1.0, arg));
    const double phi = std::acos(arg);
    out.n_real = 3;
    for (int k = 0; k < 3; ++k)
      out.real[static_cast<std::size_t>(k)] =
          polish(m * std::cos((phi - 2.0 * 3.14159265358979323846 * k) / 3.0) + shift);
    return out;
  }
  if (p == 0.0 && q == 0.0) {
    out.n_real = 3;
    out.real = {shift, shift, shift};
    return out;
  }
  // one real root (Cardano, with the stable branch)
  const double rad = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
  const double u = std::cbrt(-q / 2.0 - (q >= 0 ? rad : -rad));
  double t = (u == 0.0) ? 0.0 : u - p / (3.0 * u);
  double r = polish(t + shift);
  out.n_real = 1;
  out.real[0] = r;
  // deflate: x^2 + Bx + C
  const double B = a2 + r;
  const double C = a1 + r * B;
  const double d2 = B * B - 4.0 * C;
  if (d2 < 0.0) {
    out.complex_root = {-B / 2.0, std::sqrt(-d2) / 2.0};
  } else {
    // borderline: discriminant says complex but deflation disagrees; fold
    // into three (nearly coincident) real roots
    out.n_real = 3;
    out.real[1] = polish((-B + std::sqrt(d2)) / 2.0);
    out.real[2] = polish((-B - std::sqrt(d2)) / 2.0);
  }
  return out;
}

/// Smallest-eigenvalue unit eigenvector of a symmetric 3x3 matrix (row-major
/// array). Used for least-squares plane normals.
inline std::array<double, 3> sym3_smallest_eigenvector(const std::array<double, 9>& c) {
  const double tr = c[0] + c[4] + c[8];
  const double m = c[0] * c[4] - c[1] * c[3] + c[0] * c[8] - c[2] * c[6] + c[4] * c[8] - c[5] * c[7];
  const double det = c[0] * (c[4] * c[8] - c[5] * c[7]) - c[1] * (c[3] * c[8] - c[5] * c[6]) +
                     c[2] * (c[3] * c[7] - c[4] * c[6]);
  CubicRoots r = solve_cubic(-tr, m, -det);
  double lmin = r.real[0];
  for (int k = 1; k < r.n_real; ++k) lmin = std::min(lmin, r.real[static_cast<std::size_t>(k)]);

  std::array<double, 9> a = c;
  a[0] -= lmin;
  a[4] -= lmin;
  a[8] -= lmin;
  auto row = [&](int i) {
    return std::array<double, 3>{a[static_cast<std::size_t>(3 * i)], a[static_cast<std::size_t>(3 * i + 1)],
                                 a[static_cast<std::size_t>(3 * i + 2)]};
  };
  auto cross = [](const std::array<double, 3>& u, const std::array<double, 3>& v) {
    return std::array<double, 3>{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                                 u[0] * v[1] - u[1] * v[0]};
  };
  auto norm2 = [](const std::array<double, 3>& u) {
    return u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
  };
  std::array<double, 3> best{0, 0, 1};
  double bestn = -1.0;
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (const auto& pr : pairs) {
    const auto v = cross(row(pr[0]), row(pr[1]));
    const double n2 = norm2(v);
    if (n2 > bestn) {
      bestn = n2;
      best = v;
    }
  }
  if (bestn <= 1e-30) return {0, 0, 1};
  const double inv = 1.0 / std::sqrt(bestn);
  return {best[0] * inv, best[1] * inv, best[2] * inv};
}

}  // namespace tropc
