#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace tropc {

using Vec = std::vector<double>;

/// Kahan-compensated sum in the given order.
inline double kahan_sum(std::span<const double> xs) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

/// Order-independent sum: terms are sorted by decreasing magnitude before a
/// compensated pass, so permuting the input cannot change the result bit for
/// bit. Vectors indexed by family members go through these reductions so that
/// relabeling a family permutes results exactly.
inline double stable_sum(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end(), [](double a, double b) {
    const double aa = std::fabs(a), ab = std::fabs(b);
    if (aa != ab) return aa > ab;
    return a > b;
  });
  return kahan_sum(xs);
}

inline double stable_dot(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("stable_dot: size mismatch");
  std::vector<double> prods(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) prods[i] = u[i] * v[i];
  return stable_sum(std::move(prods));
}

inline double stable_norm(std::span<const double> u) {
  std::vector<double> sq(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) sq[i] = u[i] * u[i];
  return std::sqrt(stable_sum(std::move(sq)));
}

inline Vec normalized(Vec v) {
  const double n = stable_norm(v);
  if (!(n > 0.0)) throw std::invalid_argument("normalized: zero vector");
  for (auto& x : v) x /= n;
  return v;
}

/// Angle between two nonzero vectors, accurate for both tiny and near-pi
/// angles: theta = 2 atan(|u' - v'| / |u' + v'|) on the normalized pair.
inline double angle_between(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("angle_between: size mismatch");
  const double nu = stable_norm(u), nv = stable_norm(v);
  if (!(nu > 0.0) || !(nv > 0.0)) throw std::invalid_argument("angle_between: zero vector");
  std::vector<double> diff(u.size()), sum(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = u[i] / nu, b = v[i] / nv;
    diff[i] = a - b;
    sum[i] = a + b;
  }
  const double nd = stable_norm(diff), ns = stable_norm(sum);
  if (ns == 0.0) return 3.14159265358979323846;
  return 2.0 * std::atan(nd / ns);
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace tropc
