#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <variant>
#include <vector>

#include "tropc/charvar.hpp"
#include "tropc/errors.hpp"
#include "tropc/numeric.hpp"

namespace tropc::hilbert {

using Vec2 = std::array<double, 2>;

/// Axis-aligned ellipse.
struct Ellipse {
  Vec2 center{0, 0};
  Vec2 axes{1, 1};
};

/// Strictly convex polygon; vertices are normalized to counterclockwise
/// order on construction.
struct Polygon {
  std::vector<Vec2> pts;
};

using ConvexDomain = std::variant<Ellipse, Polygon>;

namespace detail {

struct EdgeForm {  // L(x, y, w) = nx x + ny y + c w, unit normal, inward positive
  double nx, ny, c;
  double value(double x, double y, double w) const { return nx * x + ny * y + c * w; }
};

inline std::vector<EdgeForm> edge_forms(const Polygon& poly) {
  std::vector<EdgeForm> out;
  const auto& v = poly.pts;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    const double ex = q[0] - p[0], ey = q[1] - p[1];
    const double len = std::hypot(ex, ey);
    if (len <= 0.0) throw SchemaError("polygon has a zero-length edge");
    EdgeForm f;
    f.nx = -ey / len;
    f.ny = ex / len;
    f.c = -(f.nx * p[0] + f.ny * p[1]);
    out.push_back(f);
  }
  return out;
}

}  // namespace detail

inline void validate_domain(const ConvexDomain& dom) {
  if (std::holds_alternative<Ellipse>(dom)) {
    const auto& e = std::get<Ellipse>(dom);
    if (!(e.axes[0] > 0.0 && e.axes[1] > 0.0))
      throw SchemaError("ellipse axes must be positive");
    return;
  }
  auto& poly = std::get<Polygon>(dom);
  const auto& v = poly.pts;
  if (v.size() < 3) throw SchemaError("polygon needs at least 3 vertices");
  int sign = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    const Vec2& c = v[(i + 2) % v.size()];
    const double cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
    if (cross == 0.0) throw SchemaError("polygon is not strictly convex");
    const int s = cross > 0 ? 1 : -1;
    if (sign == 0)
      sign = s;
    else if (s != sign)
      throw SchemaError("polygon is not strictly convex");
  }
}

/// Canonical copy: ellipse unchanged, polygon reordered counterclockwise.
inline ConvexDomain canonical_domain(ConvexDomain dom) {
  validate_domain(dom);
  if (std::holds_alternative<Polygon>(dom)) {
    auto& poly = std::get<Polygon>(dom);
    const auto& v = poly.pts;
    const double cross = (v[1][0] - v[0][0]) * (v[2][1] - v[1][1]) -
                         (v[1][1] - v[0][1]) * (v[2][0] - v[1][0]);
    if (cross < 0) std::reverse(poly.pts.begin(), poly.pts.end());
  }
  return dom;
}

/// Signed interior margin: positive inside. For ellipses 1 - |u|^2 in
/// normalized coordinates; for polygons the minimum edge distance.
inline double interior_margin(const ConvexDomain& dom, const Vec2& p) {
  if (std::holds_alternative<Ellipse>(dom)) {
    const auto& e = std::get<Ellipse>(dom);
    const double ux = (p[0] - e.center[0]) / e.axes[0];
    const double uy = (p[1] - e.center[1]) / e.axes[1];
    return 1.0 - (ux * ux + uy * uy);
  }
  const auto forms = detail::edge_forms(std::get<Polygon>(dom));
  double m = 1e308;
  for (const auto& f : forms) m = std::min(m, f.value(p[0], p[1], 1.0));
  return m;
}

inline bool is_interior(const ConvexDomain& dom, const Vec2& p, double margin = 1e-12) {
  return interior_margin(dom, p) > margin;
}

/// Boundary points (p, q) of the chord through two interior points, ordered
/// p, a, b, q along the line. Ellipse chords by the quadratic formula,
/// polygon chords by edge clipping.
inline std::pair<Vec2, Vec2> chord(const ConvexDomain& dom, const Vec2& a, const Vec2& b) {
  if (a == b) throw std::invalid_argument("chord: coincident points");
  if (!is_interior(dom, a) || !is_interior(dom, b))
    throw std::invalid_argument("chord: point on or outside the boundary");
  auto along = [&](double t) -> Vec2 {
    return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  };
  if (std::holds_alternative<Ellipse>(dom)) {
    const auto& e = std::get<Ellipse>(dom);
    const double uax = (a[0] - e.center[0]) / e.axes[0], uay = (a[1] - e.center[1]) / e.axes[1];
    const double ubx = (b[0] - e.center[0]) / e.axes[0], uby = (b[1] - e.center[1]) / e.axes[1];
    const double dx = ubx - uax, dy = uby - uay;
    const double alpha = dx * dx + dy * dy;
    const double beta = uax * dx + uay * dy;
    const double gamma = uax * uax + uay * uay - 1.0;
    const double disc = beta * beta - alpha * gamma;
    const double root = std::sqrt(disc);
    return {along((-beta - root) / alpha), along((-beta + root) / alpha)};
  }
  const auto forms = detail::edge_forms(std::get<Polygon>(dom));
  double t_lo = -1e308, t_hi = 1e308;
  for (const auto& f : forms) {
    const double c0 = f.value(a[0], a[1], 1.0);
    const double c1 = f.value(b[0], b[1], 1.0);
    const double slope = c1 - c0;
    if (slope == 0.0) continue;
    const double t = -c0 / slope;
    if (slope > 0.0)
      t_lo = std::max(t_lo, t);
    else
      t_hi = std::min(t_hi, t);
  }
  return {along(t_lo), along(t_hi)};
}

/// Hilbert distance, full-log convention:
///   d(a,b) = log( (|q-a| |p-b|) / (|q-b| |p-a|) )
/// with (p, q) the chord endpoints. No 1/2 factor: on the open 2-simplex
/// this reduces to max_i log(y_i/x_i) + max_j log(x_j/y_j), and the
/// displacement rate of a projective transformation equals the log of its
/// extreme eigenvalue ratio. Computed via pencil parameters on logs, which
/// stays accurate for points much closer to the boundary than sqrt(eps).
inline double hilbert_distance(const ConvexDomain& dom, const Vec2& a, const Vec2& b) {
  if (a == b) return 0.0;
  if (!is_interior(dom, a) || !is_interior(dom, b))
    throw std::invalid_argument("hilbert_distance: point on or outside the boundary");
  if (std::holds_alternative<Polygon>(dom)) {
    const auto forms = detail::edge_forms(std::get<Polygon>(dom));
    double rmax = -1e308, rmin = 1e308;
    for (const auto& f : forms) {
      const double la = f.value(a[0], a[1], 1.0);
      const double lb = f.value(b[0], b[1], 1.0);
      const double r = std::log(la) - std::log(lb);
      rmax = std::max(rmax, r);
      rmin = std::min(rmin, r);
    }
    return rmax - rmin;
  }
  const auto& e = std::get<Ellipse>(dom);
  const double uax = (a[0] - e.center[0]) / e.axes[0], uay = (a[1] - e.center[1]) / e.axes[1];
  const double ubx = (b[0] - e.center[0]) / e.axes[0], uby = (b[1] - e.center[1]) / e.axes[1];
  const double qa = uax * uax + uay * uay - 1.0;           // < 0
  const double qb = ubx * ubx + uby * uby - 1.0;           // < 0
  const double pol = uax * ubx + uay * uby - 1.0;          // < 0 by Cauchy-Schwarz
  const double disc = std::max(0.0, pol * pol - qa * qb);
  const double q0 = std::fabs(pol) + std::sqrt(disc);
  return std::fabs(2.0 * std::log(q0) - std::log(-qa) - std::log(-qb));
}

/// Projective self-map of the chart plane, acting on homogeneous (x, y, 1).
struct ProjectiveMap {
  charvar::Mat m;  // 3x3
};

/// SL(2,R) element acting on an ellipse domain as a disk isometry (Moebius
/// action through the half-plane). The displacement rate of this action in
/// the full-log Hilbert metric equals log of the 2x2 eigenvalue ratio.
struct MoebiusMap {
  charvar::Mat m;  // 2x2, det 1
};

using DomainMap = std::variant<ProjectiveMap, MoebiusMap>;

/// Projective action of an SL(2,R) element on the unit disk through the
/// symmetric square (the Klein model). Eigenvalue ratio is the square of
/// the 2x2 ratio, so translation lengths double relative to MoebiusMap.
inline charvar::Mat klein_action(const charvar::Mat& A) {
  if (A.n != 2) throw std::invalid_argument("klein_action: need a 2x2 matrix");
  // coordinates (X, Y, W) <-> S = [[(W+X)/2, Y/2], [Y/2, (W-X)/2]], S -> A S A^T
  auto image = [&](double X, double Y, double W, double out[3]) {
    const double s11 = (W + X) / 2.0, s22 = (W - X) / 2.0, s12 = Y / 2.0;
    const double a = A.at(0, 0), b = A.at(0, 1), c = A.at(1, 0), d = A.at(1, 1);
    const double t11 = a * (a * s11 + b * s12) + b * (a * s12 + b * s22);
    const double t12 = c * (a * s11 + b * s12) + d * (a * s12 + b * s22);
    const double t22 = c * (c * s11 + d * s12) + d * (c * s12 + d * s22);
    out[0] = t11 - t22;
    out[1] = 2.0 * t12;
    out[2] = t11 + t22;
  };
  charvar::Mat K;
  K.n = 3;
  double col[3];
  image(1, 0, 0, col);
  for (int i = 0; i < 3; ++i) K.at(i, 0) = col[i];
  image(0, 1, 0, col);
  for (int i = 0; i < 3; ++i) K.at(i, 1) = col[i];
  image(0, 0, 1, col);
  for (int i = 0; i < 3; ++i) K.at(i, 2) = col[i];
  return K;
}

/// Chart action of diag(l1, l2, l3) on the standard triangle
/// {(0,0),(1,0),(0,1)} viewed as the projectivized positive octant with
/// barycentric coordinates (x, y, 1-x-y).
inline charvar::Mat simplex_action(const std::array<double, 3>& lambda) {
  charvar::Mat K;
  K.n = 3;
  K.at(0, 0) = lambda[0];
  K.at(1, 1) = lambda[1];
  K.at(2, 0) = lambda[0] - lambda[2];
  K.at(2, 1) = lambda[1] - lambda[2];
  K.at(2, 2) = lambda[2];
  return K;
}

struct RateResult {
  double rate = 0.0;              // d(x0, m^k x0) / k at k = k_max
  std::vector<double> cesaro;     // d_k / k for k = 1..k_max
  std::vector<double> distances;  // d_k
};

namespace detail {

inline void check_preserves(const ConvexDomain& dom, const charvar::Mat& m) {
  std::vector<Vec2> boundary;
  if (std::holds_alternative<Ellipse>(dom)) {
    const auto& e = std::get<Ellipse>(dom);
    for (int k = 0; k < 64; ++k) {
      const double th = 2.0 * 3.14159265358979323846 * k / 64;
      boundary.push_back({e.center[0] + e.axes[0] * std::cos(th),
                          e.center[1] + e.axes[1] * std::sin(th)});
    }
  } else {
    const auto& v = std::get<Polygon>(dom).pts;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2& p = v[i];
      const Vec2& q = v[(i + 1) % v.size()];
      for (int k = 0; k < 8; ++k) {
        const double t = k / 8.0;
        boundary.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
      }
    }
  }
  for (const auto& p : boundary) {
    const Vec y = m.apply(Vec{p[0], p[1], 1.0});
    if (!(std::fabs(y[2]) > 1e-300))
      throw std::invalid_argument("displacement_rate: map sends the domain through infinity");
    const Vec2 img{y[0] / y[2], y[1] / y[2]};
    if (interior_margin(dom, img) < -1e-6)
      throw std::invalid_argument("displacement_rate: map does not send the domain into itself");
  }
}

}  // namespace detail

/// Displacement rate d(x0, m^k x0)/k at k = k_max, with all Cesaro
/// estimates as diagnostics. The orbit is tracked in homogeneous
/// coordinates (for conic-preserving maps the quadratic form is propagated
/// multiplicatively), so distances stay accurate long after the chart
/// coordinates of the orbit have saturated against the boundary.
inline RateResult displacement_rate(const ConvexDomain& dom, const DomainMap& map,
                                    const Vec2& x0, int k_max) {
  validate_domain(dom);
  if (k_max < 1) throw std::invalid_argument("displacement_rate: k_max must be >= 1");
  if (!is_interior(dom, x0, 1e-12))
    throw std::invalid_argument("displacement_rate: x0 is not strictly interior");
  RateResult out;

  if (std::holds_alternative<MoebiusMap>(map)) {
    const auto& A = std::get<MoebiusMap>(map).m;
    if (A.n != 2) throw std::invalid_argument("displacement_rate: MoebiusMap needs a 2x2 matrix");
    if (std::fabs(A.det() - 1.0) > 1e-9)
      throw std::invalid_argument("displacement_rate: MoebiusMap must have det 1");
    if (!std::holds_alternative<Ellipse>(dom))
      throw std::invalid_argument("displacement_rate: MoebiusMap acts on ellipse domains");
    const auto& e = std::get<Ellipse>(dom);
    const double u0x = (x0[0] - e.center[0]) / e.axes[0];
    const double u0y = (x0[1] - e.center[1]) / e.axes[1];
    const std::complex<double> zeta0(u0x, u0y);
    const std::complex<double> I(0.0, 1.0);
    std::complex<double> X1 = I * (1.0 + zeta0);
    std::complex<double> X2 = 1.0 - zeta0;  // z0 = X1/X2 in the upper half plane
    const double q0m = 1.0 - (u0x * u0x + u0y * u0y);
    for (int k = 1; k <= k_max; ++k) {
      const std::complex<double> Y1 = A.at(0, 0) * X1 + A.at(0, 1) * X2;
      const std::complex<double> Y2 = A.at(1, 0) * X1 + A.at(1, 1) * X2;
      const double nrm = std::max(std::abs(Y1), std::abs(Y2));
      if (!(nrm > 0.0) || !std::isfinite(nrm))
        throw NumericError("displacement_rate: Moebius orbit overflow");
      X1 = Y1 / nrm;
      X2 = Y2 / nrm;
      const double imz = std::imag(X1 * std::conj(X2));
      const std::complex<double> den = X1 + I * X2;
      const double den2 = std::norm(den);
      if (!(imz > 0.0) || !(den2 > 0.0))
        throw NumericError("displacement_rate: orbit exits the numerical interior");
      const double log_q = std::log(4.0 * imz) - std::log(den2);
      const std::complex<double> zeta = (X1 - I * X2) / den;
      double bx = std::real(zeta), by = std::imag(zeta);
      const double bn = std::hypot(bx, by);
      if (bn > 1.0) {
        bx /= bn;
        by /= bn;
      }
      const double one_minus_dot = 1.0 - (u0x * bx + u0y * by);
      const double val =
          std::log(one_minus_dot) - 0.5 * std::log(q0m) - 0.5 * log_q;
      const double d =
          (val > 25.0) ? 2.0 * (val + 0.6931471805599453)
                       : 2.0 * std::acosh(std::max(1.0, std::exp(val)));
      out.distances.push_back(d);
      out.cesaro.push_back(d / k);
    }
    out.rate = out.distances.back() / k_max;
    return out;
  }

  const auto& m = std::get<ProjectiveMap>(map).m;
  if (m.n != 3) throw std::invalid_argument("displacement_rate: ProjectiveMap needs a 3x3 matrix");
  detail::check_preserves(dom, m);

  const Vec A{x0[0], x0[1], 1.0};
  Vec B = A;

  const bool is_poly = std::holds_alternative<Polygon>(dom);
  std::vector<detail::EdgeForm> forms;
  // edge-permutation mode: a map preserving the polygon permutes its edge
  // lines, so the edge values of the orbit evolve by pure per-edge scaling;
  // tracking their logs keeps full relative precision at any depth
  bool edge_perm = false;
  std::vector<std::size_t> edge_perm_idx;
  std::vector<double> edge_log_factor;
  std::vector<double> edge_logs;
  double qa = 0.0, qb = 0.0, conic_factor = 1.0;
  bool conic_preserving = false;
  auto qform = [&](const Vec& v) {
    const auto& e = std::get<Ellipse>(dom);
    const double ux = (v[0] - e.center[0] * v[2]) / e.axes[0];
    const double uy = (v[1] - e.center[1] * v[2]) / e.axes[1];
    return ux * ux + uy * uy - v[2] * v[2];
  };
  auto polar = [&](const Vec& v, const Vec& w) {
    const auto& e = std::get<Ellipse>(dom);
    const double vx = (v[0] - e.center[0] * v[2]) / e.axes[0];
    const double vy = (v[1] - e.center[1] * v[2]) / e.axes[1];
    const double wx = (w[0] - e.center[0] * w[2]) / e.axes[0];
    const double wy = (w[1] - e.center[1] * w[2]) / e.axes[1];
    return vx * wx + vy * wy - v[2] * w[2];
  };
  if (is_poly) {
    forms = detail::edge_forms(std::get<Polygon>(dom));
    // L_i(m v) = (m^T n_i) . v: match each pulled-back form to a positive
    // multiple of another edge form
    edge_perm = true;
    for (const auto& f : forms) {
      Vec pb(3);
      for (int j = 0; j < 3; ++j)
        pb[static_cast<std::size_t>(j)] =
            f.nx * m.at(0, j) + f.ny * m.at(1, j) + f.c * m.at(2, j);
      const double pbn = std::sqrt(pb[0] * pb[0] + pb[1] * pb[1] + pb[2] * pb[2]);
      bool matched = false;
      for (std::size_t j = 0; j < forms.size() && !matched; ++j) {
        const auto& g = forms[j];
        const double gn = std::sqrt(g.nx * g.nx + g.ny * g.ny + g.c * g.c);
        const double dot = pb[0] * g.nx + pb[1] * g.ny + pb[2] * g.c;
        if (dot <= 0.0) continue;
        const double cosv = dot / (pbn * gn);
        if (1.0 - cosv <= 1e-12) {
          edge_perm_idx.push_back(j);
          edge_log_factor.push_back(std::log(pbn / gn));
          matched = true;
        }
      }
      if (!matched) {
        edge_perm = false;
        break;
      }
    }
    if (edge_perm) {
      edge_logs.resize(forms.size());
      for (std::size_t i = 0; i < forms.size(); ++i)
        edge_logs[i] = std::log(forms[i].value(A[0], A[1], A[2]));
    }
  } else {
    qa = qform(A);
    qb = qa;
    // does m scale the conic form by a constant? then track Q along the
    // orbit multiplicatively instead of re-evaluating it (re-evaluation
    // cancels catastrophically near the boundary)
    const Vec probes[4] = {{0.3, 0.1, 1.0}, {-0.2, 0.4, 1.0}, {0.1, -0.5, 1.0}, {0.6, 0.2, 1.0}};
    double ratio = 0.0;
    conic_preserving = true;
    for (const auto& pr : probes) {
      Vec shifted(3);
      const auto& e = std::get<Ellipse>(dom);
      shifted[0] = e.center[0] + e.axes[0] * pr[0];
      shifted[1] = e.center[1] + e.axes[1] * pr[1];
      shifted[2] = 1.0;
      const double qv = qform(shifted);
      const double qmv = qform(m.apply(shifted));
      if (std::fabs(qv) < 1e-12) continue;
      const double r = qmv / qv;
      if (ratio == 0.0)
        ratio = r;
      else if (std::fabs(r - ratio) > 1e-7 * std::max(1.0, std::fabs(ratio)))
        conic_preserving = false;
    }
    conic_factor = ratio;
    if (conic_factor == 0.0) conic_preserving = false;
  }

  for (int k = 1; k <= k_max; ++k) {
    double d = 0.0;
    if (is_poly && edge_perm) {
      // edge values evolve multiplicatively; the common projective scale
      // cancels in the max-min of log ratios
      std::vector<double> next(edge_logs.size());
      for (std::size_t i = 0; i < edge_logs.size(); ++i)
        next[i] = edge_log_factor[i] + edge_logs[edge_perm_idx[i]];
      edge_logs = std::move(next);
      double rmax = -1e308, rmin = 1e308;
      for (std::size_t i = 0; i < forms.size(); ++i) {
        const double r = std::log(forms[i].value(A[0], A[1], A[2])) - edge_logs[i];
        rmax = std::max(rmax, r);
        rmin = std::min(rmin, r);
      }
      out.distances.push_back(rmax - rmin);
      out.cesaro.push_back((rmax - rmin) / k);
      continue;
    }
    Vec Bn = m.apply(B);
    const double nrm = stable_norm(Bn);
    if (!(nrm > 0.0) || !std::isfinite(nrm))
      throw NumericError("displacement_rate: orbit overflow");
    for (auto& c : Bn) c /= nrm;
    if (Bn[2] < 0.0)
      for (auto& c : Bn) c = -c;
    if (!(Bn[2] > 0.0)) throw NumericError("displacement_rate: orbit leaves the affine chart");
    B = Bn;
    if (is_poly) {
      double rmax = -1e308, rmin = 1e308;
      for (const auto& f : forms) {
        const double la = f.value(A[0], A[1], A[2]);
        const double lb = f.value(B[0], B[1], B[2]);
        if (!(lb > 0.0))
          throw NumericError("displacement_rate: orbit exits the numerical interior");
        const double r = std::log(la) - std::log(lb);
        rmax = std::max(rmax, r);
        rmin = std::min(rmin, r);
      }
      d = rmax - rmin;
    } else {
      if (conic_preserving) {
        qb = qb * conic_factor / (nrm * nrm);
      } else {
        qb = qform(B);
        if (!(std::fabs(qb) > 1e-10))
          throw NumericError("displacement_rate: orbit exits the numerical interior");
      }
      if (!(qb < 0.0)) throw NumericError("displacement_rate: orbit exits the numerical interior");
      const double pol = polar(A, B);
      const double disc = std::max(0.0, pol * pol - qa * qb);
      const double q0 = std::fabs(pol) + std::sqrt(disc);
      d = std::fabs(2.0 * std::log(q0) - std::log(-qa) - std::log(-qb));
    }
    out.distances.push_back(d);
    out.cesaro.push_back(d / k);
  }
  out.rate = out.distances.back() / k_max;
  return out;
}

}  // namespace tropc::hilbert
