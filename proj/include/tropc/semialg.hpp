#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tropc/errors.hpp"
#include "tropc/numeric.hpp"
#include "tropc/polynomial.hpp"
#include "tropc/rng.hpp"

namespace tropc::semialg {

enum class Rel { EqZero, GtZero, GeZero };

inline const char* rel_str(Rel r) {
  switch (r) {
    case Rel::EqZero: return "=0";
    case Rel::GtZero: return ">0";
    default: return ">=0";
  }
}

struct Condition {
  Polynomial poly;
  Rel rel = Rel::GeZero;
  /// Index of the variable the sampler may solve for when rel is EqZero.
  std::optional<std::size_t> solve_hint;
};

/// Boolean combination of sign conditions. The tree is kept as given (no DNF
/// conversion), so membership stays linear in input size.
struct SetNode {
  enum class Kind { All, Any, Sign };
  Kind kind = Kind::All;
  std::vector<SetNode> children;  // All / Any
  std::optional<Condition> cond;  // Sign

  static SetNode all(std::vector<SetNode> cs) {
    SetNode n;
    n.kind = Kind::All;
    n.children = std::move(cs);
    return n;
  }
  static SetNode any(std::vector<SetNode> cs) {
    SetNode n;
    n.kind = Kind::Any;
    n.children = std::move(cs);
    return n;
  }
  static SetNode sign(Condition c) {
    SetNode n;
    n.kind = Kind::Sign;
    n.cond = std::move(c);
    return n;
  }
};

/// Closed semi-algebraic set over a positive orthant (or, with the orthant
/// flag off, over R^n). Membership is decided pointwise by evaluating every
/// condition; equality conditions are tested relative to the largest
/// monomial magnitude at the point.
class SemiAlgebraicSet {
 public:
  SemiAlgebraicSet() = default;

  SemiAlgebraicSet(std::vector<std::string> vars, SetNode root, bool positive_orthant = true)
      : vars_(std::move(vars)), root_(std::move(root)), orthant_(positive_orthant) {
    validate(root_);
  }

  /// The whole (positive) orthant: no conditions.
  static SemiAlgebraicSet orthant(std::vector<std::string> vars) {
    return SemiAlgebraicSet(std::move(vars), SetNode::all({}), true);
  }

  std::size_t ambient_dim() const { return vars_.size(); }
  const std::vector<std::string>& vars() const { return vars_; }
  bool positive_orthant() const { return orthant_; }
  const SetNode& root() const { return root_; }

  bool contains(std::span<const double> x, double eps_eq = 1e-9) const {
    if (x.size() != vars_.size())
      throw std::invalid_argument("contains: point arity mismatch");
    if (orthant_)
      for (double c : x)
        if (!(c > 0.0)) return false;
    return holds(root_, x, eps_eq);
  }

  /// Membership of exp(u) for a point u given in log coordinates. Only
  /// meaningful together with the orthant restriction (exp(u) > 0 always).
  bool contains_log(std::span<const double> u, double eps_eq = 1e-9) const {
    if (u.size() != vars_.size())
      throw std::invalid_argument("contains_log: point arity mismatch");
    return holds_log(root_, u, eps_eq);
  }

  /// Equality conditions harvested from the whole tree, in declaration
  /// order. The sampler repairs them one at a time; the final contains()
  /// check re-applies the original boolean structure.
  std::vector<const Condition*> equality_conditions() const {
    std::vector<const Condition*> out;
    collect_eq(root_, out);
    return out;
  }

 private:
  void validate(const SetNode& n) const {
    if (n.kind == SetNode::Kind::Sign) {
      if (!n.cond) throw SchemaError("sign node without condition");
      if (n.cond->poly.arity() != vars_.size())
        throw SchemaError("condition arity does not match set variables");
      if (n.cond->solve_hint && *n.cond->solve_hint >= vars_.size())
        throw SchemaError("solve hint out of range");
    } else {
      for (const auto& c : n.children) validate(c);
    }
  }

  static bool sign_holds(double v, double scale, Rel rel, double eps_eq) {
    const double tol = eps_eq * std::max(scale, 1e-300);
    switch (rel) {
      case Rel::EqZero: return std::fabs(v) <= tol;
      case Rel::GtZero: return v > 0.0;
      default: return v >= -tol;
    }
  }

  bool holds(const SetNode& n, std::span<const double> x, double eps_eq) const {
    switch (n.kind) {
      case SetNode::Kind::All:
        for (const auto& c : n.children)
          if (!holds(c, x, eps_eq)) return false;
        return true;
      case SetNode::Kind::Any: {
        if (n.children.empty()) return true;
        for (const auto& c : n.children)
          if (holds(c, x, eps_eq)) return true;
        return false;
      }
      default: {
        const auto& cond = *n.cond;
        return sign_holds(cond.poly.eval(x), cond.poly.eval_scale(x), cond.rel, eps_eq);
      }
    }
  }

  bool holds_log(const SetNode& n, std::span<const double> u, double eps_eq) const {
    switch (n.kind) {
      case SetNode::Kind::All:
        for (const auto& c : n.children)
          if (!holds_log(c, u, eps_eq)) return false;
        return true;
      case SetNode::Kind::Any: {
        if (n.children.empty()) return true;
        for (const auto& c : n.children)
          if (holds_log(c, u, eps_eq)) return true;
        return false;
      }
      default: {
        const auto& cond = *n.cond;
        const LogEval le = cond.poly.eval_log(u, eps_eq);
        switch (cond.rel) {
          case Rel::EqZero: return le.sign == 0;
          case Rel::GtZero: return le.sign > 0;
          default: return le.sign >= 0;
        }
      }
    }
  }

  static void collect_eq(const SetNode& n, std::vector<const Condition*>& out) {
    if (n.kind == SetNode::Kind::Sign) {
      if (n.cond->rel == Rel::EqZero) out.push_back(&*n.cond);
    } else {
      for (const auto& c : n.children) collect_eq(c, out);
    }
  }

  std::vector<std::string> vars_;
  SetNode root_;
  bool orthant_ = true;
};

struct SampleOptions {
  double eps_eq = 1e-9;
  std::size_t max_attempts_per_point = 20000;
  int scan_segments = 64;
  int bisect_iters = 200;
};

struct SampleDiagnostics {
  std::size_t attempts = 0;
  std::size_t accepted = 0;
  double acceptance_rate() const {
    return attempts == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(attempts);
  }
};

namespace detail {

/// Bisect p along the segment x(t) = a + t*(b-a), t in [lo,hi], assuming a
/// sign change between the endpoints. Returns the root parameter.
inline double bisect_segment(const Polynomial& p, std::span<const double> a,
                             std::span<const double> b, double lo, double hi, int iters) {
  Vec x(a.size());
  auto at = [&](double t) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = a[i] + t * (b[i] - a[i]);
    return p.eval(x);
  };
  double flo = at(lo);
  for (int k = 0; k < iters && hi - lo > 1e-16; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double fm = at(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Solve cond.poly = 0 for coordinate `var` with the other coordinates of x
/// fixed, searching within [lo, hi]. Linear dependence is solved exactly;
/// otherwise the interval is scanned for a sign change and bisected. Returns
/// true and writes x[var] on success.
inline bool solve_for_variable(const Condition& cond, Vec& x, std::size_t var, double lo,
                               double hi, const SampleOptions& opt, Rng& rng) {
  const auto [coeffs, min_exp] = cond.poly.univariate_in(var, x);
  if (min_exp >= 0 && coeffs.size() - 1 + static_cast<std::size_t>(min_exp) == 1) {
    // a*x + b with a = coefficient of degree 1
    const double b = (min_exp == 0) ? coeffs[0] : 0.0;
    const double a = coeffs[min_exp == 0 ? 1 : 0];
    if (std::fabs(a) < 1e-300) return false;
    const double root = -b / a;
    if (!(root >= lo && root <= hi)) return false;
    x[var] = root;
    return true;
  }
  auto value_at = [&](double t) {
    double acc = 0.0, c = 0.0;
    double tp = std::pow(t, min_exp);
    for (double co : coeffs) {
      const double y = co * tp - c;
      const double s = acc + y;
      c = (s - acc) - y;
      acc = s;
      tp *= t;
    }
    return acc;
  };
  const int n = opt.scan_segments;
  std::vector<std::pair<double, double>> brackets;
  double prev_t = lo, prev_v = value_at(lo);
  for (int k = 1; k <= n; ++k) {
    const double t = lo + (hi - lo) * k / n;
    const double v = value_at(t);
    if (prev_v == 0.0) {
      x[var] = prev_t;
      return true;
    }
    if ((v > 0) != (prev_v > 0)) brackets.emplace_back(prev_t, t);
    prev_t = t;
    prev_v = v;
  }
  if (brackets.empty()) return false;
  auto [blo, bhi] = brackets[rng.below(brackets.size())];
  double flo = value_at(blo);
  for (int k = 0; k < opt.bisect_iters && bhi - blo > 1e-16 * std::max(1.0, std::fabs(bhi)); ++k) {
    const double mid = 0.5 * (blo + bhi);
    const double fm = value_at(mid);
    if (fm == 0.0) {
      blo = bhi = mid;
      break;
    }
    if ((fm > 0) == (flo > 0)) {
      blo = mid;
      flo = fm;
    } else {
      bhi = mid;
    }
  }
  x[var] = 0.5 * (blo + bhi);
  return true;
}

}  // namespace detail

/// Draw n points of S inside the given box (per-coordinate positive
/// intervals), deterministically for a fixed seed. Full-dimensional sets use
/// plain rejection. Each equality condition is repaired first: solved for
/// its hinted variable when a hint is present, otherwise by bisection along
/// a random segment between two box points. Throws NumericError with
/// acceptance diagnostics when the attempt budget runs out.
inline std::vector<Vec> sample(const SemiAlgebraicSet& S,
                               const std::vector<std::pair<double, double>>& box, std::size_t n,
                               std::uint64_t seed, const SampleOptions& opt = {},
                               SampleDiagnostics* diag_out = nullptr) {
  if (box.size() != S.ambient_dim()) throw std::invalid_argument("sample: box arity mismatch");
  if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
  for (const auto& [lo, hi] : box) {
    if (!(lo < hi)) throw std::invalid_argument("sample: empty box interval");
    if (S.positive_orthant() && !(lo > 0.0))
      throw std::invalid_argument("sample: box must lie in the positive orthant");
  }
  Rng rng(seed);
  const auto eqs = S.equality_conditions();
  std::vector<Vec> pts;
  pts.reserve(n);
  SampleDiagnostics diag;
  const std::size_t dim = S.ambient_dim();
  while (pts.size() < n) {
    if (diag.attempts >= opt.max_attempts_per_point * n) {
      if (diag_out) *diag_out = diag;
      throw NumericError("sample: attempt budget exhausted (attempts=" +
                         std::to_string(diag.attempts) + ", accepted=" +
                         std::to_string(diag.accepted) + ", acceptance rate=" +
                         std::to_string(diag.acceptance_rate()) + ")");
    }
    ++diag.attempts;
    Vec x(dim);
    for (std::size_t i = 0; i < dim; ++i) x[i] = rng.uniform(box[i].first, box[i].second);
    bool ok = true;
    for (const Condition* eq : eqs) {
      if (eq->solve_hint) {
        const std::size_t v = *eq->solve_hint;
        if (!detail::solve_for_variable(*eq, x, v, box[v].first, box[v].second, opt, rng)) {
          ok = false;
          break;
        }
      } else {
        Vec y(dim);
        for (std::size_t i = 0; i < dim; ++i) y[i] = rng.uniform(box[i].first, box[i].second);
        const double fa = eq->poly.eval(x), fb = eq->poly.eval(y);
        if (fa == 0.0) continue;
        if ((fa > 0) == (fb > 0) && fb != 0.0) {
          ok = false;
          break;
        }
        const double t = detail::bisect_segment(eq->poly, x, y, 0.0, 1.0, opt.bisect_iters);
        for (std::size_t i = 0; i < dim; ++i) x[i] = x[i] + t * (y[i] - x[i]);
      }
    }
    if (!ok) continue;
    if (!S.contains(x, opt.eps_eq)) continue;
    ++diag.accepted;
    pts.push_back(std::move(x));
  }
  if (diag_out) *diag_out = diag;
  return pts;
}

}  // namespace tropc::semialg
