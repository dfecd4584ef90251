#pragma once

#include <cmath>
#include <cstdlib>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "tropc/charvar.hpp"
#include "tropc/errors.hpp"
#include "tropc/families.hpp"
#include "tropc/numeric.hpp"

namespace tropc::surface {

/// Slope p/q of a simple closed curve on the once-punctured torus.
/// Canonical form: gcd(|p|,|q|) = 1 and q > 0, with (1,0) denoting infinity.
struct Slope {
  long p = 0;
  long q = 1;

  static Slope of(long p, long q) {
    if (p == 0 && q == 0) throw std::invalid_argument("Slope: 0/0");
    if (q < 0) {
      p = -p;
      q = -q;
    }
    if (q == 0) p = 1;  // infinity
    const long g = std::gcd(std::abs(p), std::abs(q));
    if (g > 1) {
      p /= g;
      q /= g;
    }
    Slope s;
    s.p = p;
    s.q = q;
    return s;
  }

  static Slope parse(const std::string& text) {
    const auto slash = text.find('/');
    try {
      if (slash == std::string::npos) return of(std::stol(text), 1);
      return of(std::stol(text.substr(0, slash)), std::stol(text.substr(slash + 1)));
    } catch (const std::logic_error&) {
      throw SchemaError("bad slope: " + text);
    }
  }

  std::string str() const { return std::to_string(p) + "/" + std::to_string(q); }

  bool operator==(const Slope& o) const { return p == o.p && q == o.q; }
};

/// Geometric intersection number of two torus slopes: |p_s q_t - q_s p_t|.
inline long intersection_number(const Slope& s, const Slope& t) {
  return std::labs(s.p * t.q - s.q * t.p);
}

namespace detail {

// Stern-Brocot descent: word(0/1) = a, word(1/0) = b, and the word of a
// Farey mediant is the concatenation of its parents' words. The word of
// slope p/q has exponent sums (q, p) over (a, b).
inline std::string positive_slope_word(long p, long q) {
  std::string lo = "a", hi = "b";
  long plo = 0, qlo = 1, phi = 1, qhi = 0;
  while (true) {
    const long pm = plo + phi, qm = qlo + qhi;
    const std::string mid = lo + hi;
    if (pm == p && qm == q) return mid;
    if (p * qm < pm * q) {  // target below the mediant
      phi = pm;
      qhi = qm;
      hi = mid;
    } else {
      plo = pm;
      qlo = qm;
      lo = mid;
    }
  }
}

}  // namespace detail

/// Primitive word representing the slope, with exponent sums (a: q, b: p).
/// Negative slopes mirror the positive construction with b inverted.
inline charvar::Word slope_word(const Slope& s) {
  if (s.p == 0) return charvar::Word::parse("a");
  if (s.q == 0) return charvar::Word::parse("b");
  if (s.p > 0) return charvar::Word::parse(detail::positive_slope_word(s.p, s.q));
  std::string w = detail::positive_slope_word(-s.p, s.q);
  for (char& c : w)
    if (c == 'b') c = 'B';
  return charvar::Word::parse(w);
}

/// Traces (x, y, z) of (a, b, ab) on the rank-2 free group.
struct TraceTriple {
  double x = 0, y = 0, z = 0;

  Vec vec() const { return {x, y, z}; }
  static TraceTriple from(const Vec& v) {
    if (v.size() != 3) throw std::invalid_argument("TraceTriple: need 3 coordinates");
    return {v[0], v[1], v[2]};
  }

  /// Residual of x^2 + y^2 + z^2 = xyz, relative to the largest term.
  double relation_residual() const {
    const double terms = std::max({x * x, y * y, z * z, std::fabs(x * y * z), 1.0});
    return std::fabs(x * x + y * y + z * z - x * y * z) / terms;
  }

  bool on_teichmuller_locus(double tol = 1e-6) const {
    return relation_residual() <= tol && x >= 3.0 - 1e-9 && y >= 3.0 - 1e-9 && z >= 3.0 - 1e-9;
  }
};

namespace detail {

// Elementary mapping-class moves as maps on trace triples.
//   R: twist along slope 0/1 (the curve a):  b -> ab
//   L: twist along slope 1/0 (the curve b):  a -> ab
inline TraceTriple move_R(const TraceTriple& t) { return {t.x, t.z, t.x * t.z - t.y}; }
inline TraceTriple move_Rinv(const TraceTriple& t) { return {t.x, t.x * t.y - t.z, t.y}; }
inline TraceTriple move_L(const TraceTriple& t) { return {t.z, t.y, t.y * t.z - t.x}; }
inline TraceTriple move_Linv(const TraceTriple& t) { return {t.x * t.y - t.z, t.y, t.x}; }

// Slope actions: R: (p,q) -> (p, p+q); L: (p,q) -> (p+q, q).
// Peeling the target back to a base slope gives the conjugating word.
struct TwistRecipe {
  std::vector<bool> peel_is_R;  // in peel order
  bool base_is_R = true;        // base twist: R (slope 0/1) or L (slope 1/0)
};

inline TwistRecipe twist_recipe(const Slope& c) {
  if (c.p < 0)
    throw std::invalid_argument("twist_along: negative slopes are not supported");
  TwistRecipe r;
  long p = c.p, q = c.q;
  while (true) {
    if (p == 0 && q == 1) {
      r.base_is_R = true;
      return r;
    }
    if (p == 1 && q == 0) {
      r.base_is_R = false;
      return r;
    }
    if (q >= p) {
      r.peel_is_R.push_back(true);
      q -= p;
    } else {
      r.peel_is_R.push_back(false);
      p -= q;
    }
  }
}

}  // namespace detail

/// One Dehn twist along the slope c as a free-group automorphism, given by
/// the images of the generators. Built from the elementary twists
///   R (along a): a -> a, b -> ab        L (along b): a -> ab, b -> b
/// conjugated along the same Stern-Brocot peel as the trace maps.
struct WordAutomorphism {
  std::vector<charvar::Word> images;  // images of a, b

  charvar::Word operator()(const charvar::Word& w) const { return w.substituted(images); }

  static WordAutomorphism compose(const WordAutomorphism& outer, const WordAutomorphism& inner) {
    WordAutomorphism out;
    for (const auto& im : inner.images) out.images.push_back(outer(im));
    return out;
  }
};

inline WordAutomorphism twist_word_action(const Slope& c, bool inverse = false) {
  using charvar::Word;
  auto mk = [](const char* a, const char* b) {
    return WordAutomorphism{{Word::parse(a), Word::parse(b)}};
  };
  const WordAutomorphism R = mk("a", "ab"), Rinv = mk("a", "Ab");
  const WordAutomorphism L = mk("ab", "b"), Linv = mk("aB", "b");
  const auto recipe = detail::twist_recipe(c);
  WordAutomorphism base = recipe.base_is_R ? (inverse ? Rinv : R) : (inverse ? Linv : L);
  // T_c = W o T_base o W^{-1}, W the peel word (last peeled move innermost)
  WordAutomorphism t = base;
  for (auto it = recipe.peel_is_R.rbegin(); it != recipe.peel_is_R.rend(); ++it) {
    const WordAutomorphism& u = *it ? R : L;
    const WordAutomorphism& uinv = *it ? Rinv : Linv;
    t = WordAutomorphism::compose(u, WordAutomorphism::compose(t, uinv));
  }
  return t;
}

/// One Dehn twist along the slope c, acting on trace triples. General
/// slopes are conjugates of the two elementary twists by a mapping-class
/// word found by Stern-Brocot peeling.
inline TraceTriple twist_along(const Slope& c, TraceTriple t, bool inverse = false) {
  const auto recipe = detail::twist_recipe(c);
  // pullback composition: apply peel moves, then the base twist, then undo
  for (bool isR : recipe.peel_is_R) t = isR ? detail::move_R(t) : detail::move_L(t);
  if (recipe.base_is_R)
    t = inverse ? detail::move_Rinv(t) : detail::move_R(t);
  else
    t = inverse ? detail::move_Linv(t) : detail::move_L(t);
  for (auto it = recipe.peel_is_R.rbegin(); it != recipe.peel_is_R.rend(); ++it)
    t = *it ? detail::move_Rinv(t) : detail::move_Linv(t);
  return t;
}

/// Mapping-class move on trace coordinates, one of three twist generators:
/// which=3 fixes x (twist along a), which=2 fixes y (twist along b),
/// which=1 fixes z (twist along ab). Input and output must satisfy the
/// locus relation; breaches beyond tolerance are reported.
inline TraceTriple markov_step(const TraceTriple& t, int which, bool inverse = false) {
  if (!t.on_teichmuller_locus())
    throw std::invalid_argument("markov_step: triple is off the relation locus");
  TraceTriple out;
  switch (which) {
    case 3: out = inverse ? detail::move_Rinv(t) : detail::move_R(t); break;
    case 2: out = inverse ? detail::move_Linv(t) : detail::move_L(t); break;
    case 1: out = twist_along(Slope::of(1, 1), t, inverse); break;
    default: throw std::invalid_argument("markov_step: which must be 1, 2 or 3");
  }
  if (out.relation_residual() > 1e-6)
    throw NumericError("markov_step: relation residual exceeds tolerance");
  return out;
}

/// Degenerating path: k Dehn twists along c applied to the start triple,
/// k = 0..n_steps. The start point must lie on the Teichmueller locus.
inline families::PathSpec twist_path(const TraceTriple& start, const Slope& c,
                                     std::size_t n_steps, double tol_proj = 1e-4) {
  if (!start.on_teichmuller_locus())
    throw std::invalid_argument("twist_path: start triple is off the Teichmueller locus");
  std::vector<Vec> pts;
  pts.reserve(n_steps + 1);
  TraceTriple t = start;
  pts.push_back(t.vec());
  for (std::size_t k = 0; k < n_steps; ++k) {
    t = twist_along(c, t);
    if (!std::isfinite(t.x) || !std::isfinite(t.y) || !std::isfinite(t.z)) break;
    pts.push_back(t.vec());
  }
  return families::PathSpec::from_points(std::move(pts), tol_proj);
}

/// Positive trace of the slope word as a function of trace triples, with
/// the log evaluator routed through scaled matrix products so that twist
/// paths can degenerate far past double overflow of the trace itself.
inline families::Member length_member(const Slope& c, const TraceTriple& base) {
  const charvar::Word w = slope_word(c);
  const charvar::Representation base_rep = charvar::fricke_representation(base.x, base.y, base.z);
  const double tb = charvar::trace_of_word(base_rep, w);
  if (std::fabs(tb) < 2.0 - 1e-9)
    throw std::invalid_argument("length_member: base triple is not hyperbolic for " + c.str());
  const int base_sign = tb > 0 ? 1 : -1;
  families::Member m;
  m.name = c.str();
  m.value = [w, base_sign](const Vec& v) {
    const auto rep = charvar::fricke_representation(v[0], v[1], v[2]);
    return base_sign * charvar::trace_of_word(rep, w);
  };
  m.log_value = [w, base_sign, name = c.str()](const Vec& v) {
    const auto rep = charvar::fricke_representation(v[0], v[1], v[2]);
    const auto [sign, log_abs] = charvar::log_abs_trace(rep, w);
    if (sign != base_sign)
      throw NumericError("length family: trace sign flip along the path for " + name);
    return log_abs;
  };
  return m;
}

inline families::FunctionFamily length_family(const std::vector<Slope>& curves,
                                              const TraceTriple& base) {
  if (curves.empty()) throw std::invalid_argument("length_family: empty curve list");
  std::vector<families::Member> ms;
  ms.reserve(curves.size());
  for (const auto& c : curves) ms.push_back(length_member(c, base));
  return families::FunctionFamily(std::move(ms));
}

/// Limit of the projectivized log length spectrum along a degenerating
/// path. Uses the increment estimator: twist paths degenerate
/// exponentially, so increments of log J converge geometrically while the
/// raw projectivization carries O(1/k) offsets.
///
/// Evaluating J at a far-degenerated triple subtracts huge matrix entries
/// to recover curves the twist keeps short, so this generic-path entry
/// point loses digits once coordinates pass ~1e8. Twist flows should go
/// through twist_limit_spectrum, which is exact in that regime.
inline families::BoundaryResult limit_spectrum(const families::PathSpec& path,
                                               const std::vector<Slope>& curves,
                                               const TraceTriple& base, double t0 = 0.36787944117144233,
                                               double escape_norm = 20.0) {
  const auto family = length_family(curves, base);
  families::LimitOptions opts;
  opts.estimator = families::LimitOptions::Estimator::Increment;
  opts.escape_norm = escape_norm;
  return families::boundary_limit(family, path, t0, opts);
}

/// Natural-log J table along a twist flow, one row per twist power, by
/// pullback: J at the k-th twist of the base equals J of the k-times
/// twisted word at the base itself, where matrix entries stay small and the
/// evaluation is well conditioned at any depth. Words are cyclically
/// reduced first, so the coordinate of the twisting curve itself is
/// evaluated from a fixed short word.
inline std::vector<Vec> twist_log_trace_table(const TraceTriple& base, const Slope& c,
                                              const std::vector<Slope>& curves,
                                              std::size_t steps) {
  if (!base.on_teichmuller_locus())
    throw std::invalid_argument("twist_log_trace_table: base is off the Teichmueller locus");
  if (curves.empty()) throw std::invalid_argument("twist_log_trace_table: empty curve list");
  const auto rho0 = charvar::fricke_representation(base.x, base.y, base.z);
  const auto twist = twist_word_action(c);
  std::vector<charvar::Word> words;
  std::vector<int> base_signs;
  for (const auto& cur : curves) {
    words.push_back(slope_word(cur));
    const double t = charvar::trace_of_word(rho0, words.back());
    if (std::fabs(t) < 2.0 - 1e-9)
      throw std::invalid_argument("twist_log_trace_table: base not hyperbolic for " + cur.str());
    base_signs.push_back(t > 0 ? 1 : -1);
  }
  std::vector<Vec> table;
  table.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    Vec row(curves.size());
    for (std::size_t i = 0; i < curves.size(); ++i) {
      const auto [sign, log_abs] =
          charvar::log_abs_trace(rho0, words[i].cyclically_reduced());
      if (sign != base_signs[i])
        throw NumericError("twist_log_trace_table: trace sign flip for " + curves[i].str());
      row[i] = log_abs;
    }
    table.push_back(std::move(row));
    if (k < steps)
      for (auto& w : words) w = twist(w);
  }
  return table;
}

/// Family reading a precomputed twist table; points are the step indices.
inline families::FunctionFamily twist_table_family(const TraceTriple& base, const Slope& c,
                                                   const std::vector<Slope>& curves,
                                                   std::size_t steps) {
  auto table = std::make_shared<const std::vector<Vec>>(
      twist_log_trace_table(base, c, curves, steps));
  std::vector<families::Member> ms;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    families::Member m;
    m.name = curves[i].str();
    m.value = [table, i](const Vec& p) {
      return std::exp(table->at(static_cast<std::size_t>(p.at(0)))[i]);
    };
    m.log_value = [table, i](const Vec& p) {
      return table->at(static_cast<std::size_t>(p.at(0)))[i];
    };
    ms.push_back(std::move(m));
  }
  return families::FunctionFamily(std::move(ms));
}

inline families::PathSpec step_path(std::size_t steps, double tol_proj) {
  families::PathSpec p;
  p.max_steps = steps + 1;
  p.tol_proj = tol_proj;
  p.point = [](std::size_t k) { return Vec{static_cast<double>(k)}; };
  return p;
}

/// Limit length spectrum of the twist flow along c, by word pullback.
inline families::BoundaryResult twist_limit_spectrum(
    const TraceTriple& base, const Slope& c, const std::vector<Slope>& curves,
    std::size_t steps, double tol_proj = 1e-4, double t0 = 0.36787944117144233,
    double escape_norm = 20.0) {
  const auto family = twist_table_family(base, c, curves, steps);
  families::LimitOptions opts;
  opts.estimator = families::LimitOptions::Estimator::Increment;
  opts.escape_norm = escape_norm;
  return families::boundary_limit(family, step_path(steps, tol_proj), t0, opts);
}

/// Weighted intersection of a measure (u, v) on the two-branch torus train
/// track with the slope s: |u q_s - v p_s|. Piecewise linear in (u, v);
/// integral coprime measures reproduce intersection numbers exactly.
inline double chart_intersection(double u, double v, const Slope& s) {
  if (!(u >= 0.0) || !(v >= 0.0) || (u == 0.0 && v == 0.0))
    throw std::invalid_argument("chart_intersection: measure must be nonnegative, not both zero");
  return std::fabs(u * static_cast<double>(s.q) - v * static_cast<double>(s.p));
}

/// Documented sizes of distinguished curve systems on a genus-g surface
/// with b boundary components: filling injective systems of 9g-9+3b curves
/// and minimal injective systems of 6g-5+2b. No curve construction is done
/// for g >= 2.
inline std::pair<long, long> curve_system_sizes(long g, long b) {
  if (2 - 2 * g - b >= 0)
    throw std::invalid_argument("curve_system_sizes: surface is not hyperbolic (2-2g-b >= 0)");
  return {9 * g - 9 + 3 * b, 6 * g - 5 + 2 * b};
}

/// Length ell = 2 arccosh(J/2) recovered from log J, stable for huge J.
inline double length_from_log_trace(double log_j) {
  if (log_j > 20.0) {
    // arccosh(y) = log y + log(1 + sqrt(1 - 1/y^2)), y = exp(log_j)/2
    return 2.0 * (log_j - 0.6931471805599453 +
                  std::log1p(std::sqrt(1.0 - 4.0 * std::exp(-2.0 * log_j))));
  }
  const double j = std::exp(log_j);
  if (j <= 2.0) return 0.0;
  return 2.0 * std::acosh(j / 2.0);
}

}  // namespace tropc::surface
