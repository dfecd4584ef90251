#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tropc/errors.hpp"
#include "tropc/logmap.hpp"
#include "tropc/numeric.hpp"
#include "tropc/semialg.hpp"

namespace tropc::families {

struct Member {
  std::string name;
  std::function<double(const Vec&)> value;
  /// Optional direct log evaluator; families built from polynomials or
  /// trace functions supply one so that degenerating paths never overflow.
  std::function<double(const Vec&)> log_value;
};

/// Finite ordered family of positive functions on a parameter set. The set
/// may be an explicit semi-algebraic set (enabling sampled properness
/// checks) or opaque (e.g. trace-coordinate space).
class FunctionFamily {
 public:
  explicit FunctionFamily(std::vector<Member> members,
                          std::optional<semialg::SemiAlgebraicSet> domain = std::nullopt)
      : members_(std::move(members)), domain_(std::move(domain)) {
    if (members_.empty()) throw std::invalid_argument("FunctionFamily: empty member list");
    for (std::size_t i = 0; i < members_.size(); ++i)
      for (std::size_t j = i + 1; j < members_.size(); ++j)
        if (members_[i].name == members_[j].name)
          throw std::invalid_argument("FunctionFamily: duplicate member name '" +
                                      members_[i].name + "'");
  }

  /// The coordinate family {x_i} on a set over the positive orthant.
  static FunctionFamily coordinates(const semialg::SemiAlgebraicSet& S) {
    std::vector<Member> ms;
    for (std::size_t i = 0; i < S.ambient_dim(); ++i) {
      Member m;
      m.name = S.vars()[i];
      m.value = [i](const Vec& x) { return x[i]; };
      m.log_value = [i](const Vec& x) { return std::log(x[i]); };
      ms.push_back(std::move(m));
    }
    return FunctionFamily(std::move(ms), S);
  }

  /// Family of named polynomial functions (positive on the set).
  static FunctionFamily from_polynomials(
      std::vector<std::pair<std::string, semialg::Polynomial>> polys,
      std::optional<semialg::SemiAlgebraicSet> domain = std::nullopt) {
    std::vector<Member> ms;
    for (auto& [name, p] : polys) {
      Member m;
      m.name = name;
      m.value = [p](const Vec& x) { return p.eval(x); };
      m.log_value = [p](const Vec& x) {
        Vec u(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
          if (!(x[i] > 0.0))
            throw std::invalid_argument("family log evaluation off the positive orthant");
          u[i] = std::log(x[i]);
        }
        const semialg::LogEval le = p.eval_log(u);
        if (le.sign <= 0) throw NumericError("family member is not positive at the point");
        return le.log_abs;
      };
      ms.push_back(std::move(m));
    }
    return FunctionFamily(std::move(ms), std::move(domain));
  }

  std::size_t size() const { return members_.size(); }
  const std::vector<Member>& members() const { return members_; }
  const std::optional<semialg::SemiAlgebraicSet>& domain() const { return domain_; }

  std::vector<std::string> names() const {
    std::vector<std::string> ns;
    ns.reserve(members_.size());
    for (const auto& m : members_) ns.push_back(m.name);
    return ns;
  }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < members_.size(); ++i)
      if (members_[i].name == name) return i;
    throw std::invalid_argument("FunctionFamily: no member named '" + name + "'");
  }

  /// Componentwise evaluation; every component must be strictly positive.
  Vec values(const Vec& x) const {
    Vec out(members_.size());
    for (std::size_t i = 0; i < members_.size(); ++i) {
      out[i] = members_[i].value(x);
      if (!(out[i] > 0.0))
        throw NumericError("family member '" + members_[i].name +
                           "' evaluated nonpositive (" + std::to_string(out[i]) + ")");
    }
    return out;
  }

  /// Logs of the member values in base 1/t0.
  Vec log_values(const Vec& x, double t0) const {
    if (!(t0 > 0.0 && t0 < 1.0)) throw std::invalid_argument("log_values: t0 must be in (0,1)");
    const double inv = 1.0 / std::log(1.0 / t0);
    Vec out(members_.size());
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (members_[i].log_value) {
        out[i] = members_[i].log_value(x) * inv;
      } else {
        const double v = members_[i].value(x);
        if (!(v > 0.0))
          throw NumericError("family member '" + members_[i].name + "' evaluated nonpositive");
        out[i] = std::log(v) * inv;
      }
    }
    return out;
  }

  /// Permute members by a label substitution: the member at slot i of the
  /// result is the member named subst(name_i). Evaluators are unchanged.
  /// The substitution must be a bijection of the member names.
  FunctionFamily relabeled(const std::map<std::string, std::string>& subst) const {
    auto lookup = [&](const std::string& n) {
      auto it = subst.find(n);
      return it == subst.end() ? n : it->second;
    };
    std::map<std::string, int> image_count;
    for (const auto& m : members_) {
      const std::string img = lookup(m.name);
      index_of(img);  // throws if the image is not a member name
      ++image_count[img];
    }
    for (const auto& [img, cnt] : image_count)
      if (cnt != 1) throw std::invalid_argument("relabeled: substitution is not a bijection");
    std::vector<Member> ms;
    ms.reserve(members_.size());
    for (const auto& m : members_) ms.push_back(members_[index_of(lookup(m.name))]);
    return FunctionFamily(std::move(ms), domain_);
  }

  /// The corresponding permutation on coordinate vectors: out[i] = v[pi(i)].
  Vec permute_like(const std::map<std::string, std::string>& subst, const Vec& v) const {
    if (v.size() != members_.size()) throw std::invalid_argument("permute_like: size mismatch");
    auto lookup = [&](const std::string& n) {
      auto it = subst.find(n);
      return it == subst.end() ? n : it->second;
    };
    Vec out(v.size());
    for (std::size_t i = 0; i < members_.size(); ++i)
      out[i] = v[index_of(lookup(members_[i].name))];
    return out;
  }

  FunctionFamily subfamily(const std::vector<std::string>& names) const {
    std::vector<Member> ms;
    for (const auto& n : names) ms.push_back(members_[index_of(n)]);
    return FunctionFamily(std::move(ms), domain_);
  }

 private:
  std::vector<Member> members_;
  std::optional<semialg::SemiAlgebraicSet> domain_;
};

/// Discrete path k -> point of the underlying set, k = 0, 1, 2, ...
struct PathSpec {
  std::function<Vec(std::size_t)> point;
  std::size_t max_steps = 200;
  double tol_proj = 1e-3;

  static PathSpec from_points(std::vector<Vec> pts, double tol = 1e-3) {
    if (pts.empty()) throw std::invalid_argument("PathSpec: empty point list");
    PathSpec p;
    p.max_steps = pts.size();
    p.tol_proj = tol;
    p.point = [pts = std::move(pts)](std::size_t k) { return pts.at(k); };
    return p;
  }
};

enum class LimitStatus { Converged, NoEscape, NotConverged };

inline const char* limit_status_str(LimitStatus s) {
  switch (s) {
    case LimitStatus::Converged: return "converged";
    case LimitStatus::NoEscape: return "no-escape";
    default: return "not-converged";
  }
}

struct BoundaryResult {
  LimitStatus status = LimitStatus::NoEscape;
  Vec direction;                // unit vector over family coordinates (Converged only)
  std::vector<double> angles;   // successive angles between direction iterates
  std::size_t steps_used = 0;
  double final_norm = 0.0;
  bool truncated_overflow = false;  // path stopped early on non-finite values
};

struct LimitOptions {
  /// Log-norm a path value must exceed before directions count as escaping.
  double escape_norm = 30.0;
  /// Raw normalizes the log-value vector itself; Increment normalizes the
  /// difference across a window, which cancels the O(1) offsets of
  /// exponentially degenerating paths and converges much faster.
  enum class Estimator { Raw, Increment };
  Estimator estimator = Estimator::Raw;
  std::size_t increment_window = 1;
  bool check_membership = true;
};

/// Limit of the projectivized log-image along the path. Converged when the
/// last three direction iterates pairwise differ by at most tol_proj in
/// angle. All reductions over family coordinates are permutation-invariant,
/// so relabeling members permutes the limit exactly.
inline BoundaryResult boundary_limit(const FunctionFamily& F, const PathSpec& path, double t0,
                                     const LimitOptions& opts = {}) {
  BoundaryResult out;
  std::vector<Vec> history;
  std::vector<Vec> dirs;  // direction iterates
  const std::size_t w = std::max<std::size_t>(1, opts.increment_window);
  for (std::size_t k = 0; k < path.max_steps; ++k) {
    Vec x;
    try {
      x = path.point(k);
    } catch (const std::out_of_range&) {
      break;
    }
    if (!all_finite(x)) {
      out.truncated_overflow = true;
      break;
    }
    if (opts.check_membership && F.domain() && !F.domain()->contains(x))
      throw std::invalid_argument("boundary_limit: path point leaves the underlying set at k=" +
                                  std::to_string(k));
    Vec y;
    try {
      y = F.log_values(x, t0);
    } catch (const NumericError&) {
      out.truncated_overflow = true;
      break;
    }
    if (!all_finite(y)) {
      out.truncated_overflow = true;
      break;
    }
    history.push_back(std::move(y));
    out.steps_used = k + 1;
    const Vec& yk = history.back();
    out.final_norm = stable_norm(yk);
    if (out.final_norm < opts.escape_norm) continue;
    Vec cand;
    if (opts.estimator == LimitOptions::Estimator::Raw) {
      cand = yk;
    } else {
      if (history.size() <= w) continue;
      const Vec& prev = history[history.size() - 1 - w];
      cand.resize(yk.size());
      for (std::size_t i = 0; i < yk.size(); ++i) cand[i] = yk[i] - prev[i];
    }
    const double cn = stable_norm(cand);
    if (!(cn > 0.0)) continue;
    for (auto& c : cand) c /= cn;
    if (!dirs.empty()) out.angles.push_back(angle_between(dirs.back(), cand));
    dirs.push_back(std::move(cand));
    if (dirs.size() >= 3) {
      const std::size_t n = dirs.size();
      const double a01 = angle_between(dirs[n - 3], dirs[n - 2]);
      const double a12 = angle_between(dirs[n - 2], dirs[n - 1]);
      const double a02 = angle_between(dirs[n - 3], dirs[n - 1]);
      if (a01 <= path.tol_proj && a12 <= path.tol_proj && a02 <= path.tol_proj) {
        out.status = LimitStatus::Converged;
        out.direction = normalized(dirs.back());
        return out;
      }
    }
  }
  out.status = dirs.empty() ? LimitStatus::NoEscape : LimitStatus::NotConverged;
  if (!dirs.empty()) out.direction = normalized(dirs.back());
  return out;
}

enum class ProperVerdict { Consistent, Counterexample, NoEscapingSamples };

inline const char* proper_verdict_str(ProperVerdict v) {
  switch (v) {
    case ProperVerdict::Consistent: return "consistent";
    case ProperVerdict::Counterexample: return "counterexample";
    default: return "no-escaping-samples";
  }
}

struct ProperReport {
  ProperVerdict verdict = ProperVerdict::NoEscapingSamples;
  /// One point per ladder rung when a counterexample was found: escaping
  /// points whose family image stays small.
  std::vector<Vec> witness_points;
  std::vector<double> witness_image_norms;
  std::vector<double> witness_radii;
  std::vector<logmap::RungReport> rungs;
};

/// Sampled falsification of properness: hunt for points escaping every
/// compact (log-norm past each ladder rung) while the log-image of the
/// family stays small (norm <= ratio_tol * rung). "Consistent" is evidence
/// only, never a proof; a genuine witness sequence is a refutation.
inline ProperReport falsify_properness(const FunctionFamily& F,
                                       const std::vector<double>& ladder,
                                       std::size_t samples_per_rung, std::uint64_t seed,
                                       double ratio_tol = 0.05,
                                       const logmap::EscapeOptions& opt = {}) {
  if (!F.domain())
    throw std::invalid_argument("falsify_properness: family has no samplable underlying set");
  if (ladder.empty()) throw std::invalid_argument("falsify_properness: empty ladder");
  const auto& S = *F.domain();
  ProperReport rep;
  bool all_rungs_witnessed = true;
  for (std::size_t r = 0; r < ladder.size(); ++r) {
    const double R = ladder[r];
    std::size_t attempts = 0;
    auto pts = logmap::sample_escaping_log(S, R, samples_per_rung, seed + 77 * (r + 1), opt,
                                           &attempts);
    rep.rungs.push_back({R, attempts, pts.size()});
    if (pts.empty()) {
      if (r == 0) {
        rep.verdict = ProperVerdict::NoEscapingSamples;
        return rep;
      }
      all_rungs_witnessed = false;
      continue;
    }
    double best = 1e308;
    Vec best_point;
    double best_radius = 0.0;
    for (const auto& u : pts) {
      Vec x(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) x[i] = std::exp(u[i]);
      double img;
      try {
        img = stable_norm(F.log_values(x, 0.36787944117144233));
      } catch (const NumericError&) {
        continue;
      }
      if (img < best) {
        best = img;
        best_point = x;
        best_radius = stable_norm(u);
      }
    }
    if (best <= ratio_tol * R && !best_point.empty()) {
      rep.witness_points.push_back(best_point);
      rep.witness_image_norms.push_back(best);
      rep.witness_radii.push_back(best_radius);
    } else {
      all_rungs_witnessed = false;
    }
  }
  rep.verdict = (all_rungs_witnessed && rep.witness_points.size() == ladder.size())
                    ? ProperVerdict::Counterexample
                    : ProperVerdict::Consistent;
  return rep;
}

/// Boundary coordinate forced by a positive-coefficient Laurent expression:
/// the max over monomials of <exponent, d> in the named coordinates.
/// The positivity of every coefficient is what makes the extension unique;
/// a nonpositive coefficient invalidates the certificate.
inline double push_forward_direction(const semialg::Polynomial& expr,
                                     const std::vector<std::string>& names, const Vec& d) {
  if (names.size() != d.size())
    throw std::invalid_argument("push_forward_direction: names/direction size mismatch");
  if (expr.terms().empty())
    throw std::invalid_argument("push_forward_direction: zero expression");
  for (const auto& [e, c] : expr.terms())
    if (!(c > 0))
      throw std::invalid_argument("push_forward_direction: certificate requires strictly "
                                  "positive coefficients");
  std::vector<std::size_t> idx(expr.vars().size());
  for (std::size_t v = 0; v < expr.vars().size(); ++v) {
    bool found = false;
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == expr.vars()[v]) {
        idx[v] = i;
        found = true;
        break;
      }
    if (!found)
      throw std::invalid_argument("push_forward_direction: expression variable '" +
                                  expr.vars()[v] + "' is not a family member");
  }
  double best = -1e308;
  for (const auto& [e, c] : expr.terms()) {
    double v = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) v += e[k] * d[idx[k]];
    best = std::max(best, v);
  }
  return best;
}

struct InjectivityWitness {
  std::size_t path_i = 0, path_j = 0;
  double big_angle = 0.0, small_angle = 0.0;
};

struct InjectivityReport {
  std::vector<BoundaryResult> big_limits;       // one per path
  std::vector<Vec> small_projections;           // renormalized projections
  std::vector<InjectivityWitness> witnesses;    // empty = no witness (evidence only)
  double tol = 0.0;
};

/// Compare boundary limits under the big family with their projections to
/// the small subfamily: a pair of distinct big directions whose projections
/// coincide witnesses non-injectivity of the projection. Absence of
/// witnesses over a finite path set is evidence, not proof.
inline InjectivityReport injectivity_evidence(const FunctionFamily& big,
                                              const std::vector<std::string>& small_names,
                                              const std::vector<PathSpec>& paths, double t0,
                                              double tol = 1e-3, const LimitOptions& opts = {}) {
  std::vector<std::size_t> proj(small_names.size());
  for (std::size_t i = 0; i < small_names.size(); ++i) proj[i] = big.index_of(small_names[i]);
  InjectivityReport rep;
  rep.tol = tol;
  for (std::size_t p = 0; p < paths.size(); ++p) {
    BoundaryResult r = boundary_limit(big, paths[p], t0, opts);
    if (r.status != LimitStatus::Converged)
      throw NumericError(std::string("injectivity_evidence: path ") + std::to_string(p) +
                         " did not converge (" + limit_status_str(r.status) + ")");
    Vec s(proj.size());
    for (std::size_t i = 0; i < proj.size(); ++i) s[i] = r.direction[proj[i]];
    const double n = stable_norm(s);
    if (!(n > 1e-12))
      throw NumericError("injectivity_evidence: projection to the subfamily vanishes "
                         "(subfamily cannot be proper along this path)");
    for (auto& c : s) c /= n;
    rep.big_limits.push_back(std::move(r));
    rep.small_projections.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      const double ab = angle_between(rep.big_limits[i].direction, rep.big_limits[j].direction);
      const double as = angle_between(rep.small_projections[i], rep.small_projections[j]);
      if (ab > tol && as <= tol) rep.witnesses.push_back({i, j, ab, as});
    }
  return rep;
}

}  // namespace tropc::families
