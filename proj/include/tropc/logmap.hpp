#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "tropc/errors.hpp"
#include "tropc/numeric.hpp"
#include "tropc/rng.hpp"
#include "tropc/semialg.hpp"
#include "tropc/smallmat.hpp"

namespace tropc::logmap {

struct LogParams {
  double t0 = 0.36787944117144233;       // 1/e: natural-log base
  std::vector<double> ladder{10, 30, 100};  // radii in natural-log units
  double cluster_tol = 0.05;             // radians

  void validate() const {
    if (!(t0 > 0.0 && t0 < 1.0)) throw std::invalid_argument("LogParams: t0 must be in (0,1)");
    if (ladder.empty()) throw std::invalid_argument("LogParams: empty radius ladder");
    double prev = 0.0;
    for (double r : ladder) {
      if (!(r >= 1.0 && r > prev)) throw std::invalid_argument("LogParams: ladder must be increasing and >= 1");
      prev = r;
    }
    if (!(cluster_tol > 0.0)) throw std::invalid_argument("LogParams: cluster_tol must be positive");
  }
};

/// Componentwise logarithm with base 1/t0.
inline Vec log_map(std::span<const double> x, double t0) {
  if (!(t0 > 0.0 && t0 < 1.0)) throw std::invalid_argument("log_map: t0 must be in (0,1)");
  const double inv = 1.0 / std::log(1.0 / t0);
  Vec u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw std::invalid_argument("log_map: nonpositive coordinate");
    u[i] = std::log(x[i]) * inv;
  }
  return u;
}

/// Log images of n sampled points of S.
inline std::vector<Vec> amoeba_sample(const semialg::SemiAlgebraicSet& S,
                                      const std::vector<std::pair<double, double>>& box,
                                      double t0, std::size_t n, std::uint64_t seed,
                                      const semialg::SampleOptions& opt = {}) {
  auto pts = semialg::sample(S, box, n, seed, opt);
  std::vector<Vec> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(log_map(p, t0));
  return out;
}

struct DirectionCloud {
  std::vector<Vec> dirs;      // unit vectors
  std::vector<double> radii;  // log-norm of the sample each direction came from
  std::size_t dim = 0;
};

struct EscapeOptions {
  double eps_eq = 1e-9;
  std::size_t budget_per_point = 6000;
  int scan_nodes = 96;
  int bisect_iters = 200;
  double shell_width = 0.3;        // radii drawn from [R, (1+width) R]
  double axis_range_factor = 2.8;  // equality lines scanned over [-f R, f R]
};

namespace detail {

inline double fast_angle(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] * b[i];
  return std::acos(std::min(1.0, std::max(-1.0, d)));
}

/// Root of cond.poly(exp(u)) = 0 along the axis line u[axis] = v, v in
/// [lo,hi], using log-space sign evaluation. Writes u[axis] on success.
inline bool solve_equality_on_axis(const semialg::Condition& cond, Vec& u, std::size_t axis,
                                   double lo, double hi, const EscapeOptions& opt, Rng& rng) {
  auto sign_at = [&](double v) {
    const double keep = u[axis];
    u[axis] = v;
    const int s = cond.poly.eval_log(u, opt.eps_eq).sign;
    u[axis] = keep;
    return s;
  };
  const int n = opt.scan_nodes;
  std::vector<std::pair<double, double>> brackets;
  double prev_v = lo;
  int prev_s = sign_at(lo);
  if (prev_s == 0) {
    u[axis] = lo;
    return true;
  }
  for (int k = 1; k <= n; ++k) {
    const double v = lo + (hi - lo) * k / n;
    const int s = sign_at(v);
    if (s == 0) {
      u[axis] = v;
      return true;
    }
    if (s != prev_s) brackets.emplace_back(prev_v, v);
    prev_v = v;
    prev_s = s;
  }
  if (brackets.empty()) return false;
  auto [blo, bhi] = brackets[rng.below(brackets.size())];
  int slo = sign_at(blo);
  for (int k = 0; k < opt.bisect_iters; ++k) {
    const double mid = 0.5 * (blo + bhi);
    const int sm = sign_at(mid);
    if (sm == 0) {
      u[axis] = mid;
      return true;
    }
    if (sm == slo)
      blo = mid;
    else
      bhi = mid;
    if (bhi - blo <= 1e-13 * std::max(1.0, std::fabs(blo))) break;
  }
  u[axis] = 0.5 * (blo + bhi);
  return true;
}

}  // namespace detail

/// Points of S (in natural-log coordinates) with log-norm at least R.
/// Shell points are drawn at radius ~R and each equality condition is
/// repaired by root solving along a uniformly random coordinate line.
/// Samples are generated directly in log coordinates and conditions
/// evaluated per-monomial in log magnitude, so radii of a few hundred never
/// overflow.
inline std::vector<Vec> sample_escaping_log(const semialg::SemiAlgebraicSet& S, double R,
                                            std::size_t n, std::uint64_t seed,
                                            const EscapeOptions& opt = {},
                                            std::size_t* attempts_out = nullptr) {
  if (!S.positive_orthant())
    throw std::invalid_argument("sample_escaping_log: set must live on the positive orthant");
  Rng rng(seed);
  const std::size_t dim = S.ambient_dim();
  const auto eqs = S.equality_conditions();
  std::vector<Vec> accepted;
  accepted.reserve(n);
  std::size_t attempts = 0;
  const std::size_t budget = opt.budget_per_point * n;
  const double A = opt.axis_range_factor * R;
  while (accepted.size() < n && attempts < budget) {
    ++attempts;
    Vec u = rng.unit_vector(dim);
    const double r = R * (1.0 + opt.shell_width * rng.u01());
    for (auto& c : u) c *= r;
    bool ok = true;
    for (const semialg::Condition* eq : eqs) {
      // the axis is drawn uniformly, ignoring solve hints: cone faces
      // parameterized by a different coordinate are only reachable along
      // that coordinate's line, and hint bias starves them of samples
      const std::size_t axis = rng.below(dim);
      if (!detail::solve_equality_on_axis(*eq, u, axis, -A, A, opt, rng)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (!S.contains_log(u, opt.eps_eq)) continue;
    if (stable_norm(u) < R) continue;
    accepted.push_back(std::move(u));
  }
  if (attempts_out) *attempts_out = attempts;
  return accepted;
}

struct RungReport {
  double radius = 0;
  std::size_t attempts = 0;
  std::size_t accepted = 0;
};

struct LoglimitResult {
  enum class Status { Ok, Bounded };
  Status status = Status::Bounded;
  DirectionCloud stable;                // directions stable across the top two rungs
  std::vector<DirectionCloud> rungs;    // raw per-rung direction clouds
  std::vector<RungReport> reports;
};

/// Numerical estimate of the logarithmic limit set of S as a direction
/// cloud: per ladder rung, escaping samples are normalized to directions;
/// the result keeps only top-rung directions with a companion at the
/// previous rung within cluster_tol. A set with no escaping samples at the
/// first rung is reported as bounded (empty boundary; the compactification
/// is the closure of the amoeba).
inline LoglimitResult loglimit_directions(const semialg::SemiAlgebraicSet& S,
                                          const LogParams& params, std::size_t n_per_rung,
                                          std::uint64_t seed, const EscapeOptions& opt = {},
                                          std::size_t workers = 1) {
  params.validate();
  if (n_per_rung == 0) throw std::invalid_argument("loglimit_directions: n must be >= 1");
  if (workers == 0) workers = 1;
  LoglimitResult out;
  out.stable.dim = S.ambient_dim();
  for (std::size_t k = 0; k < params.ladder.size(); ++k) {
    const double R = params.ladder[k];
    // fan sampling out to workers with disjoint seeds; merge in shard order
    // so the result is independent of completion order
    std::vector<std::future<std::pair<std::vector<Vec>, std::size_t>>> futures;
    const std::size_t shards = std::min(workers, n_per_rung);
    for (std::size_t w = 0; w < shards; ++w) {
      const std::size_t quota = n_per_rung / shards + (w < n_per_rung % shards ? 1 : 0);
      const std::uint64_t shard_seed = seed + 0x9e37u * (k + 1) + 0x10001ull * w;
      futures.push_back(std::async(std::launch::async, [&, quota, shard_seed]() {
        std::size_t att = 0;
        auto got = sample_escaping_log(S, R, quota, shard_seed, opt, &att);
        return std::make_pair(std::move(got), att);
      }));
    }
    std::vector<Vec> pts;
    std::size_t attempts = 0;
    for (auto& f : futures) {
      auto [got, att] = f.get();
      attempts += att;
      for (auto& p : got) pts.push_back(std::move(p));
    }
    out.reports.push_back({R, attempts, pts.size()});
    DirectionCloud cloud;
    cloud.dim = S.ambient_dim();
    for (auto& p : pts) {
      const double nrm = stable_norm(p);
      cloud.radii.push_back(nrm);
      for (auto& c : p) c /= nrm;
      cloud.dirs.push_back(std::move(p));
    }
    out.rungs.push_back(std::move(cloud));
    if (out.rungs.back().dirs.empty()) {
      out.status = LoglimitResult::Status::Bounded;
      return out;
    }
  }
  out.status = LoglimitResult::Status::Ok;
  const auto& top = out.rungs.back();
  if (out.rungs.size() == 1) {
    out.stable = top;
    return out;
  }
  const auto& prev = out.rungs[out.rungs.size() - 2];
  for (std::size_t i = 0; i < top.dirs.size(); ++i) {
    double best = 1e30;
    for (const auto& d : prev.dirs)
      best = std::min(best, detail::fast_angle(top.dirs[i], d));
    if (best <= params.cluster_tol) {
      out.stable.dirs.push_back(top.dirs[i]);
      out.stable.radii.push_back(top.radii[i]);
    }
  }
  return out;
}

/// True iff the maximum of <exp, d> over the monomials of p is attained
/// (within tol) by at least two monomials. This is the brute-force tropical
/// prevariety test; for sets cut out by p it contains every logarithmic
/// limit direction, so acceptance checks assert containment, not equality.
inline bool tropical_prevariety_member(const semialg::Polynomial& p, std::span<const double> d,
                                       double tol) {
  if (p.arity() != d.size())
    throw std::invalid_argument("tropical_prevariety_member: arity mismatch");
  if (p.terms().size() < 2) return false;
  double best = -1e308, second = -1e308;
  for (const auto& [e, c] : p.terms()) {
    double v = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) v += e[i] * d[i];
    if (v > best) {
      second = best;
      best = v;
    } else if (v > second) {
      second = v;
    }
  }
  return best - second <= tol;
}

/// Proximity test: is the unit direction d within angle theta of the
/// tropical prevariety of p? Calibrated pairwise: the top two monomial
/// values can be equalized by a rotation of |v_i - v_j| / |e_i - e_j|.
inline bool prevariety_within_angle(const semialg::Polynomial& p, std::span<const double> d,
                                    double theta) {
  if (p.arity() != d.size())
    throw std::invalid_argument("prevariety_within_angle: arity mismatch");
  const auto& terms = p.terms();
  if (terms.size() < 2) return false;
  Vec unit(d.begin(), d.end());
  unit = normalized(std::move(unit));
  std::vector<std::pair<std::vector<int>, double>> vals;
  double vmax = -1e308;
  for (const auto& [e, c] : terms) {
    double v = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) v += e[i] * unit[i];
    vals.emplace_back(e, v);
    vmax = std::max(vmax, v);
  }
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (std::size_t j = i + 1; j < vals.size(); ++j) {
      double n2 = 0.0;
      for (std::size_t k = 0; k < unit.size(); ++k) {
        const double dk = vals[i].first[k] - vals[j].first[k];
        n2 += dk * dk;
      }
      if (n2 <= 0.0) continue;
      const double gap = vmax - std::min(vals[i].second, vals[j].second);
      if (gap <= theta * std::sqrt(n2)) return true;
    }
  return false;
}

struct Cluster {
  enum class Kind { Ray, Face };
  std::vector<std::size_t> members;  // indices into the input cloud
  Kind kind = Kind::Ray;
  double diameter = 0.0;                       // max pairwise angle
  std::pair<std::size_t, std::size_t> span{0, 0};  // members realizing the diameter
};

namespace detail {

struct Dsu {
  std::vector<std::size_t> parent;
  explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

inline std::vector<std::vector<std::size_t>> chain_components(
    const std::vector<Vec>& dirs, const std::vector<std::size_t>& members, double tol) {
  Dsu dsu(members.size());
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      if (fast_angle(dirs[members[i]], dirs[members[j]]) <= tol) dsu.unite(i, j);
  std::vector<std::vector<std::size_t>> comps;
  std::vector<long> slot(members.size(), -1);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const std::size_t r = dsu.find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(comps.size());
      comps.emplace_back();
    }
    comps[static_cast<std::size_t>(slot[r])].push_back(members[i]);
  }
  return comps;
}

inline std::pair<double, std::pair<std::size_t, std::size_t>> cluster_diameter(
    const std::vector<Vec>& dirs, const std::vector<std::size_t>& members) {
  double best = 0.0;
  std::pair<std::size_t, std::size_t> span{members.front(), members.front()};
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const double a = fast_angle(dirs[members[i]], dirs[members[j]]);
      if (a > best) {
        best = a;
        span = {members[i], members[j]};
      }
    }
  return {best, span};
}

/// Split the directions of a plane group into angular arcs: project onto the
/// plane, sort by angle, and cut at gaps wide enough to be structural rather
/// than sampling artifacts. A 2-dimensional cone meets the sphere in an arc,
/// so arcs are exactly the candidate faces.
inline std::vector<std::vector<std::size_t>> split_arcs(const std::vector<Vec>& dirs,
                                                        const std::vector<std::size_t>& members,
                                                        const std::array<double, 3>& nrm,
                                                        double gap_tol) {
  if (members.size() <= 1) return {members};
  const Vec& first = dirs[members.front()];
  std::array<double, 3> e1{first[0], first[1], first[2]};
  const double along = e1[0] * nrm[0] + e1[1] * nrm[1] + e1[2] * nrm[2];
  for (int i = 0; i < 3; ++i) e1[static_cast<std::size_t>(i)] -= along * nrm[static_cast<std::size_t>(i)];
  double e1n = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  if (e1n < 1e-9) {
    e1 = {nrm[1], nrm[2], nrm[0]};  // fallback basis
    e1n = 1.0;
  }
  for (auto& c : e1) c /= e1n;
  const std::array<double, 3> e2{nrm[1] * e1[2] - nrm[2] * e1[1],
                                 nrm[2] * e1[0] - nrm[0] * e1[2],
                                 nrm[0] * e1[1] - nrm[1] * e1[0]};
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(members.size());
  for (std::size_t idx : members) {
    const Vec& d = dirs[idx];
    const double c1 = d[0] * e1[0] + d[1] * e1[1] + d[2] * e1[2];
    const double c2 = d[0] * e2[0] + d[1] * e2[1] + d[2] * e2[2];
    order.emplace_back(std::atan2(c2, c1), idx);
  }
  std::sort(order.begin(), order.end());
  // find the widest wraparound gap and cut there first
  std::size_t cut = 0;
  double widest = 2.0 * 3.14159265358979323846 + order.front().first - order.back().first;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const double gap = order[i].first - order[i - 1].first;
    if (gap > widest) {
      widest = gap;
      cut = i;
    }
  }
  std::vector<std::vector<std::size_t>> arcs;
  std::vector<std::size_t> current;
  double prev = 0.0;
  for (std::size_t step = 0; step < order.size(); ++step) {
    const auto& [theta, idx] = order[(cut + step) % order.size()];
    if (!current.empty()) {
      double gap = theta - prev;
      if (gap < 0) gap += 2.0 * 3.14159265358979323846;
      if (gap > gap_tol) {
        arcs.push_back(std::move(current));
        current.clear();
      }
    }
    current.push_back(idx);
    prev = theta;
  }
  if (!current.empty()) arcs.push_back(std::move(current));
  return arcs;
}

/// Separate a 3D cloud into groups lying on common planes through the
/// origin. Greedy: repeatedly extract the plane claiming the most remaining
/// directions. Adjacent cones of a fan share boundary rays, which
/// chain-connects them; separating them by plane membership recovers the
/// individual faces.
inline std::vector<std::pair<std::vector<std::size_t>, std::array<double, 3>>> split_planar(
    const std::vector<Vec>& dirs, std::vector<std::size_t> remaining, double tol,
    std::size_t min_group) {
  const double sin_tol = std::sin(tol);
  auto residual = [&](const std::array<double, 3>& nrm, const Vec& d) {
    return std::fabs(nrm[0] * d[0] + nrm[1] * d[1] + nrm[2] * d[2]);
  };
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::array<double, 3>> normals;
  while (!remaining.empty()) {
    if (remaining.size() < 3) {
      groups.push_back(remaining);
      normals.push_back({0, 0, 0});
      break;
    }
    // candidate normals from cross products of strided member pairs
    const std::size_t cap = std::min<std::size_t>(remaining.size(), 48);
    const std::size_t stride = std::max<std::size_t>(1, remaining.size() / cap);
    std::vector<std::size_t> sub;
    for (std::size_t i = 0; i < remaining.size(); i += stride) sub.push_back(remaining[i]);
    std::array<double, 3> best_n{0, 0, 1};
    std::size_t best_count = 0;
    auto try_normal = [&](std::array<double, 3> nrm) {
      const double len = std::sqrt(nrm[0] * nrm[0] + nrm[1] * nrm[1] + nrm[2] * nrm[2]);
      if (len < 0.1) return;
      for (auto& c : nrm) c /= len;
      std::size_t count = 0;
      for (std::size_t idx : remaining)
        if (residual(nrm, dirs[idx]) <= sin_tol) ++count;
      if (count > best_count) {
        best_count = count;
        best_n = nrm;
      }
    };
    for (std::size_t i = 0; i < sub.size(); ++i)
      for (std::size_t j = i + 1; j < sub.size(); ++j) {
        const Vec& a = dirs[sub[i]];
        const Vec& b = dirs[sub[j]];
        try_normal({a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]});
      }
    if (best_count < 3) {
      groups.push_back(remaining);
      normals.push_back({0, 0, 0});
      break;
    }
    // refine by least squares over the claimed set, keep the better normal
    std::array<double, 9> cov{};
    for (std::size_t idx : remaining) {
      if (residual(best_n, dirs[idx]) > sin_tol) continue;
      const Vec& d = dirs[idx];
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          cov[static_cast<std::size_t>(3 * r + c)] += d[static_cast<std::size_t>(r)] * d[static_cast<std::size_t>(c)];
    }
    const auto refined = sym3_smallest_eigenvector(cov);
    std::size_t refined_count = 0;
    for (std::size_t idx : remaining)
      if (residual(refined, dirs[idx]) <= sin_tol) ++refined_count;
    const auto& use_n = refined_count >= best_count ? refined : best_n;
    std::vector<std::size_t> group, rest;
    for (std::size_t idx : remaining)
      (residual(use_n, dirs[idx]) <= sin_tol ? group : rest).push_back(idx);
    groups.push_back(std::move(group));
    normals.push_back(use_n);
    remaining = std::move(rest);
  }
  // keep the planes that claimed enough directions, then reassign every
  // direction to its best-fitting plane: points near a shared boundary ray
  // lie on two planes at once and greedy extraction order must not decide
  // which face owns them
  std::vector<std::array<double, 3>> plane_normals;
  std::vector<std::size_t> leftovers;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const bool degenerate = normals[g][0] == 0 && normals[g][1] == 0 && normals[g][2] == 0;
    if (!degenerate && groups[g].size() >= min_group)
      plane_normals.push_back(normals[g]);
    else
      leftovers.insert(leftovers.end(), groups[g].begin(), groups[g].end());
  }
  std::vector<std::pair<std::vector<std::size_t>, std::array<double, 3>>> out;
  if (plane_normals.empty()) {
    for (std::size_t g = 0; g < groups.size(); ++g) out.emplace_back(groups[g], normals[g]);
    return out;
  }
  out.resize(plane_normals.size());
  for (std::size_t g = 0; g < plane_normals.size(); ++g) out[g].second = plane_normals[g];
  std::vector<std::size_t> everyone;
  for (const auto& g : groups) everyone.insert(everyone.end(), g.begin(), g.end());
  for (std::size_t idx : everyone) {
    std::size_t target = 0;
    double best = 1e30;
    for (std::size_t g = 0; g < plane_normals.size(); ++g) {
      const double r = residual(plane_normals[g], dirs[idx]);
      if (r < best) {
        best = r;
        target = g;
      }
    }
    out[target].first.push_back(idx);
  }
  for (auto it = out.begin(); it != out.end();)
    it = it->first.empty() ? out.erase(it) : std::next(it);
  return out;
}

}  // namespace detail

/// Greedy angular clustering: directions connected by a chain of pairwise
/// angles <= tol share a cluster. In ambient dimension 3 a chain cluster
/// that is not ray-like is further separated into groups lying on common
/// planes through the origin (the faces of a fan chain-connect through
/// shared boundary rays, so pure chain clustering cannot count them).
inline std::vector<Cluster> cluster_cones(const DirectionCloud& cloud, double tol) {
  if (cloud.dirs.empty()) throw std::invalid_argument("cluster_cones: empty cloud");
  std::vector<Vec> dirs = cloud.dirs;
  for (auto& d : dirs) d = normalized(std::move(d));
  std::vector<std::size_t> all(dirs.size());
  std::iota(all.begin(), all.end(), 0);
  auto comps = detail::chain_components(dirs, all, tol);

  std::vector<std::vector<std::size_t>> groups;
  bool all_raylike = true;
  for (auto& comp : comps)
    all_raylike = all_raylike && detail::cluster_diameter(dirs, comp).first <= 2.0 * tol;
  if (cloud.dim != 3 || all_raylike) {
    groups = std::move(comps);
  } else {
    // 2-dimensional cones of a fan chain-connect through shared boundary
    // rays and, under sparse sampling, also fragment; plane membership plus
    // angular-arc splitting is stable against both.
    const std::size_t min_group = std::max<std::size_t>(3, dirs.size() / 100);
    const double gap_tol = std::max(3.0 * tol, 0.3);
    for (auto& [members, nrm] : detail::split_planar(dirs, all, tol, min_group)) {
      const bool degenerate = nrm[0] == 0.0 && nrm[1] == 0.0 && nrm[2] == 0.0;
      if (degenerate) {
        for (auto& cc : detail::chain_components(dirs, members, tol)) groups.push_back(std::move(cc));
        continue;
      }
      auto arcs = detail::split_arcs(dirs, members, nrm, gap_tol);
      // under-sampled stretches of one cone can open gaps wider than
      // gap_tol; fold undersized fragments back into the nearest arc of the
      // same plane rather than reporting them as separate cones
      std::vector<std::vector<std::size_t>> keep;
      std::vector<std::vector<std::size_t>> tiny;
      for (auto& a : arcs)
        (a.size() >= min_group ? keep : tiny).push_back(std::move(a));
      if (keep.empty()) {
        for (auto& a : tiny) groups.push_back(std::move(a));
        continue;
      }
      for (auto& frag : tiny) {
        std::size_t target = 0;
        double best = 1e30;
        for (std::size_t g = 0; g < keep.size(); ++g)
          for (std::size_t m : keep[g])
            for (std::size_t f : frag)
              if (const double a = detail::fast_angle(dirs[m], dirs[f]); a < best) {
                best = a;
                target = g;
              }
        keep[target].insert(keep[target].end(), frag.begin(), frag.end());
      }
      for (auto& a : keep) groups.push_back(std::move(a));
    }
    // where two planes of the fan cross inside a face, samples near the
    // crossing ray can be claimed by the wrong plane and end up as a
    // detached arc; merge groups that touch at chain distance and are
    // jointly coplanar
    auto coplanar = [&](const std::vector<std::size_t>& u) {
      std::array<double, 9> cov{};
      for (std::size_t idx : u) {
        const Vec& d = dirs[idx];
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c)
            cov[static_cast<std::size_t>(3 * r + c)] +=
                d[static_cast<std::size_t>(r)] * d[static_cast<std::size_t>(c)];
      }
      const auto nrm = sym3_smallest_eigenvector(cov);
      for (std::size_t idx : u) {
        const Vec& d = dirs[idx];
        if (std::fabs(nrm[0] * d[0] + nrm[1] * d[1] + nrm[2] * d[2]) > std::sin(tol))
          return false;
      }
      return true;
    };
    bool merged_any = true;
    while (merged_any && groups.size() > 1) {
      merged_any = false;
      for (std::size_t i = 0; i < groups.size() && !merged_any; ++i)
        for (std::size_t j = i + 1; j < groups.size() && !merged_any; ++j) {
          double touch = 1e30;
          for (std::size_t m : groups[i])
            for (std::size_t f : groups[j])
              touch = std::min(touch, detail::fast_angle(dirs[m], dirs[f]));
          if (touch > tol) continue;
          std::vector<std::size_t> u = groups[i];
          u.insert(u.end(), groups[j].begin(), groups[j].end());
          if (!coplanar(u)) continue;
          groups[i] = std::move(u);
          groups.erase(groups.begin() + static_cast<long>(j));
          merged_any = true;
        }
    }
  }
  std::vector<Cluster> out;
  for (auto& g : groups) {
    if (g.empty()) continue;
    Cluster cl;
    cl.members = std::move(g);
    auto [d2, s2] = detail::cluster_diameter(dirs, cl.members);
    cl.diameter = d2;
    cl.span = s2;
    cl.kind = d2 <= 2.0 * tol ? Cluster::Kind::Ray : Cluster::Kind::Face;
    out.push_back(std::move(cl));
  }
  std::sort(out.begin(), out.end(),
            [](const Cluster& a, const Cluster& b) { return a.members.size() > b.members.size(); });
  return out;
}

}  // namespace tropc::logmap
