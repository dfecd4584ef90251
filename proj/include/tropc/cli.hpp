#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tropc/csv.hpp"
#include "tropc/errors.hpp"
#include "tropc/families.hpp"
#include "tropc/hilbert.hpp"
#include "tropc/json_io.hpp"
#include "tropc/logmap.hpp"
#include "tropc/numeric.hpp"
#include "tropc/surface.hpp"
#include "tropc/svg.hpp"
#include "tropc/version.hpp"

namespace tropc::cli {

namespace detail {

inline std::vector<double> parse_double_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::istringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::logic_error&) {
      throw SchemaError(std::string("bad number in ") + what + ": " + tok);
    }
  }
  if (out.empty()) throw SchemaError(std::string("empty list for ") + what);
  return out;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

/// Every artifact records the tool version and a hash of the fully resolved
/// configuration, so acceptance runs are auditable.
inline void stamp(io::Csv& csv, const std::string& command, const io::json& config) {
  csv.comment("tool", std::string("tropc ") + kVersion);
  csv.comment("command", command);
  csv.comment("config-hash", io::hash_hex(io::fnv1a64(command + config.dump())));
}

inline io::json load_json_file(const std::string& path) {
  return io::parse_json(io::read_file(path), path);
}

inline std::filesystem::path artifact(const std::string& out_dir, const std::string& name) {
  return std::filesystem::path(out_dir) / name;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// loglimit: semi-algebraic set -> direction cloud + cone clusters
// ---------------------------------------------------------------------------
inline int cmd_loglimit(const std::string& input, std::uint64_t seed, std::size_t n,
                        const std::string& ladder_str, double cluster_tol, double t0,
                        std::size_t budget, std::size_t workers, const std::string& out_dir,
                        bool force, std::ostream& out) {
  const io::json input_json = detail::load_json_file(input);
  const auto S = io::set_from_json(input_json);
  logmap::LogParams params;
  params.t0 = t0;
  params.ladder = detail::parse_double_list(ladder_str, "--ladder");
  params.cluster_tol = cluster_tol;
  logmap::EscapeOptions opt;
  opt.budget_per_point = budget;
  const io::json config = {{"input", input_json},
                           {"seed", seed},
                           {"n", n},
                           {"ladder", params.ladder},
                           {"cluster_tol", cluster_tol},
                           {"t0", t0},
                           {"workers", workers}};

  const auto res = logmap::loglimit_directions(S, params, n, seed, opt, workers);

  io::Csv dirs;
  detail::stamp(dirs, "loglimit", config);
  std::vector<std::string> head;
  for (const auto& v : S.vars()) head.push_back(v);
  head.push_back("radius");
  head.push_back("cluster");
  dirs.header(head);

  io::Csv clusters_csv;
  detail::stamp(clusters_csv, "loglimit", config);
  clusters_csv.header({"cluster", "kind", "count", "diameter"});

  std::size_t faces = 0, rays = 0;
  if (res.status == logmap::LoglimitResult::Status::Ok && !res.stable.dirs.empty()) {
    const auto clusters = logmap::cluster_cones(res.stable, params.cluster_tol);
    std::vector<long> cluster_of(res.stable.dirs.size(), -1);
    for (std::size_t c = 0; c < clusters.size(); ++c)
      for (std::size_t m : clusters[c].members) cluster_of[m] = static_cast<long>(c);
    for (std::size_t i = 0; i < res.stable.dirs.size(); ++i) {
      std::vector<std::string> row;
      for (double x : res.stable.dirs[i]) row.push_back(io::fmt(x));
      row.push_back(io::fmt(res.stable.radii[i]));
      row.push_back(std::to_string(cluster_of[i]));
      dirs.row(row);
    }
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const bool face = clusters[c].kind == logmap::Cluster::Kind::Face;
      (face ? faces : rays) += 1;
      clusters_csv.row({std::to_string(c), face ? "face" : "ray",
                        std::to_string(clusters[c].members.size()),
                        io::fmt(clusters[c].diameter)});
    }
  }
  io::write_file(detail::artifact(out_dir, "directions.csv"), dirs.str(), force);
  io::write_file(detail::artifact(out_dir, "clusters.csv"), clusters_csv.str(), force);

  if (res.status == logmap::LoglimitResult::Status::Bounded) {
    out << "status: bounded (no escaping samples; the boundary is empty and the"
           " compactification is the amoeba closure)\n";
    for (const auto& r : res.reports)
      out << "rung " << io::fmt(r.radius) << ": accepted " << r.accepted << "/" << r.attempts
          << " attempts\n";
    return 0;
  }
  out << "status: ok\n";
  out << "stable-directions: " << res.stable.dirs.size() << "\n";
  out << "clusters: " << (faces + rays) << " (face-like: " << faces << ", ray-like: " << rays
      << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// tropicalize: polynomial -> prevariety membership grid
// ---------------------------------------------------------------------------
inline int cmd_tropicalize(const std::string& input, std::size_t grid, double tol,
                           const std::string& out_dir, bool force, std::ostream& out) {
  const io::json input_json = detail::load_json_file(input);
  const auto poly = io::polynomial_from_json(input_json);
  if (grid == 0) grid = poly.arity() == 2 ? 720 : 2000;
  const io::json config = {{"input", input_json}, {"grid", grid}, {"tol", tol}};
  io::Csv csv;
  detail::stamp(csv, "tropicalize", config);
  std::vector<std::string> head;
  for (const auto& v : poly.vars()) head.push_back(v);
  head.push_back("member");
  csv.header(head);
  std::size_t members = 0;
  auto emit = [&](const Vec& d) {
    const bool m = logmap::tropical_prevariety_member(poly, d, tol);
    members += m;
    std::vector<std::string> row;
    for (double x : d) row.push_back(io::fmt(x));
    row.push_back(m ? "1" : "0");
    csv.row(row);
  };
  if (poly.arity() == 2) {
    for (std::size_t i = 0; i < grid; ++i) {
      const double th = 2.0 * 3.14159265358979323846 * static_cast<double>(i) / static_cast<double>(grid);
      emit({std::cos(th), std::sin(th)});
    }
  } else if (poly.arity() == 3) {
    const double golden = 2.399963229728653;
    for (std::size_t i = 0; i < grid; ++i) {
      const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * static_cast<double>(i);
      emit({r * std::cos(phi), r * std::sin(phi), z});
    }
  } else {
    throw SchemaError("tropicalize: grids are generated for 2 or 3 variables only");
  }
  io::write_file(detail::artifact(out_dir, "tropicalize.csv"), csv.str(), force);
  out << "grid-points: " << grid << "\n";
  out << "members: " << members << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compactify: family + paths -> boundary directions
// ---------------------------------------------------------------------------
inline int cmd_compactify(const std::string& family_path, const std::string& paths_path,
                          double t0, double tol_proj, double escape_norm,
                          const std::string& estimator, std::size_t max_steps,
                          const std::string& out_dir, bool force, std::ostream& out) {
  const io::json family_json = detail::load_json_file(family_path);
  const io::json paths_json = detail::load_json_file(paths_path);
  const auto family = io::family_from_json(family_json);
  if (!paths_json.is_object() || !paths_json.contains("paths"))
    throw SchemaError("paths file needs a \"paths\" array");
  std::vector<families::PathSpec> paths;
  for (const auto& pj : paths_json.at("paths")) {
    auto p = io::path_from_json(pj, tol_proj);
    p.max_steps = std::min(p.max_steps, max_steps);
    paths.push_back(std::move(p));
  }
  families::LimitOptions opts;
  opts.escape_norm = escape_norm;
  if (estimator == "raw")
    opts.estimator = families::LimitOptions::Estimator::Raw;
  else if (estimator == "increment")
    opts.estimator = families::LimitOptions::Estimator::Increment;
  else
    throw SchemaError("--estimator must be raw or increment");

  const io::json config = {{"family", family_json}, {"paths", paths_json},
                           {"t0", t0},              {"tol_proj", tol_proj},
                           {"escape_norm", escape_norm}, {"estimator", estimator}};
  io::Csv boundary;
  detail::stamp(boundary, "compactify", config);
  boundary.header({"path", "member", "coordinate"});
  io::Csv conv;
  detail::stamp(conv, "compactify", config);
  conv.header({"path", "iterate", "angle"});

  const auto names = family.names();
  std::vector<families::LimitStatus> statuses;
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const auto res = families::boundary_limit(family, paths[p], t0, opts);
    statuses.push_back(res.status);
    for (std::size_t a = 0; a < res.angles.size(); ++a)
      conv.row({std::to_string(p), std::to_string(a), io::fmt(res.angles[a])});
    if (res.status == families::LimitStatus::Converged)
      for (std::size_t i = 0; i < names.size(); ++i)
        boundary.row({std::to_string(p), names[i], io::fmt(res.direction[i])});
    out << "path " << p << ": " << families::limit_status_str(res.status) << "\n";
  }
  io::write_file(detail::artifact(out_dir, "boundary.csv"), boundary.str(), force);
  io::write_file(detail::artifact(out_dir, "convergence.csv"), conv.str(), force);
  bool all_ok = true;
  for (auto s : statuses) all_ok = all_ok && s == families::LimitStatus::Converged;
  if (!all_ok) {
    std::string diag = "non-converged paths:\n";
    for (std::size_t p = 0; p < statuses.size(); ++p)
      if (statuses[p] != families::LimitStatus::Converged)
        diag += "path " + std::to_string(p) + ": " + families::limit_status_str(statuses[p]) + "\n";
    io::write_file(detail::artifact(out_dir, "diagnostics.txt"), diag, true);
    return 3;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// lengths: representation + words -> trace/eigenvalue-ratio/length table
// ---------------------------------------------------------------------------
inline int cmd_lengths(const std::string& rep_path, const std::string& words_str,
                       const std::string& out_dir, bool force, std::ostream& out) {
  const io::json rep_json = detail::load_json_file(rep_path);
  const auto rep = io::representation_from_json(rep_json);
  const auto words = detail::split_list(words_str);
  if (words.empty()) throw SchemaError("--words must list at least one word");
  const io::json config = {{"rep", rep_json}, {"words", words}};
  io::Csv csv;
  detail::stamp(csv, "lengths", config);
  csv.header({"word", "trace", "proximality", "eigen_ratio", "translation_length",
              "positive_trace"});
  for (const auto& ws : words) {
    const auto w = charvar::Word::parse(ws);
    const auto m = charvar::evaluate_word(rep, w);
    const double tr = m.trace();
    const auto prox = charvar::proximality(m);
    std::string ratio, length, jpos;
    if (prox == charvar::Proximality::Yes) {
      try {
        const double e = charvar::eigen_ratio(m);
        ratio = io::fmt(e);
        length = io::fmt(std::log(e));
      } catch (const std::invalid_argument&) {
        // inverse not proximal or sign mismatch: leave cells empty
      }
    }
    if (rep.size() == 2 && std::fabs(tr) >= 2.0 - 1e-9) jpos = io::fmt(std::fabs(tr));
    csv.row({ws, io::fmt(tr), charvar::proximality_str(prox), ratio, length, jpos});
    out << ws << ": trace=" << io::fmt(tr) << " proximal=" << charvar::proximality_str(prox);
    if (!ratio.empty()) out << " e=" << ratio << " l=" << length;
    out << "\n";
  }
  io::write_file(detail::artifact(out_dir, "lengths.csv"), csv.str(), force);
  return 0;
}

// ---------------------------------------------------------------------------
// twist-degenerate: trace triple + slope -> limit length spectrum
// ---------------------------------------------------------------------------
inline int cmd_twist_degenerate(const std::string& triple_str, const std::string& slope_str,
                                const std::string& curves_str, std::size_t steps, double t0,
                                double tol_proj, const std::string& out_dir, bool force,
                                std::ostream& out) {
  const auto tv = detail::parse_double_list(triple_str, "--triple");
  if (tv.size() != 3) throw SchemaError("--triple needs three numbers x,y,z");
  const surface::TraceTriple base{tv[0], tv[1], tv[2]};
  const auto slope = surface::Slope::parse(slope_str);
  std::vector<surface::Slope> curves;
  for (const auto& c : detail::split_list(curves_str)) curves.push_back(surface::Slope::parse(c));
  if (curves.empty()) throw SchemaError("--curves must list at least one slope");

  const io::json config = {{"triple", tv},   {"slope", slope.str()},
                           {"curves", curves_str}, {"steps", steps},
                           {"t0", t0},       {"tol_proj", tol_proj}};

  const auto log_table = surface::twist_log_trace_table(base, slope, curves, steps);

  io::Csv table;
  detail::stamp(table, "twist-degenerate", config);
  table.comment("slope", slope.str());
  std::vector<std::string> head{"k"};
  for (const auto& c : curves) head.push_back("l_" + c.str());
  for (const auto& c : curves) head.push_back("n_" + c.str());  // normalized log spectrum
  table.header(head);
  for (std::size_t k = 0; k < log_table.size(); ++k) {
    std::vector<std::string> row{std::to_string(k)};
    for (double v : log_table[k]) row.push_back(io::fmt(surface::length_from_log_trace(v)));
    const double nrm = stable_norm(log_table[k]);
    for (double v : log_table[k]) row.push_back(io::fmt(nrm > 0 ? v / nrm : 0.0));
    table.row(row);
  }
  io::write_file(detail::artifact(out_dir, "twist_lengths.csv"), table.str(), force);

  const auto limit = surface::twist_limit_spectrum(base, slope, curves, steps, tol_proj, t0);
  io::Csv lim;
  detail::stamp(lim, "twist-degenerate", config);
  lim.comment("slope", slope.str());
  lim.header({"curve", "coordinate"});
  if (limit.status == families::LimitStatus::Converged) {
    for (std::size_t i = 0; i < curves.size(); ++i)
      lim.row({curves[i].str(), io::fmt(limit.direction[i])});
  }
  io::write_file(detail::artifact(out_dir, "twist_limit.csv"), lim.str(), force);

  out << "status: " << families::limit_status_str(limit.status) << "\n";
  if (limit.status != families::LimitStatus::Converged) {
    std::string diag = "twist-degenerate did not converge; angle sequence:\n";
    for (double a : limit.angles) diag += io::fmt(a) + "\n";
    io::write_file(detail::artifact(out_dir, "diagnostics.txt"), diag, true);
    return 3;
  }
  out << "spectrum:";
  for (std::size_t i = 0; i < curves.size(); ++i)
    out << " " << curves[i].str() << "=" << io::fmt(limit.direction[i]);
  out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// hilbert: domain + map -> orbit distance log and displacement rate
// ---------------------------------------------------------------------------
inline int cmd_hilbert(const std::string& domain_path, const std::string& map_path,
                       const std::string& x0_str, int k_max, const std::string& out_dir,
                       bool force, std::ostream& out) {
  const io::json dom_json = detail::load_json_file(domain_path);
  const io::json map_json = detail::load_json_file(map_path);
  const auto dom = io::domain_from_json(dom_json);
  const auto map = io::domain_map_from_json(map_json);
  const auto x0v = detail::parse_double_list(x0_str, "--x0");
  if (x0v.size() != 2) throw SchemaError("--x0 needs two numbers");
  const hilbert::Vec2 x0{x0v[0], x0v[1]};
  const io::json config = {{"domain", dom_json}, {"map", map_json}, {"x0", x0v}, {"kmax", k_max}};

  const auto res = hilbert::displacement_rate(dom, map, x0, k_max);
  io::Csv csv;
  detail::stamp(csv, "hilbert", config);
  csv.header({"k", "distance", "cesaro"});
  for (std::size_t k = 0; k < res.distances.size(); ++k)
    csv.row({std::to_string(k + 1), io::fmt(res.distances[k]), io::fmt(res.cesaro[k])});
  io::write_file(detail::artifact(out_dir, "hilbert_orbit.csv"), csv.str(), force);
  out << "rate: " << io::fmt(res.rate) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// plot: CSV -> SVG (pure view; regenerable from the CSV alone)
// ---------------------------------------------------------------------------
inline int cmd_plot(const std::string& input, const std::string& kind, const std::string& output,
                    bool force, std::ostream& out) {
  const auto data = io::parse_csv(io::read_file(input));
  auto col = [&](const std::string& name) -> long {
    for (std::size_t i = 0; i < data.header.size(); ++i)
      if (data.header[i] == name) return static_cast<long>(i);
    return -1;
  };
  std::string svg;
  if (kind == "directions2d") {
    io::Svg s(420, 420, -1.3, -1.3, 1.3, 1.3);
    s.circle(0, 0, 1.0, "#444444");
    const long ci = col("cluster");
    for (const auto& r : data.rows) {
      const double x = std::stod(r.at(0)), y = std::stod(r.at(1));
      const std::size_t c = ci >= 0 ? static_cast<std::size_t>(std::stol(r.at(static_cast<std::size_t>(ci)))) : 0;
      s.dot(x, y, 2.0, io::palette(c));
    }
    svg = s.str();
  } else if (kind == "directions3d") {
    // two stereographic charts of the sphere, from the north and south poles
    io::Svg s(840, 420, -5.3, -2.65, 5.3, 2.65);
    s.circle(-2.65, 0, 1.0, "#444444");
    s.circle(2.65, 0, 1.0, "#444444");
    s.text(-4.5, 2.3, "from north pole");
    s.text(0.9, 2.3, "from south pole");
    const long ci = col("cluster");
    for (const auto& r : data.rows) {
      const double x = std::stod(r.at(0)), y = std::stod(r.at(1)), z = std::stod(r.at(2));
      const std::size_t c = ci >= 0 ? static_cast<std::size_t>(std::stol(r.at(static_cast<std::size_t>(ci)))) : 0;
      if (1.0 - z > 0.15) {
        const double px = x / (1.0 - z), py = y / (1.0 - z);
        if (std::hypot(px, py) <= 2.3) s.dot(px - 2.65, py, 2.0, io::palette(c));
      }
      if (1.0 + z > 0.15) {
        const double px = x / (1.0 + z), py = y / (1.0 + z);
        if (std::hypot(px, py) <= 2.3) s.dot(px + 2.65, py, 2.0, io::palette(c));
      }
    }
    svg = s.str();
  } else if (kind == "orbit") {
    double xmax = 1.0, ymax = 1.0;
    for (const auto& r : data.rows) {
      xmax = std::max(xmax, std::stod(r.at(0)));
      ymax = std::max(ymax, std::stod(r.at(1)));
    }
    io::Svg s(520, 360, 0, 0, xmax * 1.05, ymax * 1.1);
    s.line(0, 0, xmax * 1.05, 0, "#444444");
    s.line(0, 0, 0, ymax * 1.1, "#444444");
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : data.rows) pts.emplace_back(std::stod(r.at(0)), std::stod(r.at(1)));
    s.polyline(pts, io::palette(0));
    svg = s.str();
  } else if (kind == "spectrum") {
    // boundary circle of the punctured-torus lamination space; each slope
    // p/q sits at angle 2*atan2(p, q)
    io::Svg s(480, 480, -1.45, -1.45, 1.45, 1.45);
    s.circle(0, 0, 1.0, "#444444");
    std::string slope_comment;
    for (const auto& [k, v] : data.comments)
      if (k == "slope") slope_comment = v;
    for (const auto& r : data.rows) {
      const auto sl = surface::Slope::parse(r.at(0));
      const double th = 2.0 * std::atan2(static_cast<double>(sl.p), static_cast<double>(sl.q));
      s.dot(std::cos(th), std::sin(th), 3.0, io::palette(1));
      s.text(1.08 * std::cos(th), 1.08 * std::sin(th), r.at(0) + " (" + r.at(1) + ")");
    }
    if (!slope_comment.empty()) {
      const auto sl = surface::Slope::parse(slope_comment);
      const double th = 2.0 * std::atan2(static_cast<double>(sl.p), static_cast<double>(sl.q));
      s.dot(std::cos(th), std::sin(th), 5.0, io::palette(2));
      s.text(0.75 * std::cos(th), 0.75 * std::sin(th), "limit " + slope_comment);
    }
    svg = s.str();
  } else {
    throw SchemaError("--kind must be directions2d, directions3d, orbit or spectrum");
  }
  io::write_file(output, svg, force);
  out << "wrote " << output << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maslov-dequantization compactifications: logarithmic limit sets, proper"
               " families, character-variety length spectra, Hilbert metrics"};
  app.require_subcommand(1);

  // loglimit
  std::string ll_input, ll_ladder = "10,30,100", ll_out = "out";
  std::uint64_t ll_seed = 0;
  std::size_t ll_n = 1200, ll_budget = 6000, ll_workers = 1;
  double ll_ctol = 0.05, ll_t0 = 0.36787944117144233;
  bool ll_force = false;
  auto* ll = app.add_subcommand("loglimit", "set -> direction cloud and cone clusters");
  ll->add_option("--input", ll_input, "set JSON file")->required();
  ll->add_option("--seed", ll_seed, "RNG seed (mandatory: sampling command)")->required();
  ll->add_option("--n", ll_n, "target directions per ladder rung");
  ll->add_option("--ladder", ll_ladder, "comma list of log-radius rungs");
  ll->add_option("--cluster-tol", ll_ctol, "angular tolerance (radians)");
  ll->add_option("--t0", ll_t0, "log base parameter in (0,1)");
  ll->add_option("--budget", ll_budget, "sampling attempts per requested point");
  ll->add_option("--workers", ll_workers, "parallel sampling shards");
  ll->add_option("--out", ll_out, "output directory");
  ll->add_flag("--force", ll_force, "overwrite existing artifacts");

  // tropicalize
  std::string tr_input, tr_out = "out";
  std::size_t tr_grid = 0;
  double tr_tol = 1e-9;
  bool tr_force = false;
  auto* tr = app.add_subcommand("tropicalize", "polynomial -> prevariety membership grid");
  tr->add_option("--input", tr_input, "polynomial JSON file")->required();
  tr->add_option("--grid", tr_grid, "number of grid directions (default 720 / 2000)");
  tr->add_option("--tol", tr_tol, "tie tolerance for the max");
  tr->add_option("--out", tr_out, "output directory");
  tr->add_flag("--force", tr_force, "overwrite existing artifacts");

  // compactify
  std::string cp_family, cp_paths, cp_estimator = "increment", cp_out = "out";
  double cp_t0 = 0.36787944117144233, cp_tolproj = 1e-3, cp_escape = 30.0;
  std::size_t cp_maxsteps = 400;
  bool cp_force = false;
  auto* cp = app.add_subcommand("compactify", "family + paths -> boundary directions");
  cp->add_option("--family", cp_family, "family JSON file")->required();
  cp->add_option("--paths", cp_paths, "paths JSON file")->required();
  cp->add_option("--t0", cp_t0, "log base parameter in (0,1)");
  cp->add_option("--tol-proj", cp_tolproj, "projective convergence tolerance (radians)");
  cp->add_option("--escape-norm", cp_escape, "log-norm threshold for escape");
  cp->add_option("--estimator", cp_estimator, "raw | increment");
  cp->add_option("--max-steps", cp_maxsteps, "cap on path steps");
  cp->add_option("--out", cp_out, "output directory");
  cp->add_flag("--force", cp_force, "overwrite existing artifacts");

  // lengths
  std::string le_rep, le_words = "a", le_out = "out";
  bool le_force = false;
  auto* le = app.add_subcommand("lengths", "representation + words -> length table");
  le->add_option("--rep", le_rep, "representation JSON file")->required();
  le->add_option("--words", le_words, "comma list of words over a,A,b,B,...");
  le->add_option("--out", le_out, "output directory");
  le->add_flag("--force", le_force, "overwrite existing artifacts");

  // twist-degenerate
  std::string td_triple = "3,3,3", td_slope, td_curves = "0/1,1/0,1/1,1/2,2/1", td_out = "out";
  std::size_t td_steps = 60;
  double td_t0 = 0.36787944117144233, td_tolproj = 1e-4;
  bool td_force = false;
  auto* td = app.add_subcommand("twist-degenerate", "trace triple + slope -> limit spectrum");
  td->add_option("--triple", td_triple, "start traces x,y,z");
  td->add_option("--slope", td_slope, "twist slope p/q")->required();
  td->add_option("--curves", td_curves, "comma list of curve slopes");
  td->add_option("--max-steps,--steps", td_steps, "twist iterations");
  td->add_option("--t0", td_t0, "log base parameter in (0,1)");
  td->add_option("--tol-proj", td_tolproj, "projective convergence tolerance");
  td->add_option("--out", td_out, "output directory");
  td->add_flag("--force", td_force, "overwrite existing artifacts");

  // hilbert
  std::string hi_domain, hi_map, hi_x0 = "0.2,0.1", hi_out = "out";
  int hi_kmax = 50;
  bool hi_force = false;
  auto* hi = app.add_subcommand("hilbert", "domain + map -> distance/rate logs");
  hi->add_option("--domain", hi_domain, "domain JSON file")->required();
  hi->add_option("--map", hi_map, "map JSON file")->required();
  hi->add_option("--x0", hi_x0, "interior start point x,y");
  hi->add_option("--kmax", hi_kmax, "orbit length");
  hi->add_option("--out", hi_out, "output directory");
  hi->add_flag("--force", hi_force, "overwrite existing artifacts");

  // plot
  std::string pl_input, pl_kind, pl_out;
  bool pl_force = false;
  auto* pl = app.add_subcommand("plot", "CSV -> SVG");
  pl->add_option("--input", pl_input, "CSV artifact")->required();
  pl->add_option("--kind", pl_kind, "directions2d | directions3d | orbit | spectrum")->required();
  pl->add_option("--out", pl_out, "SVG output path")->required();
  pl->add_flag("--force", pl_force, "overwrite existing artifacts");

  std::vector<const char*> argv;
  argv.push_back("tropc");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (ll->parsed())
      return cmd_loglimit(ll_input, ll_seed, ll_n, ll_ladder, ll_ctol, ll_t0, ll_budget,
                          ll_workers, ll_out, ll_force, out);
    if (tr->parsed()) return cmd_tropicalize(tr_input, tr_grid, tr_tol, tr_out, tr_force, out);
    if (cp->parsed())
      return cmd_compactify(cp_family, cp_paths, cp_t0, cp_tolproj, cp_escape, cp_estimator,
                            cp_maxsteps, cp_out, cp_force, out);
    if (le->parsed()) return cmd_lengths(le_rep, le_words, le_out, le_force, out);
    if (td->parsed())
      return cmd_twist_degenerate(td_triple, td_slope, td_curves, td_steps, td_t0, td_tolproj,
                                  td_out, td_force, out);
    if (hi->parsed())
      return cmd_hilbert(hi_domain, hi_map, hi_x0, hi_kmax, hi_out, hi_force, out);
    if (pl->parsed()) return cmd_plot(pl_input, pl_kind, pl_out, pl_force, out);
    err << "no subcommand\n";
    return 2;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace tropc::cli
