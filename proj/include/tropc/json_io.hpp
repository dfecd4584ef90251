#pragma once

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tropc/charvar.hpp"
#include "tropc/errors.hpp"
#include "tropc/families.hpp"
#include "tropc/hilbert.hpp"
#include "tropc/semialg.hpp"
#include "tropc/surface.hpp"

namespace tropc::io {

using nlohmann::json;

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError("bad JSON in " + what + ": " + e.what());
  }
}

inline semialg::Rational coef_from_json(const json& j) {
  if (j.is_string()) return semialg::parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return semialg::Rational(j.get<long long>());
  if (j.is_number_float()) return semialg::Rational(j.get<double>());  // exact binary value
  throw SchemaError("polynomial coefficient must be a string or number");
}

/// {"vars":["x","y"],"terms":[{"exp":[2,0],"coef":"1"}, ...]}
/// Coefficients are decimal or "p/q" strings (numbers also accepted).
inline semialg::Polynomial polynomial_from_json(const json& j,
                                                const std::vector<std::string>& inherited_vars = {}) {
  if (!j.is_object()) throw SchemaError("polynomial must be an object");
  std::vector<std::string> vars;
  if (j.contains("vars"))
    vars = j.at("vars").get<std::vector<std::string>>();
  else if (!inherited_vars.empty())
    vars = inherited_vars;
  else
    throw SchemaError("polynomial needs a \"vars\" list");
  if (!j.contains("terms") || !j.at("terms").is_array())
    throw SchemaError("polynomial needs a \"terms\" array");
  semialg::Polynomial::TermMap terms;
  for (const auto& t : j.at("terms")) {
    if (!t.is_object() || !t.contains("exp") || !t.contains("coef"))
      throw SchemaError("polynomial term needs \"exp\" and \"coef\"");
    auto exp = t.at("exp").get<std::vector<int>>();
    if (exp.size() != vars.size()) throw SchemaError("polynomial term exponent arity mismatch");
    const semialg::Rational c = coef_from_json(t.at("coef"));
    auto [it, fresh] = terms.emplace(std::move(exp), c);
    if (!fresh) it->second += c;
  }
  return semialg::Polynomial(std::move(vars), std::move(terms));
}

inline json polynomial_to_json(const semialg::Polynomial& p) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms())
    terms.push_back({{"exp", e}, {"coef", semialg::rational_str(c)}});
  return {{"vars", p.vars()}, {"terms", std::move(terms)}};
}

inline semialg::Rel rel_from_string(const std::string& s) {
  if (s == "=0" || s == "==0") return semialg::Rel::EqZero;
  if (s == ">0") return semialg::Rel::GtZero;
  if (s == ">=0") return semialg::Rel::GeZero;
  throw SchemaError("bad relation \"" + s + "\" (want =0, >0 or >=0)");
}

inline semialg::SetNode set_node_from_json(const json& j, const std::vector<std::string>& vars) {
  if (!j.is_object()) throw SchemaError("set node must be an object");
  if (j.contains("all") || j.contains("any")) {
    const bool is_all = j.contains("all");
    const auto& arr = j.at(is_all ? "all" : "any");
    if (!arr.is_array()) throw SchemaError("\"all\"/\"any\" must hold arrays");
    std::vector<semialg::SetNode> children;
    for (const auto& c : arr) children.push_back(set_node_from_json(c, vars));
    return is_all ? semialg::SetNode::all(std::move(children))
                  : semialg::SetNode::any(std::move(children));
  }
  if (j.contains("sign")) {
    const auto& s = j.at("sign");
    if (!s.is_object() || !s.contains("poly") || !s.contains("rel"))
      throw SchemaError("\"sign\" needs \"poly\" and \"rel\"");
    semialg::Condition cond;
    cond.poly = polynomial_from_json(s.at("poly"), vars);
    cond.rel = rel_from_string(s.at("rel").get<std::string>());
    if (s.contains("solve")) {
      const std::string v = s.at("solve").get<std::string>();
      for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == v) cond.solve_hint = i;
      if (!cond.solve_hint) throw SchemaError("solve hint \"" + v + "\" is not a variable");
    }
    return semialg::SetNode::sign(std::move(cond));
  }
  throw SchemaError("set node must contain \"all\", \"any\" or \"sign\"");
}

/// {"vars":[...], "orthant":true, "set":{"all":[{"sign":{...}}, ...]}}
inline semialg::SemiAlgebraicSet set_from_json(const json& j) {
  if (!j.is_object() || !j.contains("vars")) throw SchemaError("set needs a \"vars\" list");
  auto vars = j.at("vars").get<std::vector<std::string>>();
  const bool orthant = j.value("orthant", true);
  semialg::SetNode root =
      j.contains("set") ? set_node_from_json(j.at("set"), vars) : semialg::SetNode::all({});
  return semialg::SemiAlgebraicSet(std::move(vars), std::move(root), orthant);
}

/// {"set":{...}, "members":[{"name":"f1","poly":{...}}, ...]}
inline families::FunctionFamily family_from_json(const json& j) {
  if (!j.is_object() || !j.contains("members")) throw SchemaError("family needs \"members\"");
  std::optional<semialg::SemiAlgebraicSet> domain;
  std::vector<std::string> vars;
  if (j.contains("set")) {
    domain = set_from_json(j.at("set"));
    vars = domain->vars();
  } else if (j.contains("vars")) {
    vars = j.at("vars").get<std::vector<std::string>>();
  } else {
    throw SchemaError("family needs \"set\" or \"vars\"");
  }
  std::vector<std::pair<std::string, semialg::Polynomial>> polys;
  for (const auto& m : j.at("members")) {
    if (!m.is_object() || !m.contains("name") || !m.contains("poly"))
      throw SchemaError("family member needs \"name\" and \"poly\"");
    polys.emplace_back(m.at("name").get<std::string>(),
                       polynomial_from_json(m.at("poly"), vars));
  }
  return families::FunctionFamily::from_polynomials(std::move(polys), std::move(domain));
}

/// {"kind":"explicit","points":[[...],...]} or
/// {"kind":"iterated","rule":"twist","triple":[3,3,3],"slope":"1/2","steps":60} or
/// {"kind":"iterated","rule":"markov","triple":[3,3,3],"which":3,"steps":40}
inline families::PathSpec path_from_json(const json& j, double tol_proj) {
  if (!j.is_object() || !j.contains("kind")) throw SchemaError("path needs a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  const double tol = j.value("tol_proj", tol_proj);
  if (kind == "explicit") {
    if (!j.contains("points")) throw SchemaError("explicit path needs \"points\"");
    auto pts = j.at("points").get<std::vector<Vec>>();
    return families::PathSpec::from_points(std::move(pts), tol);
  }
  if (kind == "iterated") {
    const std::string rule = j.value("rule", "");
    const std::size_t steps = j.value("steps", 60u);
    if (!j.contains("triple")) throw SchemaError("iterated path needs \"triple\"");
    const auto tv = j.at("triple").get<Vec>();
    const surface::TraceTriple t0 = surface::TraceTriple::from(tv);
    if (rule == "twist") {
      if (!j.contains("slope")) throw SchemaError("twist path needs \"slope\"");
      return surface::twist_path(t0, surface::Slope::parse(j.at("slope").get<std::string>()),
                                 steps, tol);
    }
    if (rule == "markov") {
      const int which = j.value("which", 3);
      std::vector<Vec> pts;
      surface::TraceTriple t = t0;
      pts.push_back(t.vec());
      for (std::size_t k = 0; k < steps; ++k) {
        t = surface::markov_step(t, which);
        if (!std::isfinite(t.x) || !std::isfinite(t.y) || !std::isfinite(t.z)) break;
        pts.push_back(t.vec());
      }
      return families::PathSpec::from_points(std::move(pts), tol);
    }
    throw SchemaError("iterated path rule must be \"twist\" or \"markov\"");
  }
  throw SchemaError("path kind must be \"explicit\" or \"iterated\"");
}

inline charvar::Mat mat_from_json(const json& j) {
  if (!j.is_array()) throw SchemaError("matrix must be an array of rows");
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const std::size_t n = rows.size();
  if ((n != 2 && n != 3)) throw SchemaError("matrix must be 2x2 or 3x3");
  charvar::Mat m;
  m.n = static_cast<int>(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw SchemaError("matrix rows must have equal length");
    for (std::size_t jj = 0; jj < n; ++jj)
      m.at(static_cast<int>(i), static_cast<int>(jj)) = rows[i][jj];
  }
  return m;
}

/// {"size":2,"gens":{"a":[[...],[...]],"b":[[...],[...]]}}
inline charvar::Representation representation_from_json(const json& j) {
  if (!j.is_object() || !j.contains("size") || !j.contains("gens"))
    throw SchemaError("representation needs \"size\" and \"gens\"");
  const int size = j.at("size").get<int>();
  std::vector<std::pair<std::string, charvar::Mat>> gens;
  const auto& g = j.at("gens");
  if (!g.is_object()) throw SchemaError("\"gens\" must map names to matrices");
  for (auto it = g.begin(); it != g.end(); ++it) {
    if (it.key().size() != 1 || it.key()[0] < 'a' || it.key()[0] > 'z')
      throw SchemaError("generator names must be single letters a..z");
    gens.emplace_back(it.key(), mat_from_json(it.value()));
  }
  std::sort(gens.begin(), gens.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (gens[i].first != std::string(1, static_cast<char>('a' + i)))
      throw SchemaError("generator names must be consecutive letters starting at 'a'");
  try {
    return charvar::Representation(size, std::move(gens));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
}

/// {"kind":"ellipse","center":[0,0],"axes":[1,1]} or
/// {"kind":"polygon","points":[[...],...]}
inline hilbert::ConvexDomain domain_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw SchemaError("domain needs a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "ellipse") {
    hilbert::Ellipse e;
    const auto c = j.value("center", std::vector<double>{0, 0});
    const auto a = j.value("axes", std::vector<double>{1, 1});
    if (c.size() != 2 || a.size() != 2) throw SchemaError("ellipse center/axes must be pairs");
    e.center = {c[0], c[1]};
    e.axes = {a[0], a[1]};
    return hilbert::canonical_domain(e);
  }
  if (kind == "polygon") {
    if (!j.contains("points")) throw SchemaError("polygon needs \"points\"");
    hilbert::Polygon p;
    for (const auto& pt : j.at("points")) {
      const auto v = pt.get<std::vector<double>>();
      if (v.size() != 2) throw SchemaError("polygon points must be pairs");
      p.pts.push_back({v[0], v[1]});
    }
    return hilbert::canonical_domain(p);
  }
  throw SchemaError("domain kind must be \"ellipse\" or \"polygon\"");
}

/// {"kind":"projective","m":[[..3x3..]]} | {"kind":"moebius","m":[[..2x2..]]}
/// | {"kind":"klein","m":[[..2x2..]]} | {"kind":"simplex","diag":[l1,l2,l3]}
inline hilbert::DomainMap domain_map_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw SchemaError("map needs a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "projective") return hilbert::ProjectiveMap{mat_from_json(j.at("m"))};
  if (kind == "moebius") return hilbert::MoebiusMap{mat_from_json(j.at("m"))};
  if (kind == "klein") return hilbert::ProjectiveMap{hilbert::klein_action(mat_from_json(j.at("m")))};
  if (kind == "simplex") {
    const auto d = j.at("diag").get<std::vector<double>>();
    if (d.size() != 3) throw SchemaError("simplex map needs 3 diagonal entries");
    return hilbert::ProjectiveMap{hilbert::simplex_action({d[0], d[1], d[2]})};
  }
  throw SchemaError("map kind must be projective, moebius, klein or simplex");
}

}  // namespace tropc::io
