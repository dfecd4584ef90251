#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tropc/errors.hpp"
#include "tropc/numeric.hpp"

namespace tropc::semialg {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

/// Parse an exact rational from "p/q", an integer string, or a decimal
/// string such as "-0.25".
inline Rational parse_rational(const std::string& s) {
  if (s.empty()) throw SchemaError("empty rational literal");
  const auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      Integer num(s.substr(0, slash));
      Integer den(s.substr(slash + 1));
      if (den == 0) throw SchemaError("rational with zero denominator: " + s);
      return Rational(num, den);
    }
    const auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(Integer(s));
    bool negative = false;
    std::string body = s;
    if (body[0] == '+' || body[0] == '-') {
      negative = body[0] == '-';
      body = body.substr(1);
    }
    const auto d2 = body.find('.');
    std::string digits = body.substr(0, d2) + body.substr(d2 + 1);
    const std::size_t frac_len = body.size() - d2 - 1;
    // strip leading zeros: cpp_int would read "025" as octal
    std::size_t nz = 0;
    while (nz + 1 < digits.size() && digits[nz] == '0') ++nz;
    digits = digits.substr(nz);
    if (digits.empty()) throw SchemaError("bad rational literal: " + s);
    Integer den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    Rational r(Integer(digits), den);
    return negative ? -r : r;
  } catch (const std::runtime_error&) {
    throw SchemaError("bad rational literal: " + s);
  }
}

inline std::string rational_str(const Rational& r) {
  if (boost::multiprecision::denominator(r) == 1)
    return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

/// Sign and log-magnitude of a polynomial value at a point given in
/// log coordinates (see Polynomial::eval_log).
struct LogEval {
  int sign = 0;        // sign of p(exp(u)); 0 when |.| <= eps relative to the scale
  double log_abs = 0;  // log |p(exp(u))|, -inf when sign == 0
  double log_scale = 0;  // log of the largest monomial magnitude at the point
  /// Relative residual |p| / max-monomial; the quantity compared against
  /// the equality tolerance.
  double rel = 0;
};

/// Sparse Laurent polynomial with exact rational coefficients over a named,
/// ordered variable list. Zero coefficients are never stored; all exponent
/// vectors have the arity of the variable list. Negative exponents are
/// allowed (evaluation then requires strictly positive coordinates).
class Polynomial {
 public:
  using TermMap = std::map<std::vector<int>, Rational>;

  Polynomial() = default;

  Polynomial(std::vector<std::string> vars, TermMap terms)
      : vars_(std::move(vars)), terms_(std::move(terms)) {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (it->first.size() != vars_.size())
        throw SchemaError("polynomial term arity does not match variable list");
      if (it->second == 0)
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  static Polynomial constant(std::vector<std::string> vars, const Rational& c) {
    TermMap t;
    if (c != 0) t[std::vector<int>(vars.size(), 0)] = c;
    return Polynomial(std::move(vars), std::move(t));
  }

  static Polynomial monomial(std::vector<std::string> vars, std::vector<int> exp,
                             const Rational& c) {
    TermMap t;
    if (c != 0) t[std::move(exp)] = c;
    return Polynomial(std::move(vars), std::move(t));
  }

  const std::vector<std::string>& vars() const { return vars_; }
  const TermMap& terms() const { return terms_; }
  std::size_t arity() const { return vars_.size(); }
  bool is_zero() const { return terms_.empty(); }

  bool has_negative_exponent() const {
    for (const auto& [e, c] : terms_)
      for (int k : e)
        if (k < 0) return true;
    return false;
  }

  Polynomial operator+(const Polynomial& o) const {
    require_same_vars(o);
    TermMap t = terms_;
    for (const auto& [e, c] : o.terms_) {
      auto [it, fresh] = t.emplace(e, c);
      if (!fresh) {
        it->second += c;
        if (it->second == 0) t.erase(it);
      }
    }
    return Polynomial(vars_, std::move(t));
  }

  Polynomial operator-() const {
    TermMap t = terms_;
    for (auto& [e, c] : t) c = -c;
    return Polynomial(vars_, std::move(t));
  }

  Polynomial operator-(const Polynomial& o) const { return *this + (-o); }

  Polynomial operator*(const Polynomial& o) const {
    require_same_vars(o);
    TermMap t;
    for (const auto& [ea, ca] : terms_)
      for (const auto& [eb, cb] : o.terms_) {
        std::vector<int> e(ea.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        auto [it, fresh] = t.emplace(std::move(e), ca * cb);
        if (!fresh) it->second += ca * cb;
      }
    for (auto it = t.begin(); it != t.end();)
      it = (it->second == 0) ? t.erase(it) : std::next(it);
    return Polynomial(vars_, std::move(t));
  }

  /// Exact evaluation at a rational point. Coordinates hit by a negative
  /// exponent must be nonzero.
  Rational eval_exact(std::span<const Rational> x) const {
    check_arity(x.size());
    Rational acc = 0;
    for (const auto& [e, c] : terms_) {
      Rational m = c;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (x[i] == 0 && e[i] < 0)
          throw std::invalid_argument("eval_exact: zero coordinate with negative exponent");
        m *= rational_pow(x[i], e[i]);
      }
      acc += m;
    }
    return acc;
  }

  /// Floating evaluation with compensated term summation.
  double eval(std::span<const double> x) const {
    check_arity(x.size());
    std::vector<double> vals;
    vals.reserve(terms_.size());
    for (const auto& [e, c] : terms_) vals.push_back(term_value(e, c, x));
    return kahan_sum(vals);
  }

  /// Largest monomial magnitude at x; the natural scale for relative
  /// equality tolerances.
  double eval_scale(std::span<const double> x) const {
    check_arity(x.size());
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::fabs(term_value(e, c, x)));
    return m;
  }

  /// Evaluate at x = exp(u) componentwise, working on log-magnitudes so that
  /// points with |u| in the hundreds never overflow: the value is recovered
  /// as sign * exp(log_abs) only notionally. eps is the relative threshold
  /// below which the sign is reported as 0.
  LogEval eval_log(std::span<const double> u, double eps = 0.0) const {
    check_arity(u.size());
    LogEval out;
    if (terms_.empty()) {
      out.sign = 0;
      out.log_abs = -std::numeric_limits<double>::infinity();
      out.log_scale = -std::numeric_limits<double>::infinity();
      return out;
    }
    std::vector<double> logmag;
    std::vector<int> sgn;
    logmag.reserve(terms_.size());
    sgn.reserve(terms_.size());
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& [e, c] : terms_) {
      double lm = std::log(std::fabs(static_cast<double>(c)));
      for (std::size_t i = 0; i < e.size(); ++i) lm += e[i] * u[i];
      logmag.push_back(lm);
      sgn.push_back(c > 0 ? 1 : -1);
      top = std::max(top, lm);
    }
    std::vector<double> scaled(logmag.size());
    for (std::size_t i = 0; i < logmag.size(); ++i)
      scaled[i] = sgn[i] * std::exp(logmag[i] - top);
    const double s = stable_sum(std::move(scaled));
    out.log_scale = top;
    out.rel = std::fabs(s);
    if (std::fabs(s) <= eps) {
      out.sign = 0;
      out.log_abs = (s == 0.0) ? -std::numeric_limits<double>::infinity()
                               : top + std::log(std::fabs(s));
    } else {
      out.sign = s > 0 ? 1 : -1;
      out.log_abs = top + std::log(std::fabs(s));
    }
    return out;
  }

  /// Partial evaluation: fix every coordinate except `var`, producing the
  /// univariate coefficient list c[k] with p = sum_k c[k] * x_var^(k+off).
  /// Returns {coeffs, min_exponent}.
  std::pair<std::vector<double>, int> univariate_in(std::size_t var,
                                                    std::span<const double> x) const {
    check_arity(x.size());
    if (var >= vars_.size()) throw std::invalid_argument("univariate_in: bad variable index");
    int lo = 0, hi = 0;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      lo = first ? e[var] : std::min(lo, e[var]);
      hi = first ? e[var] : std::max(hi, e[var]);
      first = false;
    }
    if (first) return {{0.0}, 0};
    std::vector<std::vector<double>> buckets(static_cast<std::size_t>(hi - lo + 1));
    for (const auto& [e, c] : terms_) {
      double m = static_cast<double>(c);
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (i == var || e[i] == 0) continue;
        if (x[i] <= 0.0 && e[i] < 0)
          throw std::invalid_argument("univariate_in: nonpositive coordinate with negative exponent");
        m *= std::pow(x[i], e[i]);
      }
      buckets[static_cast<std::size_t>(e[var] - lo)].push_back(m);
    }
    std::vector<double> coeffs(buckets.size());
    for (std::size_t k = 0; k < buckets.size(); ++k) coeffs[k] = stable_sum(std::move(buckets[k]));
    return {coeffs, lo};
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      if (!first) out += " + ";
      first = false;
      out += rational_str(c);
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        out += "*" + vars_[i];
        if (e[i] != 1) out += "^" + std::to_string(e[i]);
      }
    }
    return out;
  }

 private:
  void check_arity(std::size_t n) const {
    if (n != vars_.size())
      throw std::invalid_argument("polynomial evaluated at a point of wrong arity");
  }

  void require_same_vars(const Polynomial& o) const {
    if (vars_ != o.vars_)
      throw std::invalid_argument("polynomial arithmetic over different variable lists");
  }

  static Rational rational_pow(const Rational& x, int e) {
    Rational r = 1;
    Rational base = e < 0 ? Rational(1) / x : x;
    for (int k = std::abs(e); k > 0; --k) r *= base;
    return r;
  }

  double term_value(const std::vector<int>& e, const Rational& c,
                    std::span<const double> x) const {
    double m = static_cast<double>(c);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (x[i] <= 0.0 && e[i] < 0)
        throw std::invalid_argument("eval: nonpositive coordinate with negative exponent");
      m *= std::pow(x[i], e[i]);
    }
    return m;
  }

  std::vector<std::string> vars_;
  TermMap terms_;
};

}  // namespace tropc::semialg
