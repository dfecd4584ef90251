#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tropc/errors.hpp"
#include "tropc/numeric.hpp"
#include "tropc/smallmat.hpp"

namespace tropc::charvar {

/// Reduced word over free-group generators. Letters are stored 1-based,
/// negated for inverses ("a" = +1, "A" = -1, "b" = +2, ...). Adjacent
/// cancellations are performed on construction; the empty word is the
/// identity.
class Word {
 public:
  Word() = default;

  explicit Word(std::vector<int> letters) {
    for (int l : letters) push(l);
  }

  /// Parse from a string over a..z (generators) and A..Z (inverses).
  static Word parse(std::string_view s) {
    std::vector<int> ls;
    ls.reserve(s.size());
    for (char c : s) {
      if (c >= 'a' && c <= 'z')
        ls.push_back(c - 'a' + 1);
      else if (c >= 'A' && c <= 'Z')
        ls.push_back(-(c - 'A' + 1));
      else if (c == ' ')
        continue;
      else
        throw SchemaError(std::string("bad word letter: ") + c);
    }
    return Word(std::move(ls));
  }

  const std::vector<int>& letters() const { return letters_; }
  bool empty() const { return letters_.empty(); }
  std::size_t length() const { return letters_.size(); }

  Word inverse() const {
    std::vector<int> ls(letters_.rbegin(), letters_.rend());
    for (int& l : ls) l = -l;
    Word w;
    w.letters_ = std::move(ls);  // reversal of a reduced word is reduced
    return w;
  }

  Word operator*(const Word& o) const {
    Word w = *this;
    for (int l : o.letters_) w.push(l);
    return w;
  }

  Word pow(int k) const {
    Word base = k < 0 ? inverse() : *this;
    Word w;
    for (int i = 0; i < std::abs(k); ++i) w = w * base;
    return w;
  }

  /// Net exponent of generator g (1-based).
  int exponent_sum(int g) const {
    int s = 0;
    for (int l : letters_) {
      if (l == g) ++s;
      if (l == -g) --s;
    }
    return s;
  }

  /// Conjugation-minimal representative: strips matching first/last inverse
  /// pairs. Traces only see the conjugacy class, and the short core keeps
  /// their evaluation well conditioned.
  Word cyclically_reduced() const {
    std::size_t lo = 0, hi = letters_.size();
    while (hi - lo >= 2 && letters_[lo] == -letters_[hi - 1]) {
      ++lo;
      --hi;
    }
    Word w;
    w.letters_.assign(letters_.begin() + static_cast<long>(lo),
                      letters_.begin() + static_cast<long>(hi));
    return w;
  }

  /// Image under the endomorphism sending generator g to images[g-1].
  Word substituted(const std::vector<Word>& images) const {
    Word out;
    for (int l : letters_) {
      const std::size_t g = static_cast<std::size_t>(std::abs(l)) - 1;
      if (g >= images.size())
        throw std::invalid_argument("substituted: word uses a generator without an image");
      const Word piece = l > 0 ? images[g] : images[g].inverse();
      for (int m : piece.letters()) out.push(m);
    }
    return out;
  }

  std::string str() const {
    std::string s;
    for (int l : letters_)
      s += static_cast<char>(l > 0 ? ('a' + l - 1) : ('A' - l - 1));
    return s;
  }

  bool operator==(const Word& o) const { return letters_ == o.letters_; }

 private:
  void push(int l) {
    if (l == 0) throw SchemaError("word letter 0");
    if (!letters_.empty() && letters_.back() == -l)
      letters_.pop_back();
    else
      letters_.push_back(l);
  }

  std::vector<int> letters_;
};

/// Dense 2x2 or 3x3 real matrix, row major.
struct Mat {
  int n = 2;
  std::array<double, 9> a{};

  static Mat identity(int n) {
    Mat m;
    m.n = n;
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  static Mat of2(double a00, double a01, double a10, double a11) {
    Mat m;
    m.n = 2;
    m.a = {a00, a01, a10, a11, 0, 0, 0, 0, 0};
    return m;
  }

  static Mat of3(std::array<double, 9> rows) {
    Mat m;
    m.n = 3;
    m.a = rows;
    return m;
  }

  static Mat diag(std::vector<double> d) {
    Mat m;
    m.n = static_cast<int>(d.size());
    for (int i = 0; i < m.n; ++i) m.at(i, i) = d[static_cast<std::size_t>(i)];
    return m;
  }

  double& at(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }

  Mat operator*(const Mat& o) const {
    if (n != o.n) throw std::invalid_argument("Mat: size mismatch");
    Mat r;
    r.n = n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += at(i, k) * o.at(k, j);
        r.at(i, j) = s;
      }
    return r;
  }

  Vec apply(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("Mat::apply: size mismatch");
    Vec y(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += at(i, j) * x[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = s;
    }
    return y;
  }

  double det() const {
    if (n == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
           at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
           at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
  }

  double trace() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += at(i, i);
    return s;
  }

  double max_abs() const {
    double m = 0.0;
    for (int i = 0; i < n * n; ++i) m = std::max(m, std::fabs(a[static_cast<std::size_t>(i)]));
    return m;
  }

  Mat scaled(double s) const {
    Mat r = *this;
    for (int i = 0; i < n * n; ++i) r.a[static_cast<std::size_t>(i)] *= s;
    return r;
  }

  /// Inverse via adjugate over the determinant (closed form at these sizes).
  Mat inverse() const {
    const double d = det();
    if (std::fabs(d) < 1e-300) throw std::invalid_argument("Mat: singular");
    Mat r;
    r.n = n;
    if (n == 2) {
      r.at(0, 0) = at(1, 1) / d;
      r.at(0, 1) = -at(0, 1) / d;
      r.at(1, 0) = -at(1, 0) / d;
      r.at(1, 1) = at(0, 0) / d;
      return r;
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int i1 = (j + 1) % 3, i2 = (j + 2) % 3;  // adjugate: note transpose
        const int j1 = (i + 1) % 3, j2 = (i + 2) % 3;
        r.at(i, j) = (at(i1, j1) * at(i2, j2) - at(i1, j2) * at(i2, j1)) / d;
      }
    return r;
  }

  bool finite() const {
    for (int i = 0; i < n * n; ++i)
      if (!std::isfinite(a[static_cast<std::size_t>(i)])) return false;
    return true;
  }
};

/// Assignment of unimodular matrices to free-group generators.
class Representation {
 public:
  Representation(int size, std::vector<std::pair<std::string, Mat>> gens, double det_tol = 1e-9)
      : size_(size) {
    if (size != 2 && size != 3)
      throw std::invalid_argument("Representation: size must be 2 or 3");
    for (auto& [name, m] : gens) {
      if (m.n != size) throw std::invalid_argument("Representation: matrix size mismatch");
      if (!m.finite()) throw NumericError("Representation: non-finite generator image");
      if (std::fabs(m.det() - 1.0) > det_tol)
        throw std::invalid_argument("Representation: generator '" + name +
                                    "' is not unimodular (|det-1| > tol)");
      names_.push_back(name);
      images_.push_back(m);
      inverses_.push_back(m.inverse());
    }
  }

  int size() const { return size_; }
  std::size_t num_generators() const { return names_.size(); }
  const std::vector<std::string>& generator_names() const { return names_; }

  const Mat& image(std::size_t g) const { return images_.at(g); }
  const Mat& image_inverse(std::size_t g) const { return inverses_.at(g); }

 private:
  int size_;
  std::vector<std::string> names_;
  std::vector<Mat> images_;
  std::vector<Mat> inverses_;
};

/// Ordered product of generator images along the word.
inline Mat evaluate_word(const Representation& rho, const Word& w) {
  Mat m = Mat::identity(rho.size());
  for (int l : w.letters()) {
    const std::size_t g = static_cast<std::size_t>(std::abs(l)) - 1;
    if (g >= rho.num_generators())
      throw std::invalid_argument("evaluate_word: unknown generator in word");
    m = m * (l > 0 ? rho.image(g) : rho.image_inverse(g));
  }
  return m;
}

/// Word product with running rescaling: returns (M, log_scale) with the true
/// product equal to M * exp(log_scale). Keeps entries representable when
/// traces reach e.g. exp(600) along degenerating paths.
inline std::pair<Mat, double> evaluate_word_scaled(const Representation& rho, const Word& w) {
  Mat m = Mat::identity(rho.size());
  double log_scale = 0.0;
  for (int l : w.letters()) {
    const std::size_t g = static_cast<std::size_t>(std::abs(l)) - 1;
    if (g >= rho.num_generators())
      throw std::invalid_argument("evaluate_word: unknown generator in word");
    Mat gm = l > 0 ? rho.image(g) : rho.image_inverse(g);
    const double gs = gm.max_abs();
    if (gs > 1e100) {
      gm = gm.scaled(1.0 / gs);
      log_scale += std::log(gs);
    }
    m = m * gm;
    const double ms = m.max_abs();
    if (ms > 1e100) {
      m = m.scaled(1.0 / ms);
      log_scale += std::log(ms);
    }
  }
  return {m, log_scale};
}

inline double trace_of_word(const Representation& rho, const Word& w) {
  return evaluate_word(rho, w).trace();
}

/// (sign, log|trace|) of the word image, overflow-free.
inline std::pair<int, double> log_abs_trace(const Representation& rho, const Word& w) {
  const auto [m, ls] = evaluate_word_scaled(rho, w);
  const double t = m.trace();
  if (t == 0.0) return {0, -std::numeric_limits<double>::infinity()};
  return {t > 0 ? 1 : -1, std::log(std::fabs(t)) + ls};
}

struct EigenData {
  int n = 2;
  std::array<std::complex<double>, 3> values{};  // |v0| >= |v1| >= |v2|
  std::array<bool, 3> is_real{};
  bool near_degenerate = false;
};

/// Eigenvalues of a 2x2 or 3x3 matrix with |det - 1| <= 1e-6, by closed-form
/// characteristic polynomial solves (quadratic formula / cubic with Newton
/// polish). Sorted by descending modulus; ties put real values before
/// complex ones, then larger real part first. Root separation below 1e-10
/// (relative) sets the near_degenerate flag; values are still returned.
inline EigenData eigen(const Mat& m) {
  if (!m.finite()) throw NumericError("eigen: non-finite matrix");
  const double d = m.det();
  if (std::fabs(d - 1.0) > 1e-6)
    throw std::invalid_argument("eigen: matrix is not unimodular (|det-1| > 1e-6)");
  EigenData out;
  out.n = m.n;
  std::vector<std::complex<double>> vals;
  if (m.n == 2) {
    const double tr = m.trace();
    const double disc = tr * tr - 4.0 * d;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      double l1 = (tr >= 0) ? (tr + root) / 2.0 : (tr - root) / 2.0;
      double l2 = (l1 != 0.0) ? d / l1 : (tr - root) / 2.0;
      vals = {l1, l2};
    } else {
      const double im = std::sqrt(-disc) / 2.0;
      vals = {{tr / 2.0, im}, {tr / 2.0, -im}};
    }
  } else {
    const double tr = m.trace();
    const double mm = m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0) +
                      m.at(0, 0) * m.at(2, 2) - m.at(0, 2) * m.at(2, 0) +
                      m.at(1, 1) * m.at(2, 2) - m.at(1, 2) * m.at(2, 1);
    const CubicRoots r = solve_cubic(-tr, mm, -d);
    if (r.n_real == 3) {
      vals = {r.real[0], r.real[1], r.real[2]};
    } else {
      vals = {r.real[0], r.complex_root, std::conj(r.complex_root)};
    }
  }
  std::sort(vals.begin(), vals.end(), [](const std::complex<double>& a,
                                         const std::complex<double>& b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    const bool ra = a.imag() == 0.0, rb = b.imag() == 0.0;
    if (ra != rb) return ra;
    return a.real() > b.real();
  });
  double maxmod = 0.0;
  for (const auto& v : vals) maxmod = std::max(maxmod, std::abs(v));
  for (std::size_t i = 0; i < vals.size(); ++i) {
    out.values[i] = vals[i];
    out.is_real[i] = vals[i].imag() == 0.0;
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(vals[i] - vals[j]) < 1e-10 * std::max(1.0, maxmod) &&
          std::abs(vals[i] - vals[j]) > 0.0)
        out.near_degenerate = true;
  }
  return out;
}

enum class Proximality { No, Yes, Indeterminate };

inline const char* proximality_str(Proximality p) {
  switch (p) {
    case Proximality::Yes: return "yes";
    case Proximality::No: return "no";
    default: return "indeterminate";
  }
}

/// Strict top-modulus gap beyond 1e-9 relative. Paths near parabolic loci
/// produce the indeterminate verdict rather than a misleading boolean.
inline Proximality proximality(const EigenData& e) {
  const double m1 = std::abs(e.values[0]);
  const double m2 = std::abs(e.values[1]);
  if (m1 <= 0.0) return Proximality::No;
  const double gap = (m1 - m2) / m1;
  if (gap > 1e-9) return Proximality::Yes;
  if (gap > 0.0 || e.near_degenerate) return Proximality::Indeterminate;
  return Proximality::No;
}

inline Proximality proximality(const Mat& m) { return proximality(eigen(m)); }

inline bool is_proximal(const Mat& m) { return proximality(m) == Proximality::Yes; }

namespace detail {

inline void require_biproximal(const EigenData& e) {
  const std::size_t last = static_cast<std::size_t>(e.n) - 1;
  const double m1 = std::abs(e.values[0]), m2 = std::abs(e.values[1]);
  const double ml = std::abs(e.values[last]), ml1 = std::abs(e.values[last - 1]);
  if (!(m1 > 0.0) || (m1 - m2) / m1 <= 1e-9)
    throw std::invalid_argument("matrix is not proximal");
  if (!(ml1 > 0.0) || (ml1 - ml) / ml1 <= 1e-9)
    throw std::invalid_argument("inverse matrix is not proximal");
  if (!e.is_real[0] || !e.is_real[last])
    throw std::invalid_argument("extreme eigenvalues are not real");
  if (e.values[0].real() * e.values[last].real() <= 0.0)
    throw std::invalid_argument("extreme eigenvalues have opposite signs");
}

}  // namespace detail

/// Ratio of the extreme eigenvalues, > 1. Requires the matrix and its
/// inverse proximal with real, equal-sign extreme eigenvalues.
inline double eigen_ratio(const Mat& m) {
  const EigenData e = eigen(m);
  detail::require_biproximal(e);
  return e.values[0].real() / e.values[static_cast<std::size_t>(e.n) - 1].real();
}

/// Translation length: natural log of the extreme eigenvalue ratio.
inline double translation_length(const Mat& m) { return std::log(eigen_ratio(m)); }

/// Positive trace: the trace of w at `query`, sign-fixed at the base
/// representation so the function is positive on the component of the base.
/// Base must be 2x2 with |trace| >= 2 - 1e-9 at w.
inline double positive_trace(const Representation& base, const Representation& query,
                             const Word& w) {
  if (base.size() != 2 || query.size() != 2)
    throw std::invalid_argument("positive_trace: defined for 2x2 representations");
  const double tb = trace_of_word(base, w);
  if (std::fabs(tb) < 1e-12)
    throw std::invalid_argument("positive_trace: trace vanishes at the base point");
  if (std::fabs(tb) < 2.0 - 1e-9)
    throw std::invalid_argument("positive_trace: base point is not on the hyperbolic locus");
  const double t = trace_of_word(query, w);
  return (tb > 0 ? 1.0 : -1.0) * t;
}

namespace detail {

inline Vec eigenvector_for(const Mat& m, double lambda) {
  const int n = m.n;
  Mat s = m;
  for (int i = 0; i < n; ++i) s.at(i, i) -= lambda;
  Vec v(static_cast<std::size_t>(n), 0.0);
  if (n == 2) {
    const double r0 = std::fabs(s.at(0, 0)) + std::fabs(s.at(0, 1));
    const double r1 = std::fabs(s.at(1, 0)) + std::fabs(s.at(1, 1));
    if (r0 >= r1) {
      v = {-s.at(0, 1), s.at(0, 0)};
    } else {
      v = {-s.at(1, 1), s.at(1, 0)};
    }
    if (std::fabs(v[0]) + std::fabs(v[1]) < 1e-14) v = {1.0, 0.0};
  } else {
    double best = -1.0;
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3;
      const Vec c = {s.at(i, 1) * s.at(j, 2) - s.at(i, 2) * s.at(j, 1),
                     s.at(i, 2) * s.at(j, 0) - s.at(i, 0) * s.at(j, 2),
                     s.at(i, 0) * s.at(j, 1) - s.at(i, 1) * s.at(j, 0)};
      const double n2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
      if (n2 > best) {
        best = n2;
        v = c;
      }
    }
    if (best < 1e-28) v = {1.0, 0.0, 0.0};
  }
  double norm = stable_norm(v);
  for (auto& c : v) c /= norm;
  for (double c : v) {
    if (std::fabs(c) > 1e-12) {
      if (c < 0)
        for (auto& cc : v) cc = -cc;
      break;
    }
  }
  return v;
}

}  // namespace detail

/// Attracting and repelling fixed directions (unit eigenvectors of the top
/// and bottom eigenvalues, first significant coordinate positive).
inline std::pair<Vec, Vec> fixed_points(const Mat& m) {
  const EigenData e = eigen(m);
  detail::require_biproximal(e);
  return {detail::eigenvector_for(m, e.values[0].real()),
          detail::eigenvector_for(m, e.values[static_cast<std::size_t>(e.n) - 1].real())};
}

/// Rank-2 normal form with tr(a) = x, tr(b) = y, tr(ab) = z:
///   a -> [[x,-1],[1,0]],  b -> [[y,u],[-1/u,0]]
/// with u the larger root of u^2 - (z - xy) u + 1 = 0. Any other choice
/// differs by conjugation; fixing this one makes outputs reproducible.
inline Representation fricke_representation(double x, double y, double z) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
    throw NumericError("fricke_representation: non-finite trace coordinates");
  const double s = z - x * y;
  if (!std::isfinite(s)) throw NumericError("fricke_representation: trace coordinates overflow");
  const double disc = s * s - 4.0;
  if (disc < 0.0)
    throw std::invalid_argument("fricke_representation: (z - xy)^2 < 4, no real normal form");
  const double root = std::sqrt(disc);
  const double u = (s >= 0.0) ? (s + root) / 2.0 : 2.0 / (s - root);
  if (!std::isfinite(u) || u == 0.0)
    throw NumericError("fricke_representation: normal form overflow");
  return Representation(2, {{"a", Mat::of2(x, -1.0, 1.0, 0.0)},
                            {"b", Mat::of2(y, u, -1.0 / u, 0.0)}});
}

}  // namespace tropc::charvar
