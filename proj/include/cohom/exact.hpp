#pragma once

// Exact arithmetic in Q(sqrt m) and an exact computation of dim Z^1, dim B^1
// and dim H^1, independent of the floating-point pipeline.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cohom/errors.hpp"
#include "cohom/group.hpp"
#include "cohom/measure.hpp"

namespace cohom::exact {

/// a + b sqrt(m) with m squarefree > 1; m == 0 marks a plain rational.
class Quadratic {
 public:
  Quadratic() = default;
  Quadratic(Rational a) : a_(std::move(a)) {}  // NOLINT: implicit from rationals is intended
  Quadratic(Rational a, Rational b, std::int64_t m) : a_(std::move(a)), b_(std::move(b)), m_(b_ == 0 ? 0 : m) {}

  const Rational& rational_part() const { return a_; }
  const Rational& radical_part() const { return b_; }
  std::int64_t radicand() const { return m_; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }
  double to_double() const;

  friend bool operator==(const Quadratic& x, const Quadratic& y) { return x.a_ == y.a_ && x.b_ == y.b_ && x.m_ == y.m_; }

  friend Quadratic operator+(const Quadratic& x, const Quadratic& y) {
    const auto m = common(x, y);
    return Quadratic(x.a_ + y.a_, x.b_ + y.b_, m);
  }
  friend Quadratic operator-(const Quadratic& x) { return Quadratic(-x.a_, -x.b_, x.m_); }
  friend Quadratic operator-(const Quadratic& x, const Quadratic& y) { return x + (-y); }
  friend Quadratic operator*(const Quadratic& x, const Quadratic& y) {
    const auto m = common(x, y);
    return Quadratic(x.a_ * y.a_ + Rational(m) * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_, m);
  }
  Quadratic inverse() const {
    // (a - b sqrt m) / (a^2 - m b^2); the norm is nonzero because m is not a square.
    const Rational norm = a_ * a_ - Rational(m_) * b_ * b_;
    if (norm == 0) throw UsageError("division by zero in Q(sqrt m)");
    return Quadratic(a_ / norm, -b_ / norm, m_);
  }
  friend Quadratic operator/(const Quadratic& x, const Quadratic& y) { return x * y.inverse(); }

 private:
  static std::int64_t common(const Quadratic& x, const Quadratic& y) {
    if (x.m_ != 0 && y.m_ != 0 && x.m_ != y.m_)
      throw ValidationError("entries mix different square roots; exact oracle supports a single radicand");
    return x.m_ != 0 ? x.m_ : y.m_;
  }

  Rational a_{0};
  Rational b_{0};
  std::int64_t m_ = 0;
};

inline double Quadratic::to_double() const {
  double v = a_.convert_to<double>();
  if (m_ != 0) v += b_.convert_to<double>() * std::sqrt(static_cast<double>(m_));
  return v;
}

/// sqrt(n) = f sqrt(r) with r squarefree.
inline Quadratic exact_sqrt(std::int64_t n) {
  if (n < 0) throw ValidationError("square root of a negative number");
  if (n == 0) return Quadratic(Rational(0));
  std::int64_t f = 1, r = n;
  for (std::int64_t p = 2; p * p <= r; ++p)
    while (r % (p * p) == 0) {
      r /= p * p;
      f *= p;
    }
  if (r == 1) return Quadratic(Rational(f));
  return Quadratic(Rational(0), Rational(f), r);
}

/// Parses expressions such as "-1/2", "sqrt(3)/2", "0.25", "(1 + sqrt(5))/4"
/// into an exact value. Decimals are read as exact decimal fractions.
class EntryParser {
 public:
  static Quadratic parse(const std::string& text) {
    EntryParser p(text);
    try {
      Quadratic v = p.expression();
      p.skip_space();
      if (p.pos_ != p.s_.size()) p.fail("unexpected trailing characters");
      return v;
    } catch (const UsageError& e) {
      throw ValidationError("entry '" + text + "': " + e.what());
    }
  }

 private:
  explicit EntryParser(const std::string& s) : s_(s) {}

  [[noreturn]] void fail(const std::string& why) const {
    throw ValidationError("cannot parse matrix entry '" + s_ + "': " + why);
  }
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Quadratic expression() {
    Quadratic v = term();
    for (;;) {
      if (eat('+'))
        v = v + term();
      else if (eat('-'))
        v = v - term();
      else
        return v;
    }
  }
  Quadratic term() {
    Quadratic v = unary();
    for (;;) {
      if (eat('*'))
        v = v * unary();
      else if (eat('/'))
        v = v / unary();
      else
        return v;
    }
  }
  Quadratic unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return primary();
  }
  Quadratic primary() {
    skip_space();
    if (eat('(')) {
      Quadratic v = expression();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (s_.compare(pos_, 4, "sqrt") == 0) {
      pos_ += 4;
      if (!eat('(')) fail("expected '(' after sqrt");
      Quadratic arg = expression();
      if (!eat(')')) fail("missing ')'");
      if (arg.radicand() != 0 || denominator(arg.rational_part()) != 1) fail("sqrt argument must be an integer");
      return exact_sqrt(static_cast<std::int64_t>(numerator(arg.rational_part())));
    }
    return number();
  }
  Quadratic number() {
    const std::size_t start = pos_;
    boost::multiprecision::cpp_int digits = 0;
    std::int64_t scale = 0;
    bool any = false, dot = false;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || (s_[pos_] == '.' && !dot))) {
      if (s_[pos_] == '.') {
        dot = true;
      } else {
        digits = digits * 10 + (s_[pos_] - '0');
        any = true;
        if (dot) ++scale;
      }
      ++pos_;
    }
    if (!any) {
      pos_ = start;
      fail("expected a number");
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      bool neg = false;
      if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) neg = s_[pos_++] == '-';
      std::int64_t e = 0;
      bool exp_digits = false;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        e = e * 10 + (s_[pos_++] - '0');
        exp_digits = true;
        if (e > 400) fail("exponent too large");
      }
      if (!exp_digits) fail("malformed exponent");
      scale += neg ? e : -e;
    }
    Rational v(digits);
    boost::multiprecision::cpp_int ten = 1;
    for (std::int64_t i = 0; i < (scale < 0 ? -scale : scale); ++i) ten *= 10;
    if (scale > 0)
      v /= Rational(ten);
    else
      v *= Rational(ten);
    return Quadratic(v);
  }

  std::string s_;
  std::size_t pos_ = 0;
};

using Matrix = std::vector<std::vector<Quadratic>>;

inline Matrix identity(std::size_t d) {
  Matrix m(d, std::vector<Quadratic>(d));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = Quadratic(Rational(1));
  return m;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  Matrix c(n, std::vector<Quadratic>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l].is_zero()) continue;
      for (std::size_t j = 0; j < m; ++j) c[i][j] = c[i][j] + a[i][l] * b[l][j];
    }
  return c;
}

/// Row rank by Gaussian elimination over Q(sqrt m).
inline std::size_t rank(Matrix m) {
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot = r;
    while (pivot < rows && m[pivot][c].is_zero()) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[r]);
    const Quadratic inv = m[r][c].inverse();
    for (std::size_t j = c; j < cols; ++j) m[r][j] = m[r][j] * inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      const Quadratic f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] = m[i][j] - f * m[r][j];
    }
    ++r;
  }
  return r;
}

/// Inverse by Gauss-Jordan; throws if singular.
inline Matrix inverse(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix m = a, inv = identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && m[pivot][c].is_zero()) ++pivot;
    if (pivot == n) throw ValidationError("generator matrix is singular");
    std::swap(m[pivot], m[c]);
    std::swap(inv[pivot], inv[c]);
    const Quadratic p = m[c][c].inverse();
    for (std::size_t j = 0; j < n; ++j) {
      m[c][j] = m[c][j] * p;
      inv[c][j] = inv[c][j] * p;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || m[i][c].is_zero()) continue;
      const Quadratic f = m[i][c];
      for (std::size_t j = 0; j < n; ++j) {
        m[i][j] = m[i][j] - f * m[c][j];
        inv[i][j] = inv[i][j] - f * inv[c][j];
      }
    }
  }
  return inv;
}

struct CohomologyDims {
  std::size_t z1 = 0;
  std::size_t b1 = 0;
  std::size_t h1 = 0;
};

/// Exact dimensions for a representation given by exact generator matrices.
/// For finite groups every Cayley relation is checked exactly first.
inline CohomologyDims cohomology_dims(const Group& group, const std::vector<Matrix>& gens) {
  const std::size_t k = group.rank();
  if (gens.size() != k) throw ValidationError("exact oracle: wrong number of generator matrices");
  const std::size_t d = k ? gens[0].size() : 0;
  if (k == 0) return {0, 0, 0};

  std::vector<Matrix> inverses;
  for (const auto& g : gens) inverses.push_back(inverse(g));
  auto gen = [&](Letter l) -> const Matrix& { return l > 0 ? gens[generator_index(l)] : inverses[generator_index(l)]; };

  // B^1 = E / E^pi, so dim B^1 = rank of the stacked (M_s - I).
  Matrix stacked;
  for (std::size_t i = 0; i < k; ++i) {
    Matrix diff = gens[i];
    for (std::size_t r = 0; r < d; ++r) diff[r][r] = diff[r][r] - Quadratic(Rational(1));
    for (auto& row : diff) stacked.push_back(std::move(row));
  }
  CohomologyDims out;
  out.b1 = rank(stacked);
  const std::size_t kd = k * d;

  if (group.is_free()) {
    out.z1 = kd;
    out.h1 = out.z1 - out.b1;
    return out;
  }

  // selector Z_l: d x kd.
  auto selector = [&](Letter l) {
    Matrix s(d, std::vector<Quadratic>(kd));
    const std::size_t off = generator_index(l) * d;
    if (l > 0) {
      for (std::size_t r = 0; r < d; ++r) s[r][off + r] = Quadratic(Rational(1));
    } else {
      const Matrix& m = gen(l);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) s[r][off + c] = -m[r][c];
    }
    return s;
  };
  auto add = [](Matrix a, const Matrix& b, bool subtract) {
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a[i].size(); ++j) a[i][j] = subtract ? a[i][j] - b[i][j] : a[i][j] + b[i][j];
    return a;
  };

  const std::size_t n = group.order();
  std::vector<Matrix> pi(n), ext(n);
  pi[0] = identity(d);
  ext[0] = Matrix(d, std::vector<Quadratic>(kd));
  for (std::size_t i = 0; i < n; ++i)
    for (Letter l : group.letters())
      if (group.is_tree_edge(i, l)) {
        const std::size_t t = group.cayley_next(i, l);
        pi[t] = multiply(pi[i], gen(l));
        ext[t] = add(ext[i], multiply(pi[i], selector(l)), false);
      }

  Matrix constraints;
  for (std::size_t i = 0; i < n; ++i)
    for (Letter l : group.letters()) {
      if (group.is_tree_edge(i, l)) continue;
      const std::size_t t = group.cayley_next(i, l);
      if (!(multiply(pi[i], gen(l)) == pi[t]))
        throw ValidationError("exact oracle: generator matrices violate a group relation exactly");
      Matrix block = add(add(ext[i], multiply(pi[i], selector(l)), false), ext[t], true);
      for (auto& row : block) constraints.push_back(std::move(row));
    }
  out.z1 = kd - (constraints.empty() ? 0 : rank(constraints));
  out.h1 = out.z1 - out.b1;
  return out;
}

}  // namespace cohom::exact
