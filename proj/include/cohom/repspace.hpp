#pragma once

// Finite-dimensional l^p spaces, isometric representations given on
// generators, the Markov operator of a measure, and norm estimation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cohom/errors.hpp"
#include "cohom/group.hpp"
#include "cohom/measure.hpp"

namespace cohom {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// R^d with the l^p norm; p = kInfinity for the max norm. The uniformly
/// convex range is 1 < p < infinity.
struct NormedSpace {
  std::size_t dim = 1;
  double p = 2.0;

  NormedSpace() = default;
  NormedSpace(std::size_t d, double p_) : dim(d), p(p_) {
    if (d == 0) throw ValidationError("space dimension must be positive");
    if (!(p >= 1.0)) throw ValidationError("p must be in [1, inf]");
  }

  bool is_inf() const { return std::isinf(p); }
  double norm(const VectorXd& v) const { return lp_norm(v, p); }

  static double lp_norm(const VectorXd& v, double p) {
    if (v.size() == 0) return 0.0;
    if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
    if (p == 1.0) return v.cwiseAbs().sum();
    if (p == 2.0) return v.norm();
    // Scale by the max entry to avoid overflow in |x|^p.
    const double m = v.cwiseAbs().maxCoeff();
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]) / m, p);
    return m * std::pow(s, 1.0 / p);
  }

  /// Hoelder conjugate exponent.
  double dual_exponent() const {
    if (is_inf()) return 1.0;
    if (p == 1.0) return kInfinity;
    return p / (p - 1.0);
  }
};

enum class IsometryFamily { Orthogonal, SignedPermutation, Unchecked };

inline std::string to_string(IsometryFamily f) {
  switch (f) {
    case IsometryFamily::Orthogonal: return "orthogonal";
    case IsometryFamily::SignedPermutation: return "signed_permutation";
    case IsometryFamily::Unchecked: return "unchecked";
  }
  return "unknown";
}

class Representation;
using RepresentationPtr = std::shared_ptr<const Representation>;

/// A representation of a Group on an l^p space, given by one invertible
/// matrix per positive generator.
class Representation {
 public:
  static constexpr double kOrthogonalTol = 1e-10;
  static constexpr double kRelationTol = 1e-9;

  static RepresentationPtr make(GroupPtr group, NormedSpace space, std::vector<MatrixXd> generators,
                                IsometryFamily family) {
    return RepresentationPtr(new Representation(std::move(group), space, std::move(generators), family));
  }

  const GroupPtr& group_ptr() const { return group_; }
  const Group& group() const { return *group_; }
  const NormedSpace& space() const { return space_; }
  std::size_t dim() const { return space_.dim; }
  IsometryFamily family() const { return family_; }

  /// M_s for a positive letter, M_s^{-1} for a negative one.
  const MatrixXd& generator(Letter l) const {
    const auto i = generator_index(l);
    return l > 0 ? gens_.at(i) : inverses_.at(i);
  }

  MatrixXd evaluate(const Word& w) const {
    MatrixXd m = MatrixXd::Identity(dim(), dim());
    for (Letter l : w) m = m * generator(l);
    return m;
  }

  /// pi_g: product of generator matrices along the word of g (the BFS
  /// witness word for finite groups, cached).
  MatrixXd evaluate(const Element& g) const {
    if (group_->is_finite()) return table_.at(g.index());
    return evaluate(group_->word(g));
  }

  /// Largest deviation ||pi_s v||_p - ||v||_p over generators on the given
  /// vectors; zero for a genuine isometry.
  double isometry_defect(const std::vector<VectorXd>& samples) const {
    double worst = 0.0;
    for (Letter l : group_->letters())
      for (const auto& v : samples)
        worst = std::max(worst, std::abs(space_.norm(generator(l) * v) - space_.norm(v)));
    return worst;
  }

 private:
  Representation(GroupPtr group, NormedSpace space, std::vector<MatrixXd> gens, IsometryFamily family)
      : group_(std::move(group)), space_(space), family_(family), gens_(std::move(gens)) {
    const auto d = static_cast<Eigen::Index>(space_.dim);
    if (gens_.size() != group_->rank())
      throw ValidationError("expected " + std::to_string(group_->rank()) + " generator matrices, got " +
                            std::to_string(gens_.size()));
    for (std::size_t i = 0; i < gens_.size(); ++i) {
      const auto& m = gens_[i];
      const std::string name = "generator " + group_->labels()[i];
      if (m.rows() != d || m.cols() != d) throw ValidationError(name + " has the wrong shape");
      if (!m.allFinite()) throw ValidationError(name + " has non-finite entries");
      Eigen::FullPivLU<MatrixXd> lu(m);
      if (!lu.isInvertible()) throw ValidationError(name + " is not invertible");
      switch (family_) {
        case IsometryFamily::Orthogonal:
          if (space_.p != 2.0) throw ValidationError("orthogonal family requires p = 2");
          if ((m.transpose() * m - MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > kOrthogonalTol)
            throw ValidationError(name + " is not orthogonal");
          break;
        case IsometryFamily::SignedPermutation:
          if (!is_signed_permutation(m)) throw ValidationError(name + " is not a signed permutation matrix");
          break;
        case IsometryFamily::Unchecked:
          break;
      }
      inverses_.push_back(family_ == IsometryFamily::SignedPermutation ? MatrixXd(m.transpose()) : MatrixXd(lu.inverse()));
    }
    if (group_->is_finite()) build_table();
  }

  static bool is_signed_permutation(const MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      int row_hits = 0, col_hits = 0;
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (double x : {m(i, j), m(j, i)}) {
          if (x != 0.0 && std::abs(x) != 1.0) return false;
        }
        row_hits += m(i, j) != 0.0;
        col_hits += m(j, i) != 0.0;
      }
      if (row_hits != 1 || col_hits != 1) return false;
    }
    return true;
  }

  // pi_g for every element along the BFS tree; every non-tree Cayley edge is
  // a defining relation and must close up to kRelationTol.
  void build_table() {
    const auto& elems = group_->enumerate();
    table_.assign(elems.size(), MatrixXd());
    table_[0] = MatrixXd::Identity(dim(), dim());
    for (std::size_t i = 0; i < elems.size(); ++i)
      for (Letter l : group_->letters())
        if (group_->is_tree_edge(i, l)) table_[group_->cayley_next(i, l)] = table_[i] * generator(l);
    double worst = 0.0;
    for (std::size_t i = 0; i < elems.size(); ++i)
      for (Letter l : group_->letters()) {
        const MatrixXd diff = table_[i] * generator(l) - table_[group_->cayley_next(i, l)];
        worst = std::max(worst, diff.cwiseAbs().maxCoeff());
      }
    if (worst > kRelationTol)
      throw ValidationError("generator matrices violate a group relation (residual " + std::to_string(worst) + ")");
  }

  GroupPtr group_;
  NormedSpace space_;
  IsometryFamily family_;
  std::vector<MatrixXd> gens_;
  std::vector<MatrixXd> inverses_;
  std::vector<MatrixXd> table_;
};

/// Certified enclosure of an operator norm, with a vector realizing lo.
struct NormBracket {
  double lo = 0.0;
  double hi = 0.0;
  VectorXd witness;
  std::string method;
};

struct PowerIterationOptions {
  std::uint64_t seed = 0;
  std::size_t restarts = 16;
  std::size_t iterations = 200;
  double rel_change = 1e-12;
};

namespace detail {

inline double max_column_sum(const MatrixXd& a) { return a.cols() ? a.cwiseAbs().colwise().sum().maxCoeff() : 0.0; }
inline double max_row_sum(const MatrixXd& a) { return a.rows() ? a.cwiseAbs().rowwise().sum().maxCoeff() : 0.0; }

inline double spectral_norm(const MatrixXd& a, VectorXd* witness = nullptr) {
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullV);
  if (witness) *witness = svd.matrixV().col(0);
  return svd.singularValues()(0);
}

// x -> sign(x)|x|^(p-1) / ||x||_p^(p-1): the norming functional of x in l^q.
inline VectorXd dual_map(const VectorXd& x, double p) {
  const double n = NormedSpace::lp_norm(x, p);
  VectorXd y = VectorXd::Zero(x.size());
  if (n == 0.0) return y;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double r = std::abs(x[i]) / n;
    if (r > 0.0) y[i] = std::copysign(std::pow(r, p - 1.0), x[i]);
  }
  return y;
}

inline VectorXd random_sphere_point(std::mt19937_64& rng, std::size_t d, double p) {
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd v(static_cast<Eigen::Index>(d));
  do {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  } while (NormedSpace::lp_norm(v, p) == 0.0);
  return v / NormedSpace::lp_norm(v, p);
}

}  // namespace detail

/// Lower bound on ||A||_{p->p} by the nonlinear power method over seeded
/// restarts. Returns the best ratio and its start vector in `witness`.
inline double boyd_lower_bound(const MatrixXd& a, double p, const PowerIterationOptions& opt, VectorXd& witness) {
  const auto d = static_cast<std::size_t>(a.cols());
  const double q = p == 1.0 ? kInfinity : (std::isinf(p) ? 1.0 : p / (p - 1.0));
  std::mt19937_64 rng(opt.seed);
  double best = 0.0;
  witness = VectorXd::Unit(static_cast<Eigen::Index>(d), 0);
  auto consider = [&](const VectorXd& x) {
    const double r = NormedSpace::lp_norm(a * x, p) / NormedSpace::lp_norm(x, p);
    if (r > best) {
      best = r;
      witness = x;
    }
    return r;
  };
  for (std::size_t restart = 0; restart < opt.restarts; ++restart) {
    VectorXd x = detail::random_sphere_point(rng, d, p);
    double est = consider(x);
    for (std::size_t it = 0; it < opt.iterations; ++it) {
      const VectorXd y = a * x;
      if (NormedSpace::lp_norm(y, p) == 0.0) break;
      const VectorXd z = a.transpose() * detail::dual_map(y, p);
      if (NormedSpace::lp_norm(z, q) == 0.0) break;
      VectorXd next = detail::dual_map(z, q);
      next /= NormedSpace::lp_norm(next, p);
      const double prev = est;
      x = next;
      est = consider(x);
      if (std::abs(est - prev) <= opt.rel_change * std::max(est, 1e-300)) break;
    }
  }
  return best;
}

/// Operator norm bracket [lo, hi] on l^p. Exact for p in {1, 2, inf}; for
/// other p, lo comes from the power method and hi from Riesz-Thorin
/// interpolation of the exact p = 1, 2, inf norms.
inline NormBracket op_norm(const MatrixXd& a, const NormedSpace& space, const PowerIterationOptions& opt = {}) {
  const auto d = a.cols();
  NormBracket b;
  if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0) {
    b.witness = VectorXd::Unit(d, 0);
    b.method = "zero";
    return b;
  }
  const double p = space.p;
  if (space.is_inf()) {
    Eigen::Index row = 0;
    a.cwiseAbs().rowwise().sum().maxCoeff(&row);
    b.witness = VectorXd(d);
    for (Eigen::Index j = 0; j < d; ++j) b.witness[j] = a(row, j) < 0.0 ? -1.0 : 1.0;
    b.lo = b.hi = detail::max_row_sum(a);
    b.method = "exact_row_sum";
    return b;
  }
  if (p == 1.0) {
    Eigen::Index col = 0;
    a.cwiseAbs().colwise().sum().maxCoeff(&col);
    b.witness = VectorXd::Unit(d, col);
    b.lo = b.hi = detail::max_column_sum(a);
    b.method = "exact_column_sum";
    return b;
  }
  if (p == 2.0) {
    b.lo = b.hi = detail::spectral_norm(a, &b.witness);
    b.method = "exact_singular_value";
    return b;
  }
  const double n1 = detail::max_column_sum(a);
  const double n2 = detail::spectral_norm(a);
  const double ninf = detail::max_row_sum(a);
  // Between 1 and inf: ||A||_p <= ||A||_1^(1/p) ||A||_inf^(1-1/p).
  const double outer = std::pow(n1, 1.0 / p) * std::pow(ninf, 1.0 - 1.0 / p);
  double inner;
  if (p < 2.0) {
    const double theta = 2.0 * (1.0 - 1.0 / p);
    inner = std::pow(n1, 1.0 - theta) * std::pow(n2, theta);
  } else {
    const double theta = 1.0 - 2.0 / p;
    inner = std::pow(n2, 1.0 - theta) * std::pow(ninf, theta);
  }
  b.hi = std::min(inner, outer);
  b.lo = boyd_lower_bound(a, p, opt, b.witness);
  // Both sides can be exact (diagonal matrices); rounding may put lo an ulp above hi.
  if (b.lo > b.hi) b.hi = b.lo;
  b.method = "power_iteration+riesz_thorin";
  return b;
}

/// A = sum_g mu(g) pi_g together with its certified norm bracket.
struct MarkovOp {
  MatrixXd matrix;
  NormBracket bracket;
};

inline MatrixXd markov_matrix(const Representation& rep, const Measure& mu) {
  if (mu.group().get() != rep.group_ptr().get()) throw UsageError("measure and representation on different groups");
  MatrixXd a = MatrixXd::Zero(rep.dim(), rep.dim());
  for (const auto& [g, w] : mu.weights()) a += w * rep.evaluate(g);
  return a;
}

inline MarkovOp markov(const Representation& rep, const Measure& mu, const PowerIterationOptions& opt = {}) {
  MarkovOp op;
  op.matrix = markov_matrix(rep, mu);
  op.bracket = op_norm(op.matrix, rep.space(), opt);
  return op;
}

struct KappaEstimate {
  double value = 0.0;
  VectorXd witness;
};

/// Upper estimate of the constant kappa in sup_s ||pi_s v - v|| >= kappa ||v||:
/// minimize max_s ||pi_s v - v||_p over unit vectors by projected
/// subgradient descent from seeded starts (plus the least-squares
/// almost-invariant direction).
inline KappaEstimate kappa_estimate(const Representation& rep, std::uint64_t seed, std::size_t restarts = 64,
                                    std::size_t steps = 400) {
  const auto& space = rep.space();
  const double p = space.p;
  const auto d = static_cast<Eigen::Index>(rep.dim());
  std::vector<MatrixXd> moves;
  for (Letter l : rep.group().letters()) moves.push_back(rep.generator(l) - MatrixXd::Identity(d, d));

  auto objective = [&](const VectorXd& v, std::size_t* arg) {
    double worst = 0.0;
    for (std::size_t i = 0; i < moves.size(); ++i) {
      const double n = NormedSpace::lp_norm(moves[i] * v, p);
      if (n >= worst) {
        worst = n;
        if (arg) *arg = i;
      }
    }
    return worst;
  };

  KappaEstimate best;
  best.value = kInfinity;
  auto descend = [&](VectorXd v) {
    v /= NormedSpace::lp_norm(v, p);
    double step = 0.5;
    for (std::size_t it = 0; it <= steps; ++it) {
      std::size_t arg = 0;
      const double f = objective(v, &arg);
      if (f < best.value) {
        best.value = f;
        best.witness = v;
      }
      if (moves.empty() || f == 0.0 || it == steps) break;
      const VectorXd r = moves[arg] * v;
      const VectorXd grad = moves[arg].transpose() * detail::dual_map(r, std::isinf(p) ? 2.0 : p);
      if (grad.norm() == 0.0) break;
      VectorXd next = v - step * grad / grad.norm();
      const double n = NormedSpace::lp_norm(next, p);
      if (n == 0.0) break;
      v = next / n;
      step *= 0.98;
    }
  };

  if (!moves.empty()) {
    MatrixXd stacked(static_cast<Eigen::Index>(moves.size()) * d, d);
    for (std::size_t i = 0; i < moves.size(); ++i) stacked.middleRows(static_cast<Eigen::Index>(i) * d, d) = moves[i];
    Eigen::JacobiSVD<MatrixXd> svd(stacked, Eigen::ComputeFullV);
    descend(svd.matrixV().col(d - 1));
  } else {
    best.value = 0.0;
    best.witness = VectorXd::Unit(d, 0);
    return best;
  }
  std::mt19937_64 rng(seed);
  for (std::size_t r = 0; r < restarts; ++r) descend(detail::random_sphere_point(rng, rep.dim(), p));
  return best;
}

}  // namespace cohom
