#pragma once

// The cocycle space Z^1(G, pi): cocycles stored by their values on the
// positive generators, extended to the whole group by z_{gh} = z_g + pi_g z_h.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cohom/errors.hpp"
#include "cohom/group.hpp"
#include "cohom/measure.hpp"
#include "cohom/repspace.hpp"

namespace cohom {

class Cocycle {
 public:
  Cocycle(RepresentationPtr rep, MatrixXd values) : rep_(std::move(rep)), values_(std::move(values)) {
    if (values_.rows() != static_cast<Eigen::Index>(rep_->dim()) ||
        values_.cols() != static_cast<Eigen::Index>(rep_->group().rank()))
      throw ValidationError("cocycle values must be a d x k table");
  }

  static Cocycle zero(RepresentationPtr rep) {
    const auto d = static_cast<Eigen::Index>(rep->dim());
    const auto k = static_cast<Eigen::Index>(rep->group().rank());
    return Cocycle(std::move(rep), MatrixXd::Zero(d, k));
  }

  /// Parameter vector [z_{s_1}; ...; z_{s_k}] of length k*d.
  static Cocycle from_parameters(RepresentationPtr rep, const VectorXd& params) {
    const auto d = static_cast<Eigen::Index>(rep->dim());
    const auto k = static_cast<Eigen::Index>(rep->group().rank());
    if (params.size() != d * k) throw ValidationError("cocycle parameter vector has wrong length");
    return Cocycle(std::move(rep), Eigen::Map<const MatrixXd>(params.data(), d, k));
  }

  VectorXd parameters() const { return Eigen::Map<const VectorXd>(values_.data(), values_.size()); }

  const RepresentationPtr& representation() const { return rep_; }
  const MatrixXd& values() const { return values_; }

  /// z_s for a positive letter; z_{s^{-1}} = -pi_{s^{-1}} z_s for a negative one.
  VectorXd value(Letter l) const {
    const auto i = static_cast<Eigen::Index>(generator_index(l));
    if (l > 0) return values_.col(i);
    return -(rep_->generator(l) * values_.col(i));
  }

  /// z_{l_1...l_m} = sum_j pi_{l_1...l_{j-1}} z_{l_j}.
  VectorXd extend(const Word& w) const {
    VectorXd acc = VectorXd::Zero(values_.rows());
    MatrixXd prefix = MatrixXd::Identity(values_.rows(), values_.rows());
    for (Letter l : w) {
      acc += prefix * value(l);
      prefix = prefix * rep_->generator(l);
    }
    return acc;
  }

  /// Uses the reduced word (free) or the BFS witness word (finite).
  VectorXd extend(const Element& g) const { return extend(rep_->group().word(g)); }

  Cocycle operator+(const Cocycle& o) const {
    check_same(o);
    return Cocycle(rep_, values_ + o.values_);
  }
  Cocycle operator-(const Cocycle& o) const {
    check_same(o);
    return Cocycle(rep_, values_ - o.values_);
  }
  Cocycle operator*(double c) const { return Cocycle(rep_, c * values_); }
  friend Cocycle operator*(double c, const Cocycle& z) { return z * c; }

 private:
  void check_same(const Cocycle& o) const {
    if (rep_.get() != o.rep_.get()) throw UsageError("cocycles for different representations");
  }

  RepresentationPtr rep_;
  MatrixXd values_;
};

namespace detail {

// d x kd matrix sending parameters to z_l.
inline MatrixXd letter_selector(const Representation& rep, Letter l) {
  const auto d = static_cast<Eigen::Index>(rep.dim());
  const auto k = static_cast<Eigen::Index>(rep.group().rank());
  MatrixXd sel = MatrixXd::Zero(d, d * k);
  const auto i = static_cast<Eigen::Index>(generator_index(l));
  if (l > 0)
    sel.middleCols(i * d, d) = MatrixXd::Identity(d, d);
  else
    sel.middleCols(i * d, d) = -rep.generator(l);
  return sel;
}

}  // namespace detail

/// Linear constraints on the parameters that cut Z^1 out of R^{kd}. For a
/// finite group, one block per non-tree Cayley edge (g, l):
///   E_g + pi_g Z_l - E_{gl} = 0,
/// where E_g maps parameters to the extension along the BFS word of g. Free
/// groups have no constraints (empty matrix).
inline MatrixXd relation_constraints(const Representation& rep) {
  const auto& group = rep.group();
  const auto d = static_cast<Eigen::Index>(rep.dim());
  const auto kd = d * static_cast<Eigen::Index>(group.rank());
  if (group.is_free()) return MatrixXd(0, kd);

  const auto& elems = group.enumerate();
  std::vector<MatrixXd> ext(elems.size());
  ext[0] = MatrixXd::Zero(d, kd);
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (Letter l : group.letters())
      if (group.is_tree_edge(i, l))
        ext[group.cayley_next(i, l)] = ext[i] + rep.evaluate(elems[i]) * detail::letter_selector(rep, l);

  std::vector<MatrixXd> blocks;
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (Letter l : group.letters()) {
      if (group.is_tree_edge(i, l)) continue;
      blocks.push_back(ext[i] + rep.evaluate(elems[i]) * detail::letter_selector(rep, l) -
                       ext[group.cayley_next(i, l)]);
    }
  MatrixXd c(static_cast<Eigen::Index>(blocks.size()) * d, kd);
  for (std::size_t b = 0; b < blocks.size(); ++b) c.middleRows(static_cast<Eigen::Index>(b) * d, d) = blocks[b];
  return c;
}

/// Largest violation of the relation constraints (0 for free groups).
inline double relation_residual(const Cocycle& z, const MatrixXd& constraints) {
  if (constraints.rows() == 0) return 0.0;
  return (constraints * z.parameters()).cwiseAbs().maxCoeff();
}

inline double relation_residual(const Cocycle& z) {
  return relation_residual(z, relation_constraints(*z.representation()));
}

/// Orthonormal columns spanning Z^1 inside the parameter space R^{kd}.
class Z1Basis {
 public:
  static constexpr double kCoordinateTol = 1e-8;

  Z1Basis(RepresentationPtr rep, MatrixXd basis, MatrixXd constraints)
      : rep_(std::move(rep)), basis_(std::move(basis)), constraints_(std::move(constraints)) {}

  const RepresentationPtr& representation() const { return rep_; }
  std::size_t dim() const { return static_cast<std::size_t>(basis_.cols()); }
  std::size_t ambient_dim() const { return static_cast<std::size_t>(basis_.rows()); }
  const MatrixXd& matrix() const { return basis_; }
  const MatrixXd& constraints() const { return constraints_; }

  Cocycle element(std::size_t j) const { return Cocycle::from_parameters(rep_, basis_.col(static_cast<Eigen::Index>(j))); }
  Cocycle cocycle(const VectorXd& coords) const { return Cocycle::from_parameters(rep_, basis_ * coords); }

  /// Least-squares coordinates; `residual` receives ||B c - params||_inf.
  VectorXd coordinates(const Cocycle& z, double* residual = nullptr) const {
    const VectorXd params = z.parameters();
    const VectorXd c = basis_.transpose() * params;
    if (residual) *residual = basis_.cols() == 0 ? params.cwiseAbs().maxCoeff()
                                                 : (basis_ * c - params).cwiseAbs().maxCoeff();
    return c;
  }

  /// Standard normal coefficients in basis coordinates.
  Cocycle random(std::mt19937_64& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    VectorXd c(basis_.cols());
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = normal(rng);
    return cocycle(c);
  }

 private:
  RepresentationPtr rep_;
  MatrixXd basis_;
  MatrixXd constraints_;
};

/// Right singular vectors of `m` whose singular values fall below
/// rel_tol * sigma_max (all of them when m == 0).
inline MatrixXd nullspace(const MatrixXd& m, double rel_tol = 1e-9) {
  const auto n = m.cols();
  if (m.rows() == 0 || n == 0) return MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = rel_tol * (sv.size() ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  if (sv.size() && sv(0) > 0.0)
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

inline std::size_t numerical_rank(const MatrixXd& m, double rel_tol = 1e-9) {
  return static_cast<std::size_t>(m.cols() - nullspace(m, rel_tol).cols());
}

/// Basis of Z^1: the whole parameter space for a free group, the nullspace of
/// the relation constraints for a finite group.
inline Z1Basis z1_basis(const RepresentationPtr& rep, double rank_tol = 1e-9) {
  MatrixXd constraints = relation_constraints(*rep);
  MatrixXd basis = nullspace(constraints, rank_tol);
  return Z1Basis(rep, std::move(basis), std::move(constraints));
}

/// d_pi v: z_s = v - pi_s v.
inline Cocycle d_pi(const RepresentationPtr& rep, const VectorXd& v) {
  const auto& group = rep->group();
  MatrixXd values(v.size(), static_cast<Eigen::Index>(group.rank()));
  for (std::size_t i = 0; i < group.rank(); ++i)
    values.col(static_cast<Eigen::Index>(i)) = v - rep->generator(positive_letter(i)) * v;
  return Cocycle(rep, std::move(values));
}

/// ||z||_S = max over all of S of ||z_s||_p.
inline double s_norm(const Cocycle& z) {
  const auto& rep = *z.representation();
  double m = 0.0;
  for (Letter l : rep.group().letters()) m = std::max(m, rep.space().norm(z.value(l)));
  return m;
}

/// z^mu = sum_g mu(g) z_g.
inline VectorXd z_mu(const Cocycle& z, const Measure& mu) {
  if (mu.group().get() != z.representation()->group_ptr().get())
    throw UsageError("measure and cocycle on different groups");
  VectorXd acc = VectorXd::Zero(static_cast<Eigen::Index>(z.representation()->dim()));
  for (const auto& [g, w] : mu.weights()) acc += w * z.extend(g);
  return acc;
}

/// The shifted table (gamma.z)_g = z_{gamma g}. It is a cocycle for the
/// affine action only, so it carries its base point z_gamma = (gamma.z)_e.
class ShiftedCocycle {
 public:
  ShiftedCocycle(Cocycle z, Element gamma) : z_(std::move(z)), gamma_(std::move(gamma)) {
    base_ = z_.extend(gamma_);
    const auto& group = z_.representation()->group();
    values_.resize(z_.values().rows(), z_.values().cols());
    for (std::size_t i = 0; i < group.rank(); ++i)
      values_.col(static_cast<Eigen::Index>(i)) = at(group.generator(positive_letter(i)));
  }

  const Cocycle& source() const { return z_; }
  const Element& gamma() const { return gamma_; }
  /// z_gamma.
  const VectorXd& base_point() const { return base_; }
  /// (gamma.z)_s for the positive generators.
  const MatrixXd& values() const { return values_; }

  /// (gamma.z)_g = z_{gamma g}, evaluated along the normal form of gamma g.
  VectorXd at(const Element& g) const {
    const auto& group = z_.representation()->group();
    return z_.extend(group.multiply(gamma_, g));
  }

 private:
  Cocycle z_;
  Element gamma_;
  VectorXd base_;
  MatrixXd values_;
};

inline ShiftedCocycle gamma_act(const Element& gamma, const Cocycle& z) { return ShiftedCocycle(z, gamma); }

/// (gamma.z)^mu = sum_g mu(g) z_{gamma g}.
inline VectorXd z_mu(const ShiftedCocycle& z, const Measure& mu) {
  VectorXd acc = VectorXd::Zero(z.base_point().size());
  for (const auto& [g, w] : mu.weights()) acc += w * z.at(g);
  return acc;
}

}  // namespace cohom
