#pragma once

// Splitting Z^1 = B^1 + V through the fixed point b(z) of the affine
// contraction L_z v = A v + z^mu, with P z = d_pi b(z) the projection onto
// the coboundaries and V = ker P the mu-harmonic cocycles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cohom/cocycle.hpp"
#include "cohom/errors.hpp"
#include "cohom/measure.hpp"
#include "cohom/repspace.hpp"

namespace cohom {

struct SolverOptions {
  double tol = 1e-10;
  std::size_t max_iter = 100000;
  double rank_tol = 1e-9;
  double idempotence_tol = 1e-8;
};

enum class Certificate { Certified, Empirical };

inline std::string to_string(Certificate c) { return c == Certificate::Certified ? "certified" : "empirical"; }

struct FixedPointResult {
  VectorXd b;
  std::size_t iterations = 0;
  double final_step = 0.0;
  Certificate certificate = Certificate::Certified;
  /// lambda_hi when certified, else the observed contraction rate.
  double rate = 0.0;
  /// ||b_iter - (I - T)^{-1} c||_p against the direct solve.
  double oracle_residual = 0.0;
};

/// Iterates v <- T v + c from `start` until the a posteriori bound
/// rate/(1-rate) * ||v_{n+1} - v_n|| guarantees ||v_n - b|| <= tol * min(1, ||v_n||). The rate
/// is `bracket.hi` when it is below 1; otherwise it is estimated from
/// successive step ratios and the result is marked empirical.
inline FixedPointResult iterate_affine(const MatrixXd& t, const VectorXd& c, const VectorXd& start,
                                       const NormBracket& bracket, const NormedSpace& space,
                                       const SolverOptions& opt = {}) {
  const auto d = t.rows();
  FixedPointResult r;
  r.certificate = bracket.hi < 1.0 ? Certificate::Certified : Certificate::Empirical;

  Eigen::FullPivLU<MatrixXd> lu(MatrixXd::Identity(d, d) - t);
  if (!lu.isInvertible()) {
    throw HypothesisViolated("I - A is singular and ||A|| is bracketed in [" + std::to_string(bracket.lo) + ", " +
                             std::to_string(bracket.hi) + "]");
  }
  const VectorXd direct = lu.solve(c);

  VectorXd v = start;
  std::vector<double> steps;
  double rate = r.certificate == Certificate::Certified ? bracket.hi : 1.0;
  for (std::size_t n = 1; n <= opt.max_iter; ++n) {
    VectorXd next = t * v + c;
    const double step = space.norm(next - v);
    v = std::move(next);
    r.iterations = n;
    r.final_step = step;
    // Absolute tolerance for ||b|| >= 1, relative below.
    const double target = opt.tol * std::min(1.0, space.norm(v));
    if (r.certificate == Certificate::Empirical) {
      steps.push_back(step);
      // Worst ratio over the last few steps guards against transient dips.
      if (steps.size() >= 2) {
        double worst = 0.0;
        for (std::size_t k = steps.size() - 1; k >= 1 && steps.size() - k <= 5; --k)
          worst = std::max(worst, steps[k - 1] > 0.0 ? steps[k] / steps[k - 1] : 0.0);
        rate = worst;
      }
      if (step == 0.0) {
        rate = 0.0;
        break;
      }
      if (steps.size() >= 3 && rate < 1.0 && step <= target * (1.0 - rate) / rate) break;
    } else if (rate == 0.0 || step == 0.0 || step <= target * (1.0 - rate) / rate) {
      break;
    }
    if (n == opt.max_iter)
      throw ConvergenceError("fixed-point iteration did not converge in " + std::to_string(opt.max_iter) +
                                 " iterations (observed rate " + std::to_string(rate) + ")",
                             rate);
  }
  r.b = std::move(v);
  r.rate = rate;
  r.oracle_residual = space.norm(r.b - direct);
  return r;
}

/// L_z v = A v + z^mu.
inline VectorXd L_apply(const MatrixXd& a, const VectorXd& zmu, const VectorXd& v) { return a * v + zmu; }

/// Binds a representation, a measure and its Markov operator; all the
/// fixed-point machinery for one setting.
class Decomposer {
 public:
  Decomposer(RepresentationPtr rep, Measure mu, MarkovOp op, SolverOptions opt = {})
      : rep_(std::move(rep)), mu_(std::move(mu)), op_(std::move(op)), opt_(opt) {
    if (mu_.group().get() != rep_->group_ptr().get()) throw UsageError("measure and representation on different groups");
  }

  Decomposer(RepresentationPtr rep, Measure mu, SolverOptions opt = {}, const PowerIterationOptions& norm_opt = {})
      : Decomposer(rep, mu, markov(*rep, mu, norm_opt), opt) {}

  const RepresentationPtr& representation() const { return rep_; }
  const Measure& measure() const { return mu_; }
  const MarkovOp& markov_op() const { return op_; }
  const MatrixXd& A() const { return op_.matrix; }
  const NormBracket& bracket() const { return op_.bracket; }
  const SolverOptions& options() const { return opt_; }
  bool certified() const { return op_.bracket.hi < 1.0; }

  VectorXd apply_L(const Cocycle& z, const VectorXd& v) const { return L_apply(A(), z_mu(z, mu_), v); }

  /// b(z) = lim L_z^n 0, the unique fixed point of L_z.
  FixedPointResult fixed_point(const Cocycle& z) const {
    const VectorXd zmu = z_mu(z, mu_);
    return iterate_affine(A(), zmu, VectorXd::Zero(zmu.size()), bracket(), rep_->space(), opt_);
  }

  /// b(gamma.z) = lim (gamma.z)^{mu^n}. On the shifted table the averages
  /// obey (gamma.z)^{mu*nu} = (gamma.z)^mu + A_gamma((gamma.z)^nu - z_gamma)
  /// with A_gamma = pi_gamma A pi_gamma^{-1}, so they are the orbit of
  /// v -> A_gamma (v - z_gamma) + (gamma.z)^mu started at (gamma.z)_e = z_gamma.
  FixedPointResult fixed_point(const ShiftedCocycle& z) const {
    const MatrixXd pg = rep_->evaluate(z.gamma());
    const MatrixXd a_gamma = pg * A() * pg.inverse();
    const VectorXd offset = z_mu(z, mu_) - a_gamma * z.base_point();
    return iterate_affine(a_gamma, offset, z.base_point(), bracket(), rep_->space(), opt_);
  }

  /// P z = d_pi b(z).
  Cocycle project(const Cocycle& z) const { return d_pi(rep_, fixed_point(z).b); }

  /// Matrix of P in the coordinates of `basis`.
  MatrixXd p_matrix(const Z1Basis& basis) const {
    const auto m = static_cast<Eigen::Index>(basis.dim());
    MatrixXd p(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      double residual = 0.0;
      p.col(j) = basis.coordinates(project(basis.element(static_cast<std::size_t>(j))), &residual);
      if (residual > Z1Basis::kCoordinateTol)
        throw ValidationError("P maps a basis cocycle outside the span of the Z1 basis (residual " +
                              std::to_string(residual) + ")");
    }
    return p;
  }

 private:
  RepresentationPtr rep_;
  Measure mu_;
  MarkovOp op_;
  SolverOptions opt_;
};

inline FixedPointResult fixed_point_b(const Decomposer& dec, const Cocycle& z) { return dec.fixed_point(z); }
inline Cocycle project_P(const Decomposer& dec, const Cocycle& z) { return dec.project(z); }
inline MatrixXd p_matrix(const Decomposer& dec, const Z1Basis& basis) { return dec.p_matrix(basis); }

/// ker P mapped back to cocycles: the mu-harmonic complement of B^1.
inline std::vector<Cocycle> complement_basis(const MatrixXd& p, const Z1Basis& basis, double rank_tol = 1e-9) {
  std::vector<Cocycle> out;
  if (p.cols() == 0) return out;
  const MatrixXd ker = nullspace(p, rank_tol);
  for (Eigen::Index j = 0; j < ker.cols(); ++j) out.push_back(basis.cocycle(ker.col(j)));
  return out;
}

/// range P mapped back to cocycles: a basis of B^1.
inline std::vector<Cocycle> coboundary_basis(const MatrixXd& p, const Z1Basis& basis, double rank_tol = 1e-9) {
  std::vector<Cocycle> out;
  if (p.cols() == 0) return out;
  Eigen::JacobiSVD<MatrixXd> svd(p, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  for (Eigen::Index j = 0; j < sv.size(); ++j)
    if (sv(0) > 0.0 && sv(j) > rank_tol * sv(0)) out.push_back(basis.cocycle(svd.matrixU().col(j)));
  return out;
}

/// dim E^pi: vectors fixed by every generator.
inline std::size_t invariant_dim(const Representation& rep, double rank_tol = 1e-9) {
  const auto d = static_cast<Eigen::Index>(rep.dim());
  const auto k = static_cast<Eigen::Index>(rep.group().rank());
  if (k == 0) return rep.dim();
  MatrixXd stacked(k * d, d);
  for (Eigen::Index i = 0; i < k; ++i)
    stacked.middleRows(i * d, d) = rep.generator(positive_letter(static_cast<std::size_t>(i))) - MatrixXd::Identity(d, d);
  if (stacked.cwiseAbs().maxCoeff() == 0.0) return rep.dim();
  return static_cast<std::size_t>(nullspace(stacked, rank_tol).cols());
}

struct GeneratorDefect {
  Letter generator = 0;
  /// ||b(gamma.z) - b(z)||_p
  double defect = 0.0;
  /// ||pi_gamma b(z) + z_gamma - b(gamma.z)||_p
  double identity_residual = 0.0;
};

struct EquivarianceDefects {
  std::vector<GeneratorDefect> per_generator;
  double max_defect = 0.0;
  double max_identity_residual = 0.0;
};

/// Defects b(gamma.z) - b(z) over gamma in S. They vanish for all gamma in S
/// iff they vanish on all of G (the cocycle identity propagates along words),
/// iff z is a coboundary.
inline EquivarianceDefects equivariance_defect(const Decomposer& dec, const Cocycle& z) {
  const auto& rep = *dec.representation();
  const auto& space = rep.space();
  const VectorXd b = dec.fixed_point(z).b;
  EquivarianceDefects out;
  for (Letter l : rep.group().letters()) {
    const Element gamma = rep.group().generator(l);
    const ShiftedCocycle shifted = gamma_act(gamma, z);
    const VectorXd b_shift = dec.fixed_point(shifted).b;
    GeneratorDefect g;
    g.generator = l;
    g.defect = space.norm(b_shift - b);
    g.identity_residual = space.norm(rep.evaluate(gamma) * b + shifted.base_point() - b_shift);
    out.max_defect = std::max(out.max_defect, g.defect);
    out.max_identity_residual = std::max(out.max_identity_residual, g.identity_residual);
    out.per_generator.push_back(g);
  }
  return out;
}

struct PNormEstimate {
  /// Lower bound on ||P|| in the ||.||_S operator norm.
  double estimate = 0.0;
  Cocycle witness;
  /// 2 / (1 - lambda_hi), or +inf when lambda_hi >= 1.
  double theoretical_bound = kInfinity;
  bool bound_respected = true;
  bool exceeds_one = false;
  std::vector<double> sample_ratios;
};

/// Samples standard-normal cocycles in Z1 coordinates, then hill-climbs
/// from the best one. P is applied through its matrix `p`.
inline PNormEstimate p_norm_estimate(const Decomposer& dec, const Z1Basis& basis, const MatrixXd& p,
                                     std::uint64_t seed, std::size_t samples = 256, std::size_t refine_steps = 400) {
  PNormEstimate out{0.0, Cocycle::zero(basis.representation()), kInfinity, true, false, {}};
  const double lam = dec.bracket().hi;
  if (lam < 1.0) out.theoretical_bound = 2.0 / (1.0 - lam);
  const auto m = static_cast<Eigen::Index>(basis.dim());
  if (m == 0) return out;

  auto ratio = [&](const VectorXd& c) {
    const double den = s_norm(basis.cocycle(c));
    return den == 0.0 ? 0.0 : s_norm(basis.cocycle(p * c)) / den;
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&] {
    VectorXd c(m);
    for (Eigen::Index i = 0; i < m; ++i) c[i] = normal(rng);
    return c;
  };

  VectorXd best = VectorXd::Zero(m);
  double best_ratio = -1.0;
  auto consider = [&](const VectorXd& c, bool record) {
    const double r = ratio(c);
    if (record) out.sample_ratios.push_back(r);
    if (r > best_ratio) {
      best_ratio = r;
      best = c;
    }
  };
  for (std::size_t s = 0; s < samples; ++s) consider(draw(), true);

  // A coboundary sample: ratio 1 whenever P != 0.
  VectorXd v(static_cast<Eigen::Index>(dec.representation()->dim()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  consider(basis.coordinates(d_pi(dec.representation(), v)), false);

  double sigma = 0.5 * std::max(best.norm(), 1e-12);
  std::size_t failures = 0;
  for (std::size_t step = 0; step < refine_steps; ++step) {
    const VectorXd c = best + sigma * draw() / std::sqrt(static_cast<double>(m));
    const double r = ratio(c);
    if (r > best_ratio) {
      best_ratio = r;
      best = c;
      failures = 0;
    } else if (++failures >= 20) {
      sigma *= 0.5;
      failures = 0;
    }
  }
  out.estimate = std::max(best_ratio, 0.0);
  out.witness = basis.cocycle(best / std::max(s_norm(basis.cocycle(best)), 1e-300));
  out.bound_respected = out.estimate <= out.theoretical_bound + 1e-8;
  out.exceeds_one = out.estimate > 1.0 + 1e-9;
  return out;
}

struct DecompositionReport {
  std::size_t dim_z1 = 0;
  std::size_t dim_b1 = 0;
  std::size_t dim_h1 = 0;
  /// d - dim E^pi, computed independently of P.
  std::size_t dim_b1_from_invariants = 0;
  MatrixXd p_matrix;
  double idempotence_residual = 0.0;
  std::vector<Cocycle> coboundary_basis;
  std::vector<Cocycle> complement_basis;
  /// Rank of [coboundary basis | complement basis] in Z1 coordinates.
  std::size_t stacked_rank = 0;
  /// max ||z^mu||_p over the complement basis.
  double complement_zmu_max = 0.0;
  NormBracket lambda;
  Certificate certificate = Certificate::Certified;
};

/// Computes P on Z1, its range and kernel, and the consistency checks that
/// make them a direct sum.
inline DecompositionReport decompose(const Decomposer& dec, const Z1Basis& basis) {
  const auto& opt = dec.options();
  DecompositionReport r;
  r.lambda = dec.bracket();
  r.certificate = dec.certified() ? Certificate::Certified : Certificate::Empirical;
  r.dim_z1 = basis.dim();
  r.p_matrix = dec.p_matrix(basis);
  if (r.dim_z1 > 0) {
    r.idempotence_residual = (r.p_matrix * r.p_matrix - r.p_matrix).cwiseAbs().maxCoeff();
    if (r.idempotence_residual > opt.idempotence_tol)
      throw ValidationError("P is not idempotent (residual " + std::to_string(r.idempotence_residual) + ")");
  }
  r.coboundary_basis = coboundary_basis(r.p_matrix, basis, opt.rank_tol);
  r.complement_basis = complement_basis(r.p_matrix, basis, opt.rank_tol);
  r.dim_b1 = r.coboundary_basis.size();
  r.dim_h1 = r.complement_basis.size();
  r.dim_b1_from_invariants = dec.representation()->dim() - invariant_dim(*dec.representation(), opt.rank_tol);
  for (const auto& z : r.complement_basis)
    r.complement_zmu_max = std::max(r.complement_zmu_max, dec.representation()->space().norm(z_mu(z, dec.measure())));

  if (r.dim_z1 > 0) {
    MatrixXd stacked(static_cast<Eigen::Index>(r.dim_z1), static_cast<Eigen::Index>(r.dim_b1 + r.dim_h1));
    Eigen::Index col = 0;
    for (const auto* part : {&r.coboundary_basis, &r.complement_basis})
      for (const auto& z : *part) stacked.col(col++) = basis.coordinates(z);
    r.stacked_rank = stacked.cols() == 0 ? 0 : numerical_rank(stacked, opt.rank_tol);
  }
  return r;
}

}  // namespace cohom
