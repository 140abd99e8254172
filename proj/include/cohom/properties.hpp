#pragma once

// Randomized property suite over one setting: the group law, the measure
// algebra, the representation, the cocycle identities and the projection.
// Every property records its worst residual against a fixed threshold.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cohom/cocycle.hpp"
#include "cohom/decomp.hpp"
#include "cohom/exact.hpp"
#include "cohom/group.hpp"
#include "cohom/measure.hpp"
#include "cohom/repspace.hpp"

namespace cohom {

struct PropertyResult {
  std::string name;
  bool passed = true;
  double max_residual = 0.0;
  double threshold = 0.0;
  std::size_t trials = 0;
  std::string note;
};

struct PropertyContext {
  RepresentationPtr rep;
  Measure mu;
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  SolverOptions solver;
  PowerIterationOptions norm;
  std::optional<std::vector<exact::Matrix>> exact_generators;
};

namespace detail {

inline double rel_diff(const VectorXd& a, const VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / (1.0 + a.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff());
}
inline double rel_diff(const MatrixXd& a, const MatrixXd& b) {
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff() / (1.0 + a.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff());
}

inline VectorXd random_vector(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  return v;
}

inline Element random_element(std::mt19937_64& rng, const Group& g, std::size_t max_len = 6) {
  if (g.is_finite()) {
    std::uniform_int_distribution<std::size_t> pick(0, g.order() - 1);
    return g.enumerate()[pick(rng)];
  }
  const auto s = g.letters();
  std::uniform_int_distribution<std::size_t> len(0, max_len), letter(0, s.size() - 1);
  Word w;
  for (std::size_t i = len(rng); i > 0; --i) w.push_back(s[letter(rng)]);
  return g.from_word(w);
}

inline Measure random_measure(std::mt19937_64& rng, const GroupPtr& g, std::size_t support = 3) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  WeightMap<double> w;
  for (std::size_t i = 0; i < support; ++i) w[random_element(rng, *g, 3)] += u(rng);
  double total = 0.0;
  for (auto& [x, v] : w) total += v;
  for (auto& [x, v] : w) v /= total;
  return Measure(g, std::move(w));
}

class Recorder {
 public:
  Recorder(std::string name, double threshold) { r_.name = std::move(name), r_.threshold = threshold; }
  void observe(double residual) {
    ++r_.trials;
    if (!(residual <= r_.max_residual)) r_.max_residual = residual;  // NaN sticks
  }
  void note(std::string n) { r_.note = std::move(n); }
  PropertyResult done() {
    r_.passed = r_.max_residual <= r_.threshold;
    return r_;
  }

 private:
  PropertyResult r_;
};

}  // namespace detail

inline std::vector<PropertyResult> group_properties(const Group& g, std::uint64_t seed, std::size_t trials) {
  using namespace detail;
  std::mt19937_64 rng(seed);
  std::vector<PropertyResult> out;
  Recorder assoc("group.associativity", 0.0), inv("group.inverse_involution", 0.0),
      unit("group.identity_law", 0.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const Element a = random_element(rng, g), b = random_element(rng, g), c = random_element(rng, g);
    assoc.observe(g.multiply(g.multiply(a, b), c) == g.multiply(a, g.multiply(b, c)) ? 0.0 : 1.0);
    inv.observe(g.inverse(g.inverse(a)) == a && g.multiply(a, g.inverse(a)) == g.identity() ? 0.0 : 1.0);
    unit.observe(g.multiply(a, g.identity()) == a && g.multiply(g.identity(), a) == a ? 0.0 : 1.0);
  }
  out.push_back(assoc.done());
  out.push_back(inv.done());
  out.push_back(unit.done());
  if (g.is_free()) {
    Recorder reduced("group.free_words_reduced", 0.0);
    for (std::size_t t = 0; t < trials; ++t) {
      const auto w = g.multiply(random_element(rng, g), random_element(rng, g)).data();
      bool ok = true;
      for (std::size_t i = 1; i < w.size(); ++i) ok = ok && w[i] != -w[i - 1];
      reduced.observe(ok ? 0.0 : 1.0);
    }
    out.push_back(reduced.done());
  } else {
    Recorder words("group.bfs_words_evaluate", 0.0);
    for (const auto& e : g.enumerate()) {
      Element acc = g.identity();
      for (Letter l : g.word(e)) acc = g.multiply(acc, g.generator(l));
      words.observe(acc == e ? 0.0 : 1.0);
    }
    out.push_back(words.done());
  }
  return out;
}

inline std::vector<PropertyResult> measure_properties(const GroupPtr& g, const Measure& mu, std::uint64_t seed,
                                                      std::size_t trials) {
  using namespace detail;
  std::mt19937_64 rng(seed + 1);
  std::vector<PropertyResult> out;
  Recorder assoc("measure.convolution_associative", 1e-12);
  for (std::size_t t = 0; t < std::min<std::size_t>(trials, 50); ++t) {
    const Measure a = random_measure(rng, g), b = random_measure(rng, g), c = random_measure(rng, g);
    const Measure l = convolve(convolve(a, b), c), r = convolve(a, convolve(b, c));
    double worst = 0.0;
    for (const auto& [x, w] : l.weights()) worst = std::max(worst, std::abs(w - r(x)));
    for (const auto& [x, w] : r.weights()) worst = std::max(worst, std::abs(w - l(x)));
    assoc.observe(worst);
  }
  out.push_back(assoc.done());

  Recorder sym("measure.symmetric_square", 0.0);
  const Measure lazy = lazy_uniform(g);
  sym.observe(lazy.is_symmetric() && convolve(lazy, lazy).is_symmetric() ? 0.0 : 1.0);
  if (mu.is_symmetric()) sym.observe(convolve(mu, mu).is_symmetric() ? 0.0 : 1.0);
  out.push_back(sym.done());

  Recorder mass("measure.power_mass", 1e-12);
  Measure p = mu;
  for (std::size_t n = 1; n <= 6; ++n) {
    if (n > 1) {
      if (p.support_size() * mu.support_size() > 400000) {
        mass.note("stopped at n = " + std::to_string(n - 1) + " (support too large)");
        break;
      }
      p = convolve(p, mu);
    }
    mass.observe(std::abs(p.total_mass() - 1.0));
  }
  out.push_back(mass.done());

  Recorder adm("measure.lazy_uniform_admissible", 0.0);
  adm.observe(check_admissible(lazy_uniform_pair<double>(*g), *g).admissible ? 0.0 : 1.0);
  out.push_back(adm.done());
  return out;
}

inline std::vector<PropertyResult> repspace_properties(const PropertyContext& ctx) {
  using namespace detail;
  const auto& rep = *ctx.rep;
  std::mt19937_64 rng(ctx.seed + 2);
  std::vector<PropertyResult> out;
  const bool isometric = rep.family() != IsometryFamily::Unchecked;

  Recorder iso("repspace.isometry", 1e-12);
  if (isometric) {
    for (std::size_t t = 0; t < ctx.trials; ++t) {
      const VectorXd v = random_vector(rng, rep.dim());
      for (Letter l : rep.group().letters())
        iso.observe(std::abs(rep.space().norm(rep.generator(l) * v) - rep.space().norm(v)) / (1.0 + rep.space().norm(v)));
    }
  } else {
    iso.note("unchecked family: not asserted");
  }
  out.push_back(iso.done());

  const MarkovOp op = markov(rep, ctx.mu, ctx.norm);
  Recorder at_most_one("repspace.markov_norm_at_most_one", 1e-9);
  if (isometric)
    at_most_one.observe(std::max(0.0, op.bracket.hi - 1.0));
  else
    at_most_one.note("unchecked family: not asserted");
  out.push_back(at_most_one.done());

  Recorder sandwich("repspace.bracket_witness", 1e-9);
  {
    const double ratio = rep.space().norm(op.matrix * op.bracket.witness) / rep.space().norm(op.bracket.witness);
    sandwich.observe(std::max(std::abs(ratio - op.bracket.lo), std::max(0.0, op.bracket.lo - op.bracket.hi)));
  }
  out.push_back(sandwich.done());

  Recorder hom("repspace.markov_homomorphism", 1e-10);
  hom.observe(rel_diff(markov_matrix(rep, convolve(ctx.mu, ctx.mu)), MatrixXd(op.matrix * op.matrix)));
  for (std::size_t t = 0; t < std::min<std::size_t>(ctx.trials, 20); ++t) {
    const Measure nu = random_measure(rng, rep.group_ptr());
    hom.observe(rel_diff(markov_matrix(rep, convolve(ctx.mu, nu)), MatrixXd(op.matrix * markov_matrix(rep, nu))));
  }
  out.push_back(hom.done());
  return out;
}

inline std::vector<PropertyResult> cocycle_properties(const PropertyContext& ctx, const Z1Basis& basis) {
  using namespace detail;
  const auto& rep = *ctx.rep;
  const auto& space = rep.space();
  std::mt19937_64 rng(ctx.seed + 3);
  std::vector<PropertyResult> out;
  const Measure mu2 = convolve(ctx.mu, ctx.mu);
  const Measure mu3 = convolve(mu2, ctx.mu);
  const MatrixXd a = markov_matrix(rep, ctx.mu);

  Recorder in_z1("cocycle.d_pi_in_Z1", 1e-10), linear("cocycle.extend_linear", 1e-10),
      basis_in_z1("cocycle.basis_in_Z1", 1e-9), avg_add("identity.average_additive", 1e-12),
      conv_a("identity.average_convolution_nu_mu", 1e-10), conv_b("identity.average_convolution_nu_mu2", 1e-10),
      snorm("cocycle.s_norm_is_norm", 1e-12), cob("cocycle.coboundary_norm_bound", 1e-12);
  for (std::size_t j = 0; j < basis.dim(); ++j) basis_in_z1.observe(relation_residual(basis.element(j), basis.constraints()));
  for (std::size_t t = 0; t < ctx.trials; ++t) {
    const VectorXd v = random_vector(rng, rep.dim());
    const Cocycle dv = d_pi(ctx.rep, v);
    in_z1.observe(relation_residual(dv, basis.constraints()));
    cob.observe(std::max(0.0, s_norm(dv) - 2.0 * space.norm(v)) / (1.0 + space.norm(v)));

    const Cocycle z = basis.random(rng), w = basis.random(rng);
    const Element g = random_element(rng, rep.group());
    linear.observe(rel_diff(VectorXd((z + w).extend(g)), VectorXd(z.extend(g) + w.extend(g))));
    avg_add.observe(rel_diff(z_mu(z + w, ctx.mu), VectorXd(z_mu(z, ctx.mu) + z_mu(w, ctx.mu))));
    conv_a.observe(rel_diff(VectorXd(a * z_mu(z, ctx.mu) + z_mu(z, ctx.mu)), z_mu(z, mu2)));
    conv_b.observe(rel_diff(VectorXd(a * z_mu(z, mu2) + z_mu(z, ctx.mu)), z_mu(z, mu3)));

    const double c = 3.0;
    const double tri = std::max(0.0, s_norm(z + w) - s_norm(z) - s_norm(w));
    const double hom = std::abs(s_norm(c * z) - c * s_norm(z));
    snorm.observe(std::max(tri, hom) / (1.0 + s_norm(z) + s_norm(w)));
  }
  for (auto* r : {&in_z1, &basis_in_z1, &linear, &avg_add, &conv_a, &conv_b, &snorm, &cob}) out.push_back(r->done());
  return out;
}

inline std::vector<PropertyResult> decomposition_properties(const PropertyContext& ctx, const Decomposer& dec,
                                                            const Z1Basis& basis, const DecompositionReport& report) {
  using namespace detail;
  const auto& rep = *ctx.rep;
  const auto& space = rep.space();
  const MatrixXd& a = dec.A();
  const double lam = dec.bracket().hi;
  std::mt19937_64 rng(ctx.seed + 4);
  std::vector<PropertyResult> out;
  const Measure mu2 = convolve(ctx.mu, ctx.mu);
  const MatrixXd a2 = markov_matrix(rep, mu2);

  Recorder contraction("decomp.contraction", 1e-12), aff_add("identity.affine_additivity", 1e-10),
      semi_a("identity.semigroup_nu_mu", 1e-10), semi_b("identity.semigroup_nu_mu2", 1e-10),
      linear_b("decomp.b_linear", 1e-9), oracle("decomp.oracle_equivalence", 1e-9),
      fixes("decomp.P_fixes_coboundaries", 1e-9), kernel("decomp.kernel_characterization", 1e-9),
      bound("decomp.P_norm_bound", 1e-8), identity("decomp.equivariance_identity", 1e-9),
      cob_def("decomp.coboundary_defects_vanish", 1e-9);

  for (std::size_t t = 0; t < ctx.trials; ++t) {
    const Cocycle z = basis.random(rng), w = basis.random(rng);
    const VectorXd v = random_vector(rng, rep.dim()), u = random_vector(rng, rep.dim());
    const VectorXd zmu = z_mu(z, ctx.mu), wmu = z_mu(w, ctx.mu);

    const double lhs = space.norm(L_apply(a, zmu, v) - L_apply(a, zmu, u));
    contraction.observe(std::max(0.0, lhs - lam * space.norm(v - u)) / (1.0 + space.norm(v - u)));
    aff_add.observe(rel_diff(L_apply(a, z_mu(z + w, ctx.mu), v),
                            VectorXd(L_apply(a, zmu, v) + L_apply(a, wmu, v) - a * v)));
    semi_a.observe(rel_diff(L_apply(a2, z_mu(z, mu2), v), L_apply(a, zmu, L_apply(a, zmu, v))));
    semi_b.observe(rel_diff(L_apply(markov_matrix(rep, convolve(ctx.mu, mu2)), z_mu(z, convolve(ctx.mu, mu2)), v),
                             L_apply(a, zmu, L_apply(a2, z_mu(z, mu2), v))));

    const FixedPointResult bz = dec.fixed_point(z), bw = dec.fixed_point(w);
    linear_b.observe(rel_diff(dec.fixed_point(z + w).b, VectorXd(bz.b + bw.b)));
    linear_b.observe(rel_diff(dec.fixed_point(2.5 * z).b, VectorXd(2.5 * bz.b)));
    oracle.observe(bz.oracle_residual / (1.0 + space.norm(bz.b)));

    const Cocycle dv = d_pi(ctx.rep, v);
    fixes.observe(rel_diff(dec.project(dv).parameters(), dv.parameters()));
    const Cocycle pz = dec.project(z);
    kernel.observe(space.norm(z_mu(z - pz, ctx.mu)) / (1.0 + s_norm(z)));
    if (lam < 1.0) bound.observe(std::max(0.0, s_norm(pz) - 2.0 / (1.0 - lam) * s_norm(z)));

    if (t < std::min<std::size_t>(ctx.trials, 25)) {
      const EquivarianceDefects ez = equivariance_defect(dec, z);
      identity.observe(ez.max_identity_residual / (1.0 + s_norm(z)));
      cob_def.observe(equivariance_defect(dec, dv).max_defect / (1.0 + space.norm(v)));
    }
  }
  if (lam >= 1.0) bound.note("lambda_hi >= 1: bound not applicable");
  for (const auto& z : report.complement_basis) kernel.observe(space.norm(z_mu(z, ctx.mu)));
  for (auto* r : {&contraction, &aff_add, &semi_a, &semi_b, &linear_b, &oracle, &fixes, &kernel, &bound, &identity,
                  &cob_def})
    out.push_back(r->done());

  Recorder route("decomp.convolution_power_route", 1e-9);
  if (rep.group().is_free() && lam < 1.0) {
    const Cocycle z = basis.random(rng);
    const VectorXd b = dec.fixed_point(z).b;
    const double c = space.norm(z_mu(z, ctx.mu)) / (1.0 - lam);
    Measure p = ctx.mu;
    for (std::size_t n = 1; n <= 8; ++n) {
      if (n > 1) {
        if (p.support_size() * ctx.mu.support_size() > 400000) {
          route.note("stopped at n = " + std::to_string(n - 1) + " (support too large)");
          break;
        }
        p = convolve(p, ctx.mu);
      }
      route.observe(std::max(0.0, space.norm(z_mu(z, p) - b) - std::pow(lam, static_cast<double>(n)) * c));
    }
  } else {
    route.note(rep.group().is_free() ? "lambda_hi >= 1" : "checked on free groups only");
  }
  out.push_back(route.done());

  Recorder idem("decomp.P_idempotent", 1e-8);
  idem.observe(report.idempotence_residual);
  out.push_back(idem.done());

  Recorder ranks("decomp.direct_sum", 0.0);
  ranks.observe(report.dim_b1 + report.dim_h1 == report.dim_z1 && report.stacked_rank == report.dim_z1 ? 0.0 : 1.0);
  ranks.observe(report.dim_b1 == report.dim_b1_from_invariants ? 0.0 : 1.0);
  out.push_back(ranks.done());

  Recorder exact_dims("decomp.exact_oracle_dims", 0.0);
  if (ctx.exact_generators) {
    try {
      const auto d = exact::cohomology_dims(rep.group(), *ctx.exact_generators);
      exact_dims.observe(d.z1 == report.dim_z1 && d.b1 == report.dim_b1 && d.h1 == report.dim_h1 ? 0.0 : 1.0);
    } catch (const ValidationError& e) {
      exact_dims.note(std::string("exact oracle unavailable: ") + e.what());
    }
  } else {
    exact_dims.note("exact oracle unavailable: entries are not in a single Q(sqrt m)");
  }
  out.push_back(exact_dims.done());
  return out;
}

}  // namespace cohom
