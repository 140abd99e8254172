#pragma once

// Batch pipeline behind the command-line tool: scenario -> measure ->
// representation -> Z1 -> decomposition -> JSON report.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cohom/cocycle.hpp"
#include "cohom/decomp.hpp"
#include "cohom/exact.hpp"
#include "cohom/properties.hpp"
#include "cohom/repspace.hpp"
#include "cohom/scenario.hpp"

namespace cohom {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "cohom-report/1";

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitHypothesis = 2, kExitVerifyFailed = 3 };

/// Command-line flags that override the scenario's solver block.
struct Overrides {
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_iter;
  std::optional<std::size_t> restarts;
};

struct PipelineOutput {
  nlohmann::ordered_json report;
  std::vector<double> ratios;
  int exit_code = kExitOk;
};

namespace report {

using json = nlohmann::ordered_json;

inline json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline json vec(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

inline json mat(const MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i).transpose()));
  return a;
}

/// A cocycle as its list of generator values.
inline json cocycle(const Cocycle& z) {
  json a = json::array();
  for (Eigen::Index s = 0; s < z.values().cols(); ++s) a.push_back(vec(z.values().col(s)));
  return a;
}

inline json bracket(const NormBracket& b) {
  return json{{"lo", number(b.lo)}, {"hi", number(b.hi)}, {"method", b.method}, {"witness", vec(b.witness)}};
}

inline json property(const PropertyResult& r) {
  json j{{"name", r.name}, {"passed", r.passed}, {"max_residual", number(r.max_residual)},
         {"threshold", number(r.threshold)}, {"trials", r.trials}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

}  // namespace report

struct EffectiveSettings {
  SolverSettings solver;
  std::uint64_t seed = 0;
};

inline EffectiveSettings effective_settings(const Scenario& sc, const Overrides& o, bool need_seed = true) {
  EffectiveSettings e{sc.solver, 0};
  if (o.tol) e.solver.tol = *o.tol;
  if (o.max_iter) e.solver.max_iter = *o.max_iter;
  if (o.restarts) e.solver.restarts = *o.restarts;
  if (!(e.solver.tol > 0.0)) throw ValidationError("tolerance must be positive");
  if (o.seed)
    e.seed = *o.seed;
  else if (sc.seed)
    e.seed = *sc.seed;
  else if (need_seed)
    throw ValidationError("a seed is required (scenario 'seed' key or --seed)");
  return e;
}

inline std::string hypothesis_status(const NormBracket& b) {
  if (b.hi < 1.0) return "certified";
  if (b.lo < 1.0) return "undecided";
  return "violated";
}

inline report::json header(const Scenario& sc, const char* command, std::uint64_t seed) {
  return report::json{{"schema", kReportSchema},
                      {"tool_version", kToolVersion},
                      {"command", command},
                      {"scenario", {{"name", sc.name}, {"hash", sc.hash}}},
                      {"seed", seed}};
}

inline report::json group_block(const Group& g) {
  report::json j{{"kind", g.is_free() ? "free" : "perm"}, {"rank", g.rank()}, {"labels", g.labels()}};
  if (g.is_finite()) {
    j["degree"] = g.degree();
    j["order"] = g.order();
  }
  return j;
}

inline report::json admissibility_block(const Scenario& sc) {
  using report::json;
  json j{{"measure_kind", sc.measure_kind}};
  if (!sc.pair) {
    j["pair"] = "not_provided";
    return j;
  }
  const auto res = check_admissible(*sc.pair, *sc.group);
  j["admissible"] = res.admissible;
  json v = json::array();
  for (const auto& x : res.violations) {
    json e{{"condition", x.condition}, {"message", x.message}};
    if (x.generator) e["generator"] = sc.group->letter_name(*x.generator);
    if (x.at) e["at"] = sc.group->format(*x.at);
    v.push_back(e);
  }
  j["violations"] = v;
  return j;
}

inline report::json measure_block(const Scenario& sc) {
  using report::json;
  json support = json::array();
  for (const auto& [g, w] : sc.exact_measure->weights())
    support.push_back(json{sc.group->format(g), w.str(), report::number(to_double(w))});
  return json{{"kind", sc.measure_kind}, {"support", support}, {"symmetric", sc.exact_measure->is_symmetric()}};
}

inline PowerIterationOptions norm_options(const EffectiveSettings& e) {
  PowerIterationOptions o;
  o.seed = e.seed;
  o.restarts = e.solver.restarts;
  return o;
}

/// `norm`: the Markov operator and its certified norm bracket.
inline PipelineOutput norm_command(const Scenario& sc, const Overrides& o) {
  const auto e = effective_settings(sc, o);
  PipelineOutput out;
  out.report = header(sc, "norm", e.seed);
  const MarkovOp op = markov(*sc.rep, *sc.measure, norm_options(e));
  out.report["space"] = {{"dim", sc.rep->dim()}, {"p", report::number(sc.rep->space().p)}};
  out.report["markov"] = {{"matrix", report::mat(op.matrix)}, {"bracket", report::bracket(op.bracket)}};
  out.report["hypothesis"] = hypothesis_status(op.bracket);
  out.exit_code = op.bracket.hi < 1.0 ? kExitOk : kExitHypothesis;
  return out;
}

/// `admissible`: the discrete admissibility conditions of the scenario's pair.
inline PipelineOutput admissible_command(const Scenario& sc, const Overrides& o) {
  const auto e = effective_settings(sc, o, false);
  PipelineOutput out;
  out.report = header(sc, "admissible", e.seed);
  out.report["measure"] = measure_block(sc);
  out.report["admissibility"] = admissibility_block(sc);
  out.exit_code = kExitOk;
  return out;
}

/// `run`: the full decomposition report.
inline PipelineOutput run_command(const Scenario& sc, const Overrides& o) {
  using report::json;
  const auto e = effective_settings(sc, o);
  PipelineOutput out;
  json& r = out.report;
  r = header(sc, "run", e.seed);
  r["group"] = group_block(*sc.group);
  r["measure"] = measure_block(sc);
  r["admissibility"] = admissibility_block(sc);

  const auto& rep = sc.rep;
  r["representation"] = {{"dim", rep->dim()}, {"p", report::number(rep->space().p)},
                         {"family", to_string(rep->family())}};

  SolverOptions solver;
  solver.tol = e.solver.tol;
  solver.max_iter = e.solver.max_iter;
  solver.idempotence_tol = std::max(solver.idempotence_tol, 100.0 * solver.tol);
  const Decomposer dec(rep, *sc.measure, solver, norm_options(e));
  const NormBracket& lam = dec.bracket();
  r["markov"] = {{"matrix", report::mat(dec.A())}, {"bracket", report::bracket(lam)}};
  const KappaEstimate kappa = kappa_estimate(*rep, e.seed, e.solver.kappa_restarts);
  r["kappa"] = {{"estimate", report::number(kappa.value)}, {"witness", report::vec(kappa.witness)}};

  const std::string status = hypothesis_status(lam);
  r["hypothesis"] = status;
  const bool admissible = sc.pair && check_admissible(*sc.pair, *sc.group).admissible;
  json obs = json::object();
  if (kappa.value > 0.1 && admissible)
    obs["spectral_gap_given_kappa"] = {{"kappa_estimate", report::number(kappa.value)},
                                       {"lambda_hi_below_one", lam.hi < 1.0}};
  r["observations"] = obs;

  const Z1Basis basis = z1_basis(rep, solver.rank_tol);
  r["z1_basis"] = report::mat(basis.matrix());

  if (status == "violated") {
    r["error"] = "Markov operator norm is at least 1; the spectral gap hypothesis fails";
    out.exit_code = kExitHypothesis;
    return out;
  }

  try {
    const DecompositionReport dr = decompose(dec, basis);
    r["certificate"] = to_string(dr.certificate);
    r["dims"] = {{"z1", dr.dim_z1}, {"b1", dr.dim_b1}, {"h1", dr.dim_h1}};
    r["dim_b1_from_invariants"] = dr.dim_b1_from_invariants;
    if (sc.exact_generators) {
      try {
        const auto d = exact::cohomology_dims(*sc.group, *sc.exact_generators);
        r["exact_oracle"] = {{"available", true}, {"z1", d.z1}, {"b1", d.b1}, {"h1", d.h1},
                             {"match", d.z1 == dr.dim_z1 && d.b1 == dr.dim_b1 && d.h1 == dr.dim_h1}};
      } catch (const ValidationError& ex) {
        r["exact_oracle"] = {{"available", false}, {"reason", ex.what()}};
      }
    } else {
      r["exact_oracle"] = {{"available", false}, {"reason", "entries are not in a single Q(sqrt m)"}};
    }
    r["p_matrix"] = report::mat(dr.p_matrix);
    r["idempotence_residual"] = report::number(dr.idempotence_residual);
    json cob = json::array(), comp = json::array();
    for (const auto& z : dr.coboundary_basis) cob.push_back(report::cocycle(z));
    for (const auto& z : dr.complement_basis) comp.push_back(report::cocycle(z));
    r["coboundary_basis"] = cob;
    r["complement_basis"] = comp;
    r["stacked_rank"] = dr.stacked_rank;
    r["complement_zmu_max"] = report::number(dr.complement_zmu_max);

    double worst_identity = 0.0;
    json defects = json::array();
    for (const auto& z : dr.complement_basis) {
      const auto d = equivariance_defect(dec, z);
      worst_identity = std::max(worst_identity, d.max_identity_residual);
      json per = json::object();
      for (const auto& g : d.per_generator) per[sc.group->letter_name(g.generator)] = report::number(g.defect);
      defects.push_back({{"defects", per}, {"s_norm", report::number(s_norm(z))}});
    }
    r["complement_equivariance"] = defects;

    json cocycles = json::array();
    for (const auto& nc : sc.cocycles) {
      const FixedPointResult fp = dec.fixed_point(nc.cocycle);
      const Cocycle pz = d_pi(rep, fp.b);
      const auto d = equivariance_defect(dec, nc.cocycle);
      worst_identity = std::max(worst_identity, d.max_identity_residual);
      json per = json::object();
      for (const auto& g : d.per_generator) per[sc.group->letter_name(g.generator)] = report::number(g.defect);
      cocycles.push_back({{"name", nc.name},
                          {"s_norm", report::number(s_norm(nc.cocycle))},
                          {"z_mu", report::vec(z_mu(nc.cocycle, *sc.measure))},
                          {"b", report::vec(fp.b)},
                          {"iterations", fp.iterations},
                          {"certificate", to_string(fp.certificate)},
                          {"rate", report::number(fp.rate)},
                          {"oracle_residual", report::number(fp.oracle_residual)},
                          {"projection", report::cocycle(pz)},
                          {"is_coboundary", d.max_defect <= 1e-9 * (1.0 + s_norm(nc.cocycle))},
                          {"defects", per}});
    }
    r["cocycles"] = cocycles;
    r["equivariance_identity_max_residual"] = report::number(worst_identity);

    const PNormEstimate pn = p_norm_estimate(dec, basis, dr.p_matrix, e.seed, e.solver.samples);
    r["p_norm"] = {{"estimate", report::number(pn.estimate)},
                   {"witness", report::cocycle(pn.witness)},
                   {"theoretical_bound", report::number(pn.theoretical_bound)},
                   {"bound_respected", pn.bound_respected},
                   {"exceeds_one", pn.exceeds_one},
                   {"samples", pn.sample_ratios.size()}};
    out.ratios = pn.sample_ratios;
    out.exit_code = status == "certified" ? kExitOk : kExitHypothesis;
  } catch (const HypothesisViolated& ex) {
    r["error"] = ex.what();
    out.exit_code = kExitHypothesis;
  } catch (const ConvergenceError& ex) {
    r["error"] = ex.what();
    out.exit_code = kExitHypothesis;
  }
  return out;
}

/// `verify`: the randomized property suite with the scenario's seed.
inline PipelineOutput verify_command(const Scenario& sc, const Overrides& o) {
  using report::json;
  const auto e = effective_settings(sc, o);
  PipelineOutput out;
  out.report = header(sc, "verify", e.seed);

  PropertyContext ctx{sc.rep, *sc.measure, e.seed, e.solver.trials, {}, norm_options(e), sc.exact_generators};
  ctx.solver.tol = e.solver.tol;
  ctx.solver.max_iter = e.solver.max_iter;
  ctx.solver.idempotence_tol = std::max(ctx.solver.idempotence_tol, 100.0 * ctx.solver.tol);

  std::vector<PropertyResult> results;
  auto append = [&](std::vector<PropertyResult> v) { results.insert(results.end(), v.begin(), v.end()); };
  append(group_properties(*sc.group, e.seed, e.solver.trials));
  append(measure_properties(sc.group, *sc.measure, e.seed, e.solver.trials));
  append(repspace_properties(ctx));
  const Z1Basis basis = z1_basis(sc.rep, ctx.solver.rank_tol);
  append(cocycle_properties(ctx, basis));

  const Decomposer dec(sc.rep, *sc.measure, ctx.solver, ctx.norm);
  const std::string status = hypothesis_status(dec.bracket());
  out.report["hypothesis"] = status;
  out.report["bracket"] = report::bracket(dec.bracket());
  bool hypothesis_problem = status != "certified";
  if (status != "violated") {
    try {
      const DecompositionReport dr = decompose(dec, basis);
      append(decomposition_properties(ctx, dec, basis, dr));
    } catch (const HypothesisViolated& ex) {
      out.report["error"] = ex.what();
      hypothesis_problem = true;
    } catch (const ConvergenceError& ex) {
      out.report["error"] = ex.what();
      hypothesis_problem = true;
    }
  }

  bool all = true;
  json props = json::array();
  for (const auto& p : results) {
    all = all && p.passed;
    props.push_back(report::property(p));
  }
  out.report["properties"] = props;
  out.report["all_passed"] = all;
  out.exit_code = !all ? kExitVerifyFailed : (hypothesis_problem ? kExitHypothesis : kExitOk);
  return out;
}

inline std::string ratios_csv(const std::vector<double>& ratios) {
  std::string s = "sample,ratio\n";
  char buf[64];
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, ratios[i]);
    s += buf;
  }
  return s;
}

}  // namespace cohom
