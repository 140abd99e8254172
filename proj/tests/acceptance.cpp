// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cohom/cohom.hpp"

using namespace cohom;
namespace fs = std::filesystem;

namespace {

const std::string kScenarios = COHOM_SCENARIO_DIR;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double rel(const VectorXd& a, const VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / (1.0 + a.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Scenario load(const std::string& name) { return load_scenario(kScenarios + "/" + name + ".yaml"); }

struct Setting {
  Scenario sc;
  Decomposer dec;
  Z1Basis basis;
  DecompositionReport report;

  explicit Setting(Scenario s)
      : sc(std::move(s)), dec(sc.rep, *sc.measure), basis(z1_basis(sc.rep)), report(decompose(dec, basis)) {}
};

Check anchor_a() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto run = run_command(load("anchor_a"), {});
  const double elapsed = seconds_since(t0);

  Setting s(load("anchor_a"));
  const auto& r = s.report;
  c.require(r.lambda.lo >= 0.0 && r.lambda.hi <= 1e-12, "lambda bracket [" + fmt(r.lambda.lo) + ", " + fmt(r.lambda.hi) + "]");
  c.require(r.dim_z1 == 2 && r.dim_b1 == 2 && r.dim_h1 == 0, "dims");
  c.require((r.p_matrix - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-9, "P != I");
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (std::size_t j = 0; j < s.basis.dim(); ++j)
    worst = std::max(worst, equivariance_defect(s.dec, s.basis.element(j)).max_defect);
  for (int t = 0; t < 20; ++t) worst = std::max(worst, equivariance_defect(s.dec, s.basis.random(rng)).max_defect);
  c.require(worst <= 1e-9, "equivariance defect " + fmt(worst));
  c.require(run.exit_code == kExitOk, "run exit code " + std::to_string(run.exit_code));
  c.require(elapsed < 1.0, "runtime " + fmt(elapsed) + " s");
  if (c.ok) c.detail = "dims (2,2,0), P = I, max defect " + fmt(worst) + ", run " + fmt(elapsed) + " s";
  return c;
}

Check anchor_b() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto run = run_command(load("anchor_b"), {});
  const double elapsed = seconds_since(t0);

  Setting s(load("anchor_b"));
  const auto& r = s.report;
  c.require(std::abs(r.lambda.lo - 0.2) <= 1e-10 && std::abs(r.lambda.hi - 0.2) <= 1e-10,
            "lambda bracket [" + fmt(r.lambda.lo) + ", " + fmt(r.lambda.hi) + "]");
  c.require(r.dim_z1 == 4 && r.dim_b1 == 2 && r.dim_h1 == 2, "dims");
  std::mt19937_64 rng(202);
  double worst_b = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Cocycle z = s.basis.random(rng);
    worst_b = std::max(worst_b, (s.dec.fixed_point(z).b - (5.0 / 6.0) * z_mu(z, *s.sc.measure)).norm());
  }
  c.require(worst_b <= 1e-10, "b(z) - (5/6) z^mu = " + fmt(worst_b));
  c.require(r.complement_zmu_max <= 1e-9, "complement z^mu " + fmt(r.complement_zmu_max));
  c.require(r.stacked_rank == 4, "stacked rank " + std::to_string(r.stacked_rank));
  c.require(run.exit_code == kExitOk, "run exit code " + std::to_string(run.exit_code));
  c.require(elapsed < 1.0, "runtime " + fmt(elapsed) + " s");
  if (c.ok)
    c.detail = "lambda = 0.2, dims (4,2,2), |b - 5/6 z^mu| <= " + fmt(worst_b) + ", rank 4, run " + fmt(elapsed) + " s";
  return c;
}

Check anchor_c() {
  Check c;
  Setting s(load("s3_standard"));
  const auto& r = s.report;
  c.require(r.lambda.hi < 1.0, "lambda_hi " + fmt(r.lambda.hi));
  c.require(r.dim_z1 == 2 && r.dim_b1 == 2 && r.dim_h1 == 0, "dims");
  c.require(s.sc.exact_generators.has_value(), "no exact generators");
  if (s.sc.exact_generators) {
    const auto d = exact::cohomology_dims(*s.sc.group, *s.sc.exact_generators);
    c.require(d.z1 == r.dim_z1 && d.b1 == r.dim_b1 && d.h1 == r.dim_h1, "exact oracle disagrees");
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < s.basis.dim(); ++j) {
    const Cocycle z = s.basis.element(j);
    worst = std::max(worst, (s.dec.project(z).parameters() - z.parameters()).cwiseAbs().maxCoeff());
  }
  c.require(worst <= 1e-8, "Pz - z = " + fmt(worst));
  if (c.ok) c.detail = "lambda_hi = " + fmt(r.lambda.hi) + ", dims (2,2,0) = exact oracle, |Pz - z| <= " + fmt(worst);
  return c;
}

Check identity_suite(std::vector<Setting>& settings) {
  Check c;
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<std::size_t> pick(0, settings.size() - 1);
  std::normal_distribution<double> normal;
  double worst[4] = {0, 0, 0, 0};
  for (int t = 0; t < 100; ++t) {
    Setting& s = settings[pick(rng)];
    const auto& rep = *s.sc.rep;
    const Measure& mu = *s.sc.measure;
    const Measure mu2 = convolve(mu, mu);
    const Measure mu3 = convolve(mu2, mu);
    const MatrixXd a = markov_matrix(rep, mu), a2 = markov_matrix(rep, mu2), a3 = markov_matrix(rep, mu3);
    const Cocycle z = s.basis.random(rng), w = s.basis.random(rng);
    VectorXd v(static_cast<Eigen::Index>(rep.dim()));
    for (auto& x : v) x = normal(rng);
    const VectorXd zmu = z_mu(z, mu), wmu = z_mu(w, mu), zmu2 = z_mu(z, mu2), zmu3 = z_mu(z, mu3);

    worst[0] = std::max(worst[0], rel(z_mu(z + w, mu), zmu + wmu));
    worst[1] = std::max(worst[1], rel(L_apply(a, z_mu(z + w, mu), v), L_apply(a, zmu, v) + L_apply(a, wmu, v) - a * v));
    worst[2] = std::max({worst[2], rel(a * zmu + zmu, zmu2), rel(a * zmu2 + zmu, zmu3)});
    worst[3] = std::max({worst[3], rel(L_apply(a2, zmu2, v), L_apply(a, zmu, L_apply(a, zmu, v))),
                         rel(L_apply(a3, zmu3, v), L_apply(a, zmu, L_apply(a2, zmu2, v)))});
  }
  const char* names[4] = {"average additivity", "affine additivity", "average convolution", "semigroup"};
  for (int i = 0; i < 4; ++i) c.require(worst[i] <= 1e-9, std::string(names[i]) + " residual " + fmt(worst[i]));
  if (c.ok) {
    c.detail = "100 triples, max residuals";
    for (int i = 0; i < 4; ++i) c.detail += std::string(i ? ", " : " ") + names[i] + " " + fmt(worst[i]);
  }
  return c;
}

Check projection_suite(std::vector<Setting>& settings) {
  Check c;
  double idem = 0, fixes = 0, linear = 0, oracle = 0, bound = 0;
  std::mt19937_64 rng(505);
  std::normal_distribution<double> normal;
  for (auto& s : settings) {
    const auto& rep = s.sc.rep;
    const auto& space = rep->space();
    const MatrixXd& p = s.report.p_matrix;
    idem = std::max(idem, (p * p - p).cwiseAbs().maxCoeff());
    const double lam = s.dec.bracket().hi;
    for (int t = 0; t < 100; ++t) {
      VectorXd v(static_cast<Eigen::Index>(rep->dim()));
      for (auto& x : v) x = normal(rng);
      const Cocycle dv = d_pi(rep, v);
      fixes = std::max(fixes, rel(s.dec.project(dv).parameters(), dv.parameters()));

      const Cocycle z = s.basis.random(rng), w = s.basis.random(rng);
      const auto bz = s.dec.fixed_point(z), bw = s.dec.fixed_point(w);
      linear = std::max(linear, rel(s.dec.fixed_point(z + w).b, bz.b + bw.b));
      oracle = std::max(oracle, bz.oracle_residual / std::max(space.norm(bz.b), 1e-300));
    }
    for (int t = 0; t < 1000; ++t) {
      const Cocycle z = s.basis.random(rng);
      const Cocycle pz = s.basis.cocycle(p * s.basis.coordinates(z));
      bound = std::max(bound, s_norm(pz) - (2.0 / (1.0 - lam) * s_norm(z) + 1e-8));
    }
  }
  c.require(idem <= 1e-8, "P^2 - P = " + fmt(idem));
  c.require(fixes <= 1e-9, "P d_pi - d_pi = " + fmt(fixes));
  c.require(linear <= 1e-9, "b linearity " + fmt(linear));
  c.require(oracle <= 1e-9, "oracle relative " + fmt(oracle));
  c.require(bound <= 0.0, "norm bound exceeded by " + fmt(bound));
  if (c.ok)
    c.detail = "idempotence " + fmt(idem) + ", fixes " + fmt(fixes) + ", linearity " + fmt(linear) + ", oracle " +
               fmt(oracle) + ", bound slack ok";
  return c;
}

Check convergence_rate() {
  Check c;
  Setting s(load("anchor_b"));
  const Measure& mu = *s.sc.measure;
  std::mt19937_64 rng(606);
  double worst = -1.0;
  for (int t = 0; t < 3; ++t) {
    const Cocycle z = s.basis.random(rng);
    const VectorXd b = s.dec.fixed_point(z).b;
    const double zmu = z_mu(z, mu).norm();
    Measure p = mu;
    for (int n = 1; n <= 8; ++n) {
      if (n > 1) p = convolve(p, mu);
      const double lhs = (z_mu(z, p) - b).norm();
      const double rhs = std::pow(0.2, n) * zmu / 0.8;
      worst = std::max(worst, lhs / rhs);
      c.require(lhs <= rhs, "n = " + std::to_string(n) + ": " + fmt(lhs) + " > " + fmt(rhs));
    }
  }
  if (c.ok) c.detail = "n = 1..8 via convolution powers, worst ratio to bound " + fmt(worst);
  return c;
}

Check equivalence_criterion() {
  Check c;
  Setting s(load("anchor_b"));
  std::vector<Cocycle> tested = s.report.complement_basis;
  std::mt19937_64 rng(707);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 20; ++t) {
    Cocycle z = Cocycle::zero(s.sc.rep);
    for (const auto& h : s.report.complement_basis) z = z + h * normal(rng);
    tested.push_back(z);
  }
  double min_ratio = kInfinity, worst_identity = 0.0;
  for (const auto& z : tested) {
    const auto d = equivariance_defect(s.dec, z);
    min_ratio = std::min(min_ratio, d.max_defect / s_norm(z));
    worst_identity = std::max(worst_identity, d.max_identity_residual);
  }
  for (int t = 0; t < 20; ++t)
    worst_identity = std::max(worst_identity, equivariance_defect(s.dec, s.basis.random(rng)).max_identity_residual);
  c.require(!s.report.complement_basis.empty(), "empty complement");
  c.require(min_ratio >= 0.01, "defect / s_norm = " + fmt(min_ratio));
  c.require(worst_identity <= 1e-9, "identity residual " + fmt(worst_identity));
  if (c.ok) c.detail = "min defect/s_norm " + fmt(min_ratio) + ", identity residual " + fmt(worst_identity);
  return c;
}

Check lp_bracket() {
  Check c;
  Setting s(load("s3_signed_perm_p3"));
  const NormBracket& b = s.dec.bracket();
  c.require(b.lo <= b.hi, "lo > hi");

  std::mt19937_64 rng(808);
  std::normal_distribution<double> normal;
  std::vector<MatrixXd> mats{s.dec.A()};
  for (int t = 0; t < 20; ++t) {
    MatrixXd m(3, 3);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    mats.push_back(m);
  }
  for (const auto& m : mats) {
    const auto one = op_norm(m, NormedSpace(3, 1.0));
    const auto inf = op_norm(m, NormedSpace(3, kInfinity));
    const double col = m.cwiseAbs().colwise().sum().maxCoeff();
    const double row = m.cwiseAbs().rowwise().sum().maxCoeff();
    c.require(one.lo == col && one.hi == col, "p = 1 not the column sum");
    c.require(inf.lo == row && inf.hi == row, "p = inf not the row sum");
  }
  VectorXd d(3);
  d << 2, 1, 1;
  for (double p : {1.0, 1.5, 2.0, 3.0, kInfinity}) {
    const auto bd = op_norm(d.asDiagonal().toDenseMatrix(), NormedSpace(3, p));
    c.require(std::abs(bd.lo - 2.0) <= 1e-12 && std::abs(bd.hi - 2.0) <= 1e-12,
              "diag bracket at p = " + fmt(p) + ": [" + fmt(bd.lo) + ", " + fmt(bd.hi) + "]");
  }
  if (c.ok) c.detail = "p = 3 bracket [" + fmt(b.lo) + ", " + fmt(b.hi) + "], endpoints exact, diag(2,1,1) -> [2, 2]";
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Check determinism() {
  Check c;
  const fs::path root = fs::temp_directory_path() / ("cohom_acceptance_" + std::to_string(::getpid()));
  std::size_t compared = 0;
  for (const char* name : {"anchor_a", "anchor_b", "s3_standard"}) {
    std::string first_json, first_csv;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = root / (std::string(name) + "_" + std::to_string(rep));
      const std::string cmd = std::string("\"") + COHOMCTL_PATH + "\" run \"" + kScenarios + "/" + name +
                              ".yaml\" --seed 1234 --out \"" + out.string() + "\"";
      const int rc = std::system(cmd.c_str());
      c.require(rc == 0, std::string(name) + ": cohomctl returned " + std::to_string(rc));
      const std::string json = slurp(out / (std::string(name) + ".report.json"));
      const std::string csv = slurp(out / (std::string(name) + ".ratios.csv"));
      c.require(!json.empty(), std::string(name) + ": empty report");
      if (rep == 0) {
        first_json = json;
        first_csv = csv;
      } else {
        c.require(json == first_json, std::string(name) + ": reports differ");
        c.require(csv == first_csv, std::string(name) + ": ratio files differ");
        ++compared;
      }
    }
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  if (c.ok) c.detail = std::to_string(compared) + " anchors, report and CSV byte-identical";
  return c;
}

}  // namespace

int main() {
  std::vector<Setting> settings;
  settings.emplace_back(load("anchor_a"));
  settings.emplace_back(load("anchor_b"));
  settings.emplace_back(load("s3_standard"));

  const std::vector<std::pair<const char*, std::function<Check()>>> criteria{
      {"anchor A (Free(1), rotation by 2pi/3)", anchor_a},
      {"anchor B (Free(2), two rotations by 2pi/3)", anchor_b},
      {"anchor C (S_3 standard representation)", anchor_c},
      {"averaging identities on random triples", [&] { return identity_suite(settings); }},
      {"projection suite", [&] { return projection_suite(settings); }},
      {"convergence rate on anchor B", convergence_rate},
      {"equivariance criterion on anchor B", equivalence_criterion},
      {"lp norm bracket sanity", lp_bracket},
      {"deterministic reports", determinism},
  };

  int failures = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s: %s\n", c.ok ? "PASS" : "FAIL", index, name, c.detail.c_str());
    failures += c.ok ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
