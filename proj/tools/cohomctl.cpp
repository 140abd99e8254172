// cohomctl: run, verify, norm, admissible on a scenario file.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cohom/cohom.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cohom::ValidationError("cannot write " + path.string());
  out << text;
}

int emit(const cohom::Scenario& sc, const cohom::PipelineOutput& po, const std::string& format,
         const std::string& out_dir, const std::string& command) {
  const std::string json_text = po.report.dump(2) + "\n";
  const bool csv = format == "csv";
  if (out_dir.empty()) {
    std::cout << (csv ? cohom::ratios_csv(po.ratios) : json_text);
    return po.exit_code;
  }
  fs::create_directories(out_dir);
  const std::string stem = sc.name.empty() ? "scenario" : sc.name;
  const std::string suffix = command == "run" ? "report" : command;
  write_file(fs::path(out_dir) / (stem + "." + suffix + ".json"), json_text);
  if (csv || command == "run") write_file(fs::path(out_dir) / (stem + ".ratios.csv"), cohom::ratios_csv(po.ratios));
  return po.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cohomology decomposition of isometric group actions on finite-dimensional lp spaces"};
  app.set_version_flag("--version", std::string(cohom::kToolVersion));
  app.require_subcommand(1);

  std::string scenario_path, format = "json", out_dir;
  cohom::Overrides ov;
  double tol = 0;
  std::uint64_t seed = 0;
  std::size_t max_iter = 0, restarts = 0;

  for (const char* name : {"run", "verify", "norm", "admissible"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("scenario", scenario_path, "scenario YAML file")->required();
    sub->add_option("--tol", tol, "fixed-point tolerance");
    sub->add_option("--seed", seed, "seed for every randomized step");
    sub->add_option("--max-iter", max_iter, "iteration cap for the fixed-point solver");
    sub->add_option("--restarts", restarts, "power-iteration restarts for the norm bracket");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", out_dir, "directory for report files");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cohom::kExitValidation;
  }

  const auto* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  if (sub->count("--tol")) ov.tol = tol;
  if (sub->count("--seed")) ov.seed = seed;
  if (sub->count("--max-iter")) ov.max_iter = max_iter;
  if (sub->count("--restarts")) ov.restarts = restarts;

  try {
    const cohom::Scenario sc = cohom::load_scenario(scenario_path);
    cohom::PipelineOutput po;
    if (command == "run")
      po = cohom::run_command(sc, ov);
    else if (command == "verify")
      po = cohom::verify_command(sc, ov);
    else if (command == "norm")
      po = cohom::norm_command(sc, ov);
    else
      po = cohom::admissible_command(sc, ov);
    return emit(sc, po, format, out_dir, command);
  } catch (const cohom::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return cohom::kExitValidation;
  } catch (const cohom::UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return cohom::kExitValidation;
  } catch (const cohom::HypothesisViolated& e) {
    std::cerr << "hypothesis violated: " << e.what() << "\n";
    return cohom::kExitHypothesis;
  } catch (const cohom::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return cohom::kExitValidation;
  }
}
