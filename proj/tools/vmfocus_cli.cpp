#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vmfocus/bounds.hpp"
#include "vmfocus/driver.hpp"
#include "vmfocus/fields.hpp"
#include "vmfocus/params.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vmfocus;

namespace {

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

Config with_markers(Config c, std::size_t markers) {
  if (markers > 0) c.run.markers = markers;
  return c;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

int cmd_run(const std::string& config_path, const std::string& out, std::size_t markers) {
  const Config cfg = with_markers(load_config(config_path), markers);
  const fs::path dir = out.empty() ? fs::path("vmfocus_out") : fs::path(out);
  fs::create_directories(dir);
  RunOptions opts;
  opts.output_dir = dir;
  const RunResult res = run(cfg, opts);
  {
    std::ofstream os(dir / "diag.csv");
    write_diag_csv(os, res.records);
  }
  const FinalReport fr = final_report(res);
  const auto theorem = theorem_report(res, fr);
  const FieldBoundReport bounds = field_bounds(res);
  const std::string report = report_json(res, fr, theorem, bounds);
  write_file(dir / "report.json", report);

  std::cout << "steps " << res.records.size() - 1 << "  t* " << fr.t_star << "  r_sup* "
            << fr.r_sup_star << "  growth_rho " << fr.growth_rho << "  stop " << res.stop_reason
            << "  wall " << res.wall_seconds << " s\n";
  bool ok = fr.asserted_pass() && bounds.asserted_pass();
  for (const auto& c : fr.checks)
    std::cout << (c.pass ? "  pass " : "  FAIL ") << c.name << (c.asserted ? "" : " (reported)")
              << "  " << c.measured << " vs " << c.threshold << "\n";
  for (const auto& c : theorem) {
    if (c.asserted && !c.pass) ok = false;
    std::cout << (c.pass ? "  pass " : "  FAIL ") << c.name << (c.asserted ? "" : " (reported)")
              << "  " << c.measured << " vs " << c.threshold << "\n";
  }
  for (const auto& b : bounds.checks)
    std::cout << (b.pass() ? "  pass " : "  FAIL ") << b.name << (b.asserted ? "" : " (reported)")
              << "  worst ratio " << b.worst_ratio << "\n";
  std::cout << "report " << (dir / "report.json").string() << "\n";
  return ok ? 0 : 1;
}

int cmd_verify_envelope(const std::string& config_path, std::size_t tuples, std::size_t draws,
                        std::uint64_t seed) {
  const Config cfg = load_config(config_path);
  (void)cfg;
  const EnvelopeSuiteResult r = run_envelope_suite(tuples, draws, seed);
  const bool ok = r.violations == 0 && r.angular_violations == 0;
  json j = {{"tuples", r.tuples},
            {"trials", r.trials},
            {"violations", r.violations},
            {"angular_violations", r.angular_violations},
            {"unconverged", r.invalid},
            {"worst_excess", r.worst_excess},
            {"pass", ok}};
  std::cout << j.dump(2) << "\n";
  return ok ? 0 : 1;
}

int cmd_verify_fields(const std::string& config_path, int steps) {
  const Config cfg = load_config(config_path);
  const FieldVerification v = verify_field_solver(cfg.run.dr, std::min(cfg.run.r_max, 0.5), steps);
  json j;
  for (std::size_t i = 0; i < v.cases.size(); ++i) {
    const auto& c = v.cases[i];
    j["oracle"][v.names[i]] = {
        {"relative_error", c.relative()}, {"nodes", c.nodes}, {"pass", c.relative() <= 1e-10}};
  }
  j["vacuum_advection"] = {{"max_error", v.advection_error}, {"pass", v.advection_error <= 1e-12}};
  j["pass"] = v.pass();
  std::cout << j.dump(2) << "\n";
  return v.pass() ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& eps, const std::string& out,
              std::size_t markers) {
  const Config cfg = with_markers(load_config(config_path), markers);
  const auto rows = sweep(cfg, parse_eps_list(eps));
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  if (!out.empty()) {
    fs::create_directories(out);
    write_file(fs::path(out) / "sweep.csv", csv.str());
  }
  std::cout << csv.str();
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.ok && r.failed_checks == 0;
  return ok ? 0 : 1;
}

int cmd_report(const std::string& csv_path) {
  std::ifstream is(csv_path);
  if (!is) throw std::runtime_error("cannot read " + csv_path);
  const DiagSummary s = summarize_diag(read_diag_csv(is));
  json j = {{"rows", s.rows},
            {"t_star", s.t_star},
            {"r_sup_star", s.r_sup_star},
            {"growth_rho", s.growth_rho},
            {"growth_Er", s.growth_Er},
            {"max_mass_drift", s.max_mass_drift},
            {"max_charge_error", s.max_charge_error},
            {"max_gauss_ratio", s.max_gauss_ratio},
            {"pass", s.pass}};
  std::cout << j.dump(2) << "\n";
  return s.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial Vlasov-Maxwell focusing solver"};
  app.require_subcommand(1);

  std::string config, out, eps, csv;
  std::size_t markers = 0, tuples = 100, draws = 20;
  std::uint64_t seed = 1;
  int steps = 64;

  auto* run_cmd = app.add_subcommand("run", "Run the coupled simulation");
  run_cmd->add_option("config", config, "JSON config")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out, "Output directory");
  run_cmd->add_option("--markers", markers, "Override the marker count");

  auto* env_cmd = app.add_subcommand("verify-envelope", "Adversarial trajectory-envelope suite");
  env_cmd->add_option("config", config, "JSON config")->required()->check(CLI::ExistingFile);
  env_cmd->add_option("--tuples", tuples, "Parameter tuples");
  env_cmd->add_option("--draws", draws, "Field draws per tuple");
  env_cmd->add_option("--seed", seed, "Random seed");

  auto* fld_cmd = app.add_subcommand("verify-fields", "Field solver against the quadrature oracle");
  fld_cmd->add_option("config", config, "JSON config")->required()->check(CLI::ExistingFile);
  fld_cmd->add_option("--steps", steps, "Field steps per case");

  auto* sweep_cmd = app.add_subcommand("sweep", "Epsilon sweep");
  sweep_cmd->add_option("config", config, "JSON config")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--eps", eps, "Comma-separated epsilon values")->required();
  sweep_cmd->add_option("--out", out, "Output directory for sweep.csv");
  sweep_cmd->add_option("--markers", markers, "Override the marker count");

  auto* rep_cmd = app.add_subcommand("report", "Summarize a diag.csv");
  rep_cmd->add_option("diag", csv, "diag.csv path")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(config, out, markers);
    if (*env_cmd) return cmd_verify_envelope(config, tuples, draws, seed);
    if (*fld_cmd) return cmd_verify_fields(config, steps);
    if (*sweep_cmd) return cmd_sweep(config, eps, out, markers);
    if (*rep_cmd) return cmd_report(csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
