#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vmfocus/bounds.hpp"
#include "vmfocus/initdata.hpp"
#include "vmfocus/params.hpp"

namespace vmfocus {

/// Scalars recorded once per field step.
struct DiagnosticsRecord {
  std::size_t step = 0;
  double t = 0.0;
  double mass = 0.0;    // sum of marker weights
  double charge = 0.0;  // sum of rho_j times shell area
  double rho_max = 0.0, rho_max_inner = 0.0;
  double Er_max = 0.0, Er_max_inner = 0.0;
  double Ephi_max = 0.0, B_max = 0.0;
  double r_min = 0.0, r_sup = 0.0;
  double rdot_max = 0.0;      // largest radial velocity over markers
  double gauss_ratio = 0.0;   // max 2 pi r E_r / M
  double Er_at_rsup = 0.0;    // E_r interpolated at r_sup
  double L_ratio_max = 0.0;   // max L / L0
  double cone_ratio = 0.0;    // r_min / t (infinite at t = 0)
  double field_budget = 0.0;  // 3 max r |(E_r, E_phi, B)|
  double claim_ratio = 0.0;   // max r |(E_phi, B)| / (24 eps^(alpha-4k-l))
  double ampere_gap = 0.0;    // max |E_r(Ampere) - E_r(Gauss)| / max E_r
  int substeps = 0;

  bool claim1() const { return claim_ratio <= 1.0; }
  bool claim2(double c) const { return cone_ratio >= c; }
  bool claim3() const { return rdot_max < 0.0; }
};

/// Documented column order of diag.csv.
const std::vector<std::string>& diag_columns();
void write_diag_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records);
/// Throws std::runtime_error naming the row on malformed input.
std::vector<DiagnosticsRecord> read_diag_csv(std::istream& is);

struct RunOptions {
  /// Directory for snapshots/ and trajectories.csv; nothing is written when empty.
  std::optional<std::filesystem::path> output_dir;
  /// Replaces the sampled ensemble.
  std::optional<MarkerEnsemble> ensemble;
};

struct RunResult {
  RunResult(FocusingParams p, RunConfig rc) : params(std::move(p)), run(std::move(rc)) {}

  FocusingParams params;
  RunConfig run;
  std::vector<DiagnosticsRecord> records;
  std::vector<FieldSample> samples;
  InitialDensityReport initial_density;
  InitialFieldReport initial_fields;
  double exact_mass = 0.0;
  double mass0 = 0.0;
  std::size_t markers = 0;
  double K = 0.0;   // max rho over the run
  double K1 = 0.0;  // max phidot0 over markers
  double m_eff = 0.0;
  double m_initial = 0.0;  // field budget at t = 0
  double horizon = 0.0;    // planned stop time
  double mean_r0 = 0.0, mean_rdot0 = 0.0, mean_phidot0 = 0.0;
  bool overshoot = false;
  std::string stop_reason;
  double cutoff_d1 = 0.0;
  double wall_seconds = 0.0;
};

/// Runs the coupled particle/field loop under the configured horizon policy.
RunResult run(const Config& config, const RunOptions& options = {});

struct Check {
  std::string name;
  bool asserted = true;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
};

struct FinalReport {
  std::size_t star_index = 0;
  double t_star = 0.0;
  double r_sup_star = 0.0;
  double rho_max0 = 0.0, rho_max_star = 0.0, rho_inner_star = 0.0;
  double Er_max0 = 0.0, Er_max_star = 0.0, Er_inner_star = 0.0;
  double growth_rho = 0.0, growth_Er = 0.0;
  double pigeonhole = 0.0;  // M / (pi r_sup^2)
  double first_flip_t = -1.0;
  TrajectoryEnvelope envelope;
  double envelope_radius = 0.0;  // sqrt(B/A) with m_eff
  std::vector<Check> checks;

  bool asserted_pass() const;
  const Check& check(const std::string& name) const;
};

FinalReport final_report(const RunResult& result);

/// Growth table: initial C1 norms against eta, the inner growth
/// lower bounds, the support window and the enclosed-charge field.
std::vector<Check> theorem_report(const RunResult& result, const FinalReport& fr);

FieldBoundReport field_bounds(const RunResult& result);

/// report.json content for a finished run.
std::string report_json(const RunResult& result, const FinalReport& fr,
                        const std::vector<Check>& theorem, const FieldBoundReport& bounds);

struct SweepRow {
  double epsilon = 0.0;
  bool ok = false;
  std::string error;
  double t_star = 0.0, r_sup_star = 0.0;
  double growth_rho = 0.0, growth_Er = 0.0;
  double r_sup_scaled = 0.0;  // r_sup / eps^(l-k)
  double t_star_scaled = 0.0; // t* / eps^(2l-k)
  std::size_t failed_checks = 0;
};

std::vector<SweepRow> sweep(const Config& config, const std::vector<double>& epsilons);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Summary recomputed from diag.csv alone.
struct DiagSummary {
  std::size_t rows = 0;
  double t_star = 0.0, r_sup_star = 0.0;
  double growth_rho = 0.0, growth_Er = 0.0;
  double max_mass_drift = 0.0;   // |mass - mass0|
  double max_charge_error = 0.0; // |charge - mass| / mass
  double max_gauss_ratio = 0.0;
  bool pass = false;
};

DiagSummary summarize_diag(const std::vector<DiagnosticsRecord>& records);

}  // namespace vmfocus
