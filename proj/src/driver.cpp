#include "vmfocus/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "vmfocus/fields.hpp"
#include "vmfocus/particles.hpp"

namespace vmfocus {

namespace {

using std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void write_snapshot(const std::filesystem::path& path, const RadialGrid& g) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "r,rho,j_r,j_phi,E_r,E_phi,B\n" << std::setprecision(17);
  for (std::size_t j = 0; j < g.size(); ++j)
    os << g.node(j) << ',' << g.rho[j] << ',' << g.j_r[j] << ',' << g.j_phi[j] << ',' << g.E_r[j]
       << ',' << g.E_phi[j] << ',' << g.B[j] << '\n';
}

struct Recorder {
  const FocusingParams& p;
  double mass0;
  const std::vector<double>& L0;
  double claim_scale;

  DiagnosticsRecord operator()(std::size_t step, double t, const MarkerEnsemble& e,
                               const RadialGrid& g, const std::vector<double>& E_amp,
                               int substeps) const {
    DiagnosticsRecord d;
    d.step = step;
    d.t = t;
    d.mass = e.total_weight();
    d.charge = deposited_charge(g);
    d.substeps = substeps;
    const double eps0 = p.eps0();
    double amp_gap = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double r = g.node(j);
      const double er = std::abs(g.E_r[j]);
      d.rho_max = std::max(d.rho_max, g.rho[j]);
      d.Er_max = std::max(d.Er_max, er);
      if (r <= eps0) {
        d.rho_max_inner = std::max(d.rho_max_inner, g.rho[j]);
        d.Er_max_inner = std::max(d.Er_max_inner, er);
      }
      d.Ephi_max = std::max(d.Ephi_max, std::abs(g.E_phi[j]));
      d.B_max = std::max(d.B_max, std::abs(g.B[j]));
      if (j > 0) {
        d.gauss_ratio = std::max(d.gauss_ratio, 2.0 * pi * r * er / mass0);
        const double pair = std::hypot(g.E_phi[j], g.B[j]);
        d.field_budget = std::max(d.field_budget, 3.0 * r * std::hypot(g.E_r[j], pair));
        if (r <= 10.0) d.claim_ratio = std::max(d.claim_ratio, r * pair / claim_scale);
      }
      amp_gap = std::max(amp_gap, std::abs(E_amp[j] - g.E_r[j]));
    }
    d.ampere_gap = d.Er_max > 0.0 ? amp_gap / d.Er_max : 0.0;
    const auto [lo, hi] = support_extent(e);
    d.r_min = lo;
    d.r_sup = hi;
    d.Er_at_rsup = interpolate(g.E_r, g.dr(), hi);
    d.rdot_max = -kInf;
    d.L_ratio_max = -kInf;
    for (std::size_t i = 0; i < e.size(); ++i) {
      d.rdot_max = std::max(d.rdot_max, e.rdot[i]);
      if (L0[i] > 0.0) d.L_ratio_max = std::max(d.L_ratio_max, e.L[i] / L0[i]);
    }
    d.cone_ratio = t > 0.0 ? lo / t : kInf;
    return d;
  }
};

}  // namespace

RunResult run(const Config& config, const RunOptions& options) {
  const auto wall0 = std::chrono::steady_clock::now();
  const FocusingParams& p = config.params;
  const RunConfig& rc = config.run;
  RunResult res(p, rc);

  const InitialData data(p, rc.h_width);
  res.cutoff_d1 = data.chi().d1();
  res.exact_mass = data.exact_mass();
  MarkerEnsemble e = options.ensemble ? *options.ensemble
                                      : sample_markers(data, rc.markers, rc.seed, rc.jitter);
  if (e.empty()) throw ConfigError("empty marker ensemble");
  res.markers = e.size();
  const std::vector<double> L0 = e.L;
  res.mass0 = e.total_weight();

  double wsum = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double w = e.weight[i];
    const double phidot = e.L[i] / (e.r[i] * e.r[i]);
    wsum += w;
    res.mean_r0 += w * e.r[i];
    res.mean_rdot0 += w * e.rdot[i];
    res.mean_phidot0 += w * phidot;
    res.K1 = std::max(res.K1, std::abs(phidot));
  }
  res.mean_r0 /= wsum;
  res.mean_rdot0 /= wsum;
  res.mean_phidot0 /= wsum;

  RadialGrid grid(rc.dr, rc.r_max);
  const double dt = rc.dt();
  const double eps_alpha = p.pow_eps(p.alpha());
  const double cap = rc.max_horizon_factor * p.focus_time();
  rc.validate(cap);

  if (options.ensemble) {
    deposit(e, grid);
    res.initial_density.deposited_charge = deposited_charge(grid);
    res.initial_density.rho_max = *std::max_element(grid.rho.begin(), grid.rho.end());
    res.initial_density.c1_norm = c1_norm(grid.rho, grid.dr());
  } else {
    res.initial_density = initial_density(e, data, grid);
  }
  const InitialFieldProfile profile(rc.field_mode, eps_alpha);
  res.initial_fields = initial_fields(grid, profile, eps_alpha);
  fields_from_P(grid);

  std::vector<double> S(grid.size()), S_new(grid.size());
  characteristic_source(grid, S);
  CharacteristicStepper stepper(grid, [&profile](double x) { return profile.P_minus(x); });
  std::vector<double> E_amp = grid.E_r;
  std::vector<double> jr_old(grid.size());

  const Recorder record{p, res.mass0, L0, 24.0 * p.pow_eps(p.alpha() - 4.0 * p.k() - p.l())};
  auto keep = [&](const RadialGrid& g, double t) {
    res.samples.push_back(FieldSample{t, g.E_r, g.E_phi, g.B});
    res.K = std::max(res.K, *std::max_element(g.rho.begin(), g.rho.end()));
  };

  std::optional<std::filesystem::path> snap_dir;
  if (options.output_dir && rc.snapshot_every > 0) {
    snap_dir = *options.output_dir / "snapshots";
    std::filesystem::create_directories(*snap_dir);
  }
  auto snapshot = [&](std::size_t step) {
    if (!snap_dir) return;
    std::ostringstream name;
    name << "step_" << std::setw(6) << std::setfill('0') << step << ".csv";
    write_snapshot(*snap_dir / name.str(), grid);
  };
  TrajectoryLog traj(options.output_dir ? rc.trajectory_stride : 0);

  res.records.push_back(record(0, 0.0, e, grid, E_amp, 0));
  keep(grid, 0.0);
  snapshot(0);
  traj.record(0.0, e);
  res.m_initial = res.records[0].field_budget;

  HorizonPolicy policy = rc.horizon_policy;
  res.horizon = cap;
  if (policy == HorizonPolicy::PaperT && p.paper_time() > 0.0) {
    res.horizon = std::min(cap, p.paper_time());
  } else if (policy != HorizonPolicy::MinSupport) {
    const auto env =
        envelope_coeffs(std::min(res.mean_r0, 1.0), std::min(res.mean_rdot0, -1e-300),
                        std::max(res.mean_phidot0, 1e-300), std::max(res.m_initial, 1e-300));
    if (env.valid()) {
      res.horizon = std::min(cap, env.s_m);
      policy = HorizonPolicy::EnvelopeSm;
    } else {
      policy = HorizonPolicy::MinSupport;
    }
  }

  std::size_t best = 0;
  const FieldSnapshot vacuum = FieldSnapshot::zero(grid.dr(), grid.r_max());
  for (std::size_t step = 1;; ++step) {
    const double t = dt * static_cast<double>(step);
    const int sub = rc.substeps > 0 ? rc.substeps : adaptive_substeps(e, dt, grid.dr());
    jr_old = grid.j_r;
    try {
      if (rc.fields_off) {
        push(e, vacuum, dt, sub);
      } else {
        push(e, FieldSnapshot(grid), dt, sub);
      }
    } catch (const AxisCrossing& ex) {
      res.overshoot = true;
      res.stop_reason = std::string("overshoot: ") + ex.what();
      break;
    }
    deposit(e, grid);
    stepper.step_coupled(grid, S, S_new);
    std::swap(S, S_new);
    gauss_Er(grid);
    fields_from_P(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) E_amp[j] -= dt * 0.5 * (jr_old[j] + grid.j_r[j]);

    res.records.push_back(record(step, t, e, grid, E_amp, sub));
    keep(grid, t);
    traj.record(t, e);
    if (rc.snapshot_every > 0 && step % static_cast<std::size_t>(rc.snapshot_every) == 0)
      snapshot(step);

    if (res.records.back().r_sup < res.records[best].r_sup) best = res.records.size() - 1;
    if (t >= cap - 1e-12 * dt) {
      res.stop_reason = "horizon cap";
      break;
    }
    if (policy == HorizonPolicy::MinSupport) {
      if (res.records.size() - 1 - best >= 3) {
        res.stop_reason = "past support minimum";
        break;
      }
    } else if (t >= res.horizon - 1e-12 * dt) {
      res.stop_reason = std::string(to_string(policy)) + " horizon";
      break;
    }
  }
  if (policy == HorizonPolicy::MinSupport) res.horizon = res.records.back().t;
  if (rc.snapshot_every > 0 && res.records.back().step % rc.snapshot_every != 0)
    snapshot(res.records.back().step);
  if (traj.enabled()) {
    std::ofstream os(*options.output_dir / "trajectories.csv");
    traj.write_csv(os);
  }

  for (const auto& d : res.records) res.m_eff = std::max(res.m_eff, d.field_budget);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return res;
}

// ---------------------------------------------------------------------------

bool FinalReport::asserted_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return !c.asserted || c.pass; });
}

const Check& FinalReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no check named " + name);
}

FinalReport final_report(const RunResult& res) {
  const auto& recs = res.records;
  if (recs.empty()) throw std::logic_error("final_report: no records");
  const auto& p = res.params;
  FinalReport fr;
  for (std::size_t i = 0; i < recs.size(); ++i)
    if (recs[i].r_sup < recs[fr.star_index].r_sup) fr.star_index = i;
  const auto& s = recs[fr.star_index];
  const auto& z = recs.front();
  fr.t_star = s.t;
  fr.r_sup_star = s.r_sup;
  fr.rho_max0 = z.rho_max;
  fr.rho_max_star = s.rho_max;
  fr.rho_inner_star = s.rho_max_inner;
  fr.Er_max0 = z.Er_max;
  fr.Er_max_star = s.Er_max;
  fr.Er_inner_star = s.Er_max_inner;
  fr.growth_rho = s.rho_max / z.rho_max;
  fr.growth_Er = s.Er_max / z.Er_max;
  fr.pigeonhole = res.mass0 / (pi * s.r_sup * s.r_sup);
  for (const auto& d : recs)
    if (!d.claim3()) {
      fr.first_flip_t = d.t;
      break;
    }

  auto add = [&](std::string name, bool asserted, bool pass, double measured, double threshold) {
    fr.checks.push_back({std::move(name), asserted, pass, measured, threshold});
  };

  add("no_overshoot", true, !res.overshoot, res.overshoot ? 1.0 : 0.0, 0.0);
  add("growth_rho", true, fr.growth_rho >= 5.0, fr.growth_rho, 5.0);
  add("pigeonhole", true, s.rho_max >= 0.75 * fr.pigeonhole, s.rho_max, 0.75 * fr.pigeonhole);
  const double lo = 0.25 * p.focus_radius(), hi = 200.0 * p.focus_radius();
  add("r_sup_window", true, s.r_sup >= lo && s.r_sup <= hi, s.r_sup, lo);
  const double gauss_target = 0.9 * res.mass0 / (2.0 * pi * s.r_sup);
  add("Er_at_r_sup", true, s.Er_at_rsup >= gauss_target, s.Er_at_rsup, gauss_target);

  const double r0 = std::min(res.mean_r0, 1.0);
  fr.envelope = envelope_coeffs(r0, res.mean_rdot0, res.mean_phidot0, res.m_eff);
  fr.envelope_radius = fr.envelope.valid() ? std::sqrt(fr.envelope.minimum()) : 0.0;
  const double env_ratio = fr.envelope.valid() ? s.r_sup / fr.envelope_radius : kInf;
  add("envelope_flags", true, fr.envelope.valid(), fr.envelope.valid() ? 1.0 : 0.0, 1.0);
  add("envelope_factor3", true, env_ratio <= 3.0 && env_ratio >= 1.0 / 3.0, env_ratio, 3.0);
  const double h_ratio = fr.envelope.valid() ? fr.t_star / fr.envelope.s_m : kInf;
  add("horizon_consistency", true, h_ratio <= 2.0 && h_ratio >= 0.5, h_ratio, 2.0);

  bool mass_exact = true;
  double charge_err = 0.0, gauss = 0.0;
  for (const auto& d : recs) {
    mass_exact = mass_exact && d.mass == res.mass0;
    charge_err = std::max(charge_err, std::abs(d.charge - d.mass) / d.mass);
    gauss = std::max(gauss, d.gauss_ratio);
  }
  add("mass_exact", true, mass_exact, mass_exact ? 0.0 : 1.0, 0.0);
  add("charge_match", true, charge_err <= 1e-12, charge_err, 1e-12);
  add("gauss_bound", true, gauss <= 1.0 + 1e-10, gauss, 1.0 + 1e-10);

  bool inward = true;
  double cone = kInf, L_ratio = 0.0, field_ratio = 0.0, claim1 = 0.0;
  for (const auto& d : recs) {
    if (d.t < fr.t_star && !d.claim3()) inward = false;
    cone = std::min(cone, d.cone_ratio);
    L_ratio = std::max(L_ratio, d.L_ratio_max);
    claim1 = std::max(claim1, d.claim_ratio);
    // The budget includes E_r, so r|(E_phi, B)| <= m_eff/3 is implied; the
    // ratio is still measured from the recorded claim column.
    field_ratio = std::max(field_ratio, d.claim_ratio * 24.0 *
                                            p.pow_eps(p.alpha() - 4.0 * p.k() - p.l()) /
                                            (res.m_eff / 3.0));
  }
  add("claim_inward", true, inward, inward ? 0.0 : 1.0, 0.0);
  add("claim_cone_6t", true, cone >= 6.0, cone, 6.0);
  add("claim_cone_10t", false, cone >= 10.0, cone, 10.0);
  add("claim_cone_100t", false, cone >= 100.0, cone, 100.0);
  add("claim_angular", true, L_ratio <= 4.0 / 3.0, L_ratio, 4.0 / 3.0);
  add("claim_field_meff", true, field_ratio <= 1.0, field_ratio, 1.0);
  add("claim_field_24", true, claim1 <= 1.0, claim1, 1.0);
  const double flip_gap =
      fr.first_flip_t < 0.0 ? 0.0 : (fr.first_flip_t - fr.t_star) / res.run.dt();
  add("monotone_focusing", false, fr.first_flip_t < 0.0 || std::abs(flip_gap) <= 2.0 + 1e-9,
      flip_gap, 2.0);
  return fr;
}

std::vector<Check> theorem_report(const RunResult& res, const FinalReport& fr) {
  const auto& p = res.params;
  const auto conds = smallness_conditions(p, res.cutoff_d1);
  auto holds = [&](const std::string& name) {
    for (const auto& c : conds)
      if (c.name == name) return c.holds;
    return false;
  };
  const bool t_positive = p.paper_time() > 0.0;
  const double eta = p.eta();
  std::vector<Check> out;
  auto add = [&](std::string name, bool asserted, bool pass, double measured, double threshold) {
    out.push_back({std::move(name), asserted, pass, measured, threshold});
  };
  const double rho_c1 = res.initial_density.c1_norm;
  add("rho0_c1_eta", holds("rho0_c1"), rho_c1 <= eta, rho_c1, eta);
  const double e_c1 = std::max(res.initial_fields.Er_c1, res.initial_fields.field_c1);
  add("E0_c1_eta", holds("er0_c1"), e_c1 <= eta, e_c1, eta);
  add("B0_c1_eta", holds("seed_field"), res.initial_fields.B_c1 <= eta, res.initial_fields.B_c1,
      eta);
  const double rho_lb = p.pow_eps(p.alpha() - 2.0 * p.l() + 2.0 * p.k()) / 640000.0;
  add("rho_inner_lower", t_positive, fr.rho_inner_star >= rho_lb, fr.rho_inner_star, rho_lb);
  const double er_lb = p.pow_eps(p.alpha() - p.l() + p.k()) / 6400.0;
  add("Er_inner_lower", t_positive, fr.Er_inner_star >= er_lb, fr.Er_inner_star, er_lb);
  add("rho_inner_N", t_positive && holds("rho_growth"), fr.rho_inner_star >= p.big_n(),
      fr.rho_inner_star, p.big_n());
  add("Er_inner_N", t_positive && holds("er_growth"), fr.Er_inner_star >= p.big_n(),
      fr.Er_inner_star, p.big_n());
  const double lo = 0.25 * p.focus_radius();
  const double hi = 200.0 * p.focus_radius();
  add("r_sup_window", true, fr.r_sup_star >= lo && fr.r_sup_star <= hi, fr.r_sup_star, lo);
  const auto& er = fr.check("Er_at_r_sup");
  add("Er_at_r_sup", true, er.pass, er.measured, er.threshold);
  return out;
}

FieldBoundReport field_bounds(const RunResult& res) {
  const auto& p = res.params;
  FieldBoundInput in;
  in.dr = res.run.dr;
  in.M = res.mass0;
  in.K = res.K;
  in.K1 = res.K1;
  in.T1 = res.records.back().t;
  in.initial_field_norm = res.initial_fields.field_sup;
  in.claim_scale = 24.0 * p.pow_eps(p.alpha() - 4.0 * p.k() - p.l());
  return check_field_bounds(res.samples, in);
}

std::string report_json(const RunResult& res, const FinalReport& fr,
                        const std::vector<Check>& theorem, const FieldBoundReport& bounds) {
  using nlohmann::json;
  const auto& p = res.params;
  json j;
  j["parameters"] = {{"epsilon", p.epsilon()}, {"k", p.k()},         {"l", p.l()},
                     {"alpha", p.alpha()},     {"eta", p.eta()},     {"big_n", p.big_n()},
                     {"eps0", p.eps0()},       {"m", p.m()},         {"T_paper", p.paper_time()},
                     {"dr", res.run.dr},       {"r_max", res.run.r_max},
                     {"markers", res.markers}, {"seed", res.run.seed},
                     {"h_width", res.run.h_width},
                     {"horizon_policy", std::string(to_string(res.run.horizon_policy))},
                     {"field_mode", std::string(to_string(res.run.field_mode))}};
  j["run"] = {{"mass", res.mass0},
              {"exact_mass", res.exact_mass},
              {"K", res.K},
              {"K1", res.K1},
              {"m_eff", res.m_eff},
              {"m_initial", res.m_initial},
              {"horizon", res.horizon},
              {"stop_reason", res.stop_reason},
              {"overshoot", res.overshoot},
              {"records", res.records.size()},
              {"wall_seconds", res.wall_seconds},
              {"mean_initial", {res.mean_r0, res.mean_rdot0, res.mean_phidot0}},
              {"rho0_shape_constant", res.initial_density.shape_constant},
              {"rho0_c1", res.initial_density.c1_norm}};
  j["final"] = {{"t_star", fr.t_star},
                {"r_sup_star", fr.r_sup_star},
                {"rho_max0", fr.rho_max0},
                {"rho_max_star", fr.rho_max_star},
                {"rho_inner_star", fr.rho_inner_star},
                {"Er_max0", fr.Er_max0},
                {"Er_max_star", fr.Er_max_star},
                {"Er_inner_star", fr.Er_inner_star},
                {"growth_rho", fr.growth_rho},
                {"growth_Er", fr.growth_Er},
                {"pigeonhole", fr.pigeonhole},
                {"first_flip_t", fr.first_flip_t},
                {"envelope_radius", fr.envelope_radius},
                {"envelope_s_m", fr.envelope.s_m}};
  auto dump = [](const std::vector<Check>& cs) {
    json a = json::object();
    for (const auto& c : cs)
      a[c.name] = {{"asserted", c.asserted},
                   {"pass", c.pass},
                   {"measured", c.measured},
                   {"threshold", c.threshold}};
    return a;
  };
  j["checks"] = dump(fr.checks);
  j["theorem"] = dump(theorem);
  j["field_bounds"] = json::parse(bounds.to_json());
  json sc = json::object();
  for (const auto& c : smallness_conditions(p, res.cutoff_d1))
    sc[c.name] = {{"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}};
  j["smallness"] = sc;
  bool pass = fr.asserted_pass() && bounds.asserted_pass();
  for (const auto& c : theorem) pass = pass && (!c.asserted || c.pass);
  j["pass"] = pass;
  return j.dump(2);
}

// ---------------------------------------------------------------------------

std::vector<SweepRow> sweep(const Config& config, const std::vector<double>& epsilons) {
  std::vector<SweepRow> rows;
  for (double eps : epsilons) {
    SweepRow row;
    row.epsilon = eps;
    try {
      Config c{config.params.with_epsilon(eps), config.run};
      const auto res = run(c);
      const auto fr = final_report(res);
      row.t_star = fr.t_star;
      row.r_sup_star = fr.r_sup_star;
      row.growth_rho = fr.growth_rho;
      row.growth_Er = fr.growth_Er;
      row.r_sup_scaled = fr.r_sup_star / c.params.focus_radius();
      row.t_star_scaled = fr.t_star / c.params.focus_time();
      for (const auto& ch : fr.checks) row.failed_checks += ch.asserted && !ch.pass;
      row.ok = true;
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "epsilon,ok,t_star,r_sup_star,growth_rho,growth_Er,r_sup_scaled,t_star_scaled,"
        "failed_checks,error\n"
     << std::setprecision(17);
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << r.epsilon << ',' << (r.ok ? 1 : 0) << ',' << r.t_star << ',' << r.r_sup_star << ','
       << r.growth_rho << ',' << r.growth_Er << ',' << r.r_sup_scaled << ',' << r.t_star_scaled
       << ',' << r.failed_checks << ',' << err << '\n';
  }
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& diag_columns() {
  static const std::vector<std::string> cols = {
      "step",        "t",           "mass",        "charge",       "rho_max",
      "rho_max_inner", "Er_max",    "Er_max_inner", "Ephi_max",    "B_max",
      "r_min",       "r_sup",       "rdot_max",    "gauss_ratio",  "Er_at_rsup",
      "L_ratio_max", "cone_ratio",  "field_budget", "claim_ratio", "ampere_gap",
      "substeps",    "claim1",      "claim2_6t",   "claim2_10t",   "claim2_100t",
      "claim3"};
  return cols;
}

void write_diag_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records) {
  const auto& cols = diag_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n' << std::setprecision(17);
  for (const auto& d : records) {
    os << d.step << ',' << d.t << ',' << d.mass << ',' << d.charge << ',' << d.rho_max << ','
       << d.rho_max_inner << ',' << d.Er_max << ',' << d.Er_max_inner << ',' << d.Ephi_max << ','
       << d.B_max << ',' << d.r_min << ',' << d.r_sup << ',' << d.rdot_max << ','
       << d.gauss_ratio << ',' << d.Er_at_rsup << ',' << d.L_ratio_max << ',' << d.cone_ratio
       << ',' << d.field_budget << ',' << d.claim_ratio << ',' << d.ampere_gap << ','
       << d.substeps << ',' << d.claim1() << ',' << d.claim2(6.0) << ',' << d.claim2(10.0) << ','
       << d.claim2(100.0) << ',' << d.claim3() << '\n';
  }
}

std::vector<DiagnosticsRecord> read_diag_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("diag.csv: empty file");
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string c;
    while (std::getline(hs, c, ',')) header.push_back(c);
  }
  if (header != diag_columns()) throw std::runtime_error("diag.csv: header does not match schema");
  std::vector<DiagnosticsRecord> out;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> v;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw std::runtime_error("diag.csv: malformed value in row " + std::to_string(row));
      }
    }
    if (v.size() != header.size())
      throw std::runtime_error("diag.csv: wrong column count in row " + std::to_string(row));
    DiagnosticsRecord d;
    std::size_t k = 0;
    d.step = static_cast<std::size_t>(v[k++]);
    for (double* f : {&d.t, &d.mass, &d.charge, &d.rho_max, &d.rho_max_inner, &d.Er_max,
                      &d.Er_max_inner, &d.Ephi_max, &d.B_max, &d.r_min, &d.r_sup, &d.rdot_max,
                      &d.gauss_ratio, &d.Er_at_rsup, &d.L_ratio_max, &d.cone_ratio,
                      &d.field_budget, &d.claim_ratio, &d.ampere_gap})
      *f = v[k++];
    d.substeps = static_cast<int>(v[k++]);
    out.push_back(d);
  }
  return out;
}

DiagSummary summarize_diag(const std::vector<DiagnosticsRecord>& recs) {
  DiagSummary s;
  s.rows = recs.size();
  if (recs.empty()) return s;
  std::size_t best = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].r_sup < recs[best].r_sup) best = i;
    s.max_mass_drift = std::max(s.max_mass_drift, std::abs(recs[i].mass - recs[0].mass));
    s.max_charge_error =
        std::max(s.max_charge_error, std::abs(recs[i].charge - recs[i].mass) / recs[i].mass);
    s.max_gauss_ratio = std::max(s.max_gauss_ratio, recs[i].gauss_ratio);
  }
  s.t_star = recs[best].t;
  s.r_sup_star = recs[best].r_sup;
  s.growth_rho = recs[0].rho_max > 0.0 ? recs[best].rho_max / recs[0].rho_max : 0.0;
  s.growth_Er = recs[0].Er_max > 0.0 ? recs[best].Er_max / recs[0].Er_max : 0.0;
  s.pass = s.max_mass_drift == 0.0 && s.max_charge_error <= 1e-12 &&
           s.max_gauss_ratio <= 1.0 + 1e-10;
  return s;
}

}  // namespace vmfocus
