// One PASS/FAIL line per acceptance criterion; exit status 1 if any failed.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "vmfocus/bounds.hpp"
#include "vmfocus/driver.hpp"
#include "vmfocus/fields.hpp"
#include "vmfocus/initdata.hpp"
#include "vmfocus/particles.hpp"

using namespace vmfocus;

namespace {

int failures = 0;

void line(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  %-28s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Config focusing_config() {
  Config c = parse_config(R"({"epsilon": 0.05, "k": 0.01, "l": 0.6, "alpha": 0.045})");
  c.run.markers = 200000;
  c.run.dr = 1e-3;
  c.run.horizon_policy = HorizonPolicy::MinSupport;
  return c;
}

void focusing_and_claims() {
  const Config cfg = focusing_config();
  const RunResult res = run(cfg);
  const FinalReport fr = final_report(res);
  const auto ck = [&](const char* n) { return fr.check(n); };

  const bool focus = ck("growth_rho").pass && ck("r_sup_window").pass &&
                     ck("envelope_factor3").pass && ck("Er_at_r_sup").pass && ck("envelope_flags").pass;
  line("focusing_run", focus && res.wall_seconds <= 120.0,
       fmt("markers %zu t* %.4f growth %.2f (pigeonhole %.2f) r_sup %.4f in [%.4f, %.3f], "
           "envelope ratio %.3f, E_r(r_sup) %.4f >= %.4f, wall %.1f s",
           res.markers, fr.t_star, fr.growth_rho, fr.pigeonhole / fr.rho_max0, fr.r_sup_star,
           0.25 * res.params.focus_radius(), 200.0 * res.params.focus_radius(),
           ck("envelope_factor3").measured, ck("Er_at_r_sup").measured,
           ck("Er_at_r_sup").threshold, res.wall_seconds));

  line("mass_conservation", ck("mass_exact").pass && ck("charge_match").pass,
       fmt("weight drift %g, max charge mismatch %.2e over %zu records", ck("mass_exact").measured,
           ck("charge_match").measured, res.records.size()));
  line("gauss_bound", ck("gauss_bound").pass,
       fmt("max 2 pi r E_r / M = %.15f", ck("gauss_bound").measured));

  line("claim_inward", ck("claim_inward").pass, "rdot < 0 for all markers before t*");
  line("claim_cone_6t", ck("claim_cone_6t").pass,
       fmt("min r/t = %.3f (10t: %s)", ck("claim_cone_6t").measured,
           ck("claim_cone_10t").pass ? "holds" : "violated"));
  line("claim_angular", ck("claim_angular").pass,
       fmt("max r^2 phidot / r0^2 phidot0 = %.6f", ck("claim_angular").measured));
  line("claim_field_meff", ck("claim_field_meff").pass,
       fmt("max 3 r |(E_phi, B)| / m_eff = %.4f, m_eff %.4f", ck("claim_field_meff").measured,
           res.m_eff));
}

void initial_data_suite() {
  const FocusingParams p(0.05, 0.01, 0.6, 0.045);
  const InitialData data(p, 0.01);
  const double ea = p.pow_eps(p.alpha());
  const double pi = std::numbers::pi;
  const MarkerEnsemble e = sample_markers(data, 200000, 1);
  RadialGrid g(1e-3, 2.0);
  const auto dens = initial_density(e, data, g);
  const InitialFieldProfile prof(FieldMode::Seeded, ea);
  initial_fields(g, prof, ea);

  const double M = e.total_weight();
  line("init_mass_range", M >= pi / 16.0 * ea && M <= 2.0 * pi * ea,
       fmt("M = %.10f in [%.4f, %.4f]", M, pi / 16.0 * ea, 2.0 * pi * ea));
  line("init_rho_sup", dens.rho_max <= 2.0 * pi * ea,
       fmt("sup rho = %.4f <= %.4f", dens.rho_max, 2.0 * pi * ea));
  const double c1_bound = 0.5 * ea * data.chi().d1() * 1.1;
  line("init_rho_c1", dens.c1_norm <= c1_bound,
       fmt("C1 = %.4f vs %.4f (d1 = %.4f)", dens.c1_norm, c1_bound, data.chi().d1()));
  double er_inner = 0.0;
  for (std::size_t j = 0; j < g.size() && g.node(j) <= 0.5; ++j)
    er_inner = std::max(er_inner, std::abs(g.E_r[j]));
  line("init_Er_inner_zero", er_inner == 0.0, fmt("max |E_r| on r <= 1/2: %g", er_inner));
  double seeded = 0.0;
  for (std::size_t j = 1; j < g.size(); ++j)
    seeded = std::max(seeded, std::hypot(g.E_phi[j], g.B[j]) * g.node(j) / (ea / 200.0));
  line("init_seeded_field", seeded <= 1.0,
       fmt("max r |(E_phi, B)| / (eps^alpha / 200) = %.4f", seeded));
}

void adversarial_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_envelope_suite(100, 20, 2024);
  const double wall = seconds_since(t0);
  line("envelope_adversarial", r.violations == 0 && r.trials == 2000 && wall <= 180.0,
       fmt("%zu tuples x 20 draws, violations %zu, angular %zu, unconverged %zu, worst excess "
           "%.3e, wall %.1f s",
           r.tuples, r.violations, r.angular_violations, r.invalid, r.worst_excess, wall));
}

void oracle_equivalence() {
  const auto v = verify_field_solver(1e-3, 2.0, 64);
  double worst = 0.0;
  for (const auto& c : v.cases) worst = std::max(worst, c.relative());
  line("field_oracle", v.pass(),
       fmt("%zu sources x 64 steps, worst relative %.2e, vacuum advection %.2e", v.cases.size(),
           worst, v.advection_error));
}

void free_streaming() {
  const FocusingParams p(0.05, 0.01, 0.6, 0.045);
  const InitialData data(p, 0.01);
  const MarkerEnsemble start = sample_markers(data, 1000, 1, true);
  const double dt = 1e-3;
  const int steps = static_cast<int>(std::ceil(p.focus_time() / dt));
  const FieldSnapshot zero = FieldSnapshot::zero(1e-3, 2.0);
  auto error = [&](int substeps) {
    MarkerEnsemble e = start;
    for (int n = 0; n < steps; ++n) push(e, zero, dt, substeps);
    double err = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i)
      err = std::max(err, std::abs(e.r[i] - free_streaming_radius(start.r[i], start.rdot[i],
                                                                  start.L[i], dt * steps)));
    return err;
  };
  const int nominal = adaptive_substeps(start, dt, 1e-3);
  const double err = error(nominal);
  // least-squares slope of log(error) against log(substeps) over 4..64
  std::vector<double> xs, ys;
  std::string errs;
  for (int s = 4; s <= 64; s *= 2) {
    const double e = error(s);
    xs.push_back(std::log2(static_cast<double>(s)));
    ys.push_back(std::log2(e));
    errs += fmt(" %.2e", e);
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double order = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  line("free_streaming", err <= 1e-8 && order >= 3.7,
       fmt("%zu markers to t = %.4f, error %.2e at %d substeps, observed order %.2f over 4..64 "
           "substeps (errors%s)",
           start.size(), dt * steps, err, nominal, order, errs.c_str()));
}

void scaling_collapse() {
  Config cfg = focusing_config();
  cfg.run.markers = 50000;
  const auto rows = sweep(cfg, {0.1, 0.05, 0.025});
  double rlo = INFINITY, rhi = 0.0, tlo = INFINITY, thi = 0.0;
  bool ok = true;
  std::string detail;
  for (const auto& r : rows) {
    ok = ok && r.ok;
    rlo = std::min(rlo, r.r_sup_scaled);
    rhi = std::max(rhi, r.r_sup_scaled);
    tlo = std::min(tlo, r.t_star_scaled);
    thi = std::max(thi, r.t_star_scaled);
    detail += fmt("eps %.3f: r/eps^(l-k) %.3f t/eps^(2l-k) %.3f%s; ", r.epsilon, r.r_sup_scaled,
                  r.t_star_scaled, r.ok ? "" : (" error " + r.error).c_str());
  }
  line("scaling_collapse", ok && rhi < 2.0 * rlo && thi < 2.0 * tlo,
       detail + fmt("spread %.3f, %.3f", rhi / rlo, thi / tlo));
}

}  // namespace

int main(int argc, char** argv) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::pair<std::string, void (*)()>> groups = {
      {"initial_data", initial_data_suite}, {"oracle", oracle_equivalence},
      {"free_streaming", free_streaming},   {"focusing", focusing_and_claims},
      {"adversarial", adversarial_suite},   {"scaling", scaling_collapse}};
  const std::vector<std::string> only(argv + 1, argv + argc);
  for (const auto& [name, fn] : groups)
    if (only.empty() || std::find(only.begin(), only.end(), name) != only.end()) fn();
  std::printf("%d criteria failed, total %.1f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
