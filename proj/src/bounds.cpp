#include "vmfocus/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace vmfocus {

TrajectoryEnvelope envelope_coeffs(double r0, double rdot0, double phidot0, double m) {
  if (!(r0 > 0.0 && r0 <= 1.0)) throw std::domain_error("envelope: r0 must lie in (0, 1]");
  if (!(rdot0 < 0.0)) throw std::domain_error("envelope: rdot0 must be negative");
  if (!(phidot0 > 0.0)) throw std::domain_error("envelope: phidot0 must be positive");
  if (!(m > 0.0)) throw std::domain_error("envelope: m must be positive");
  TrajectoryEnvelope e;
  e.r0 = r0;
  e.rdot0 = rdot0;
  e.phidot0 = phidot0;
  e.m = m;
  e.C = 0.5 * m * r0 + r0 * r0 * phidot0;
  e.A = rdot0 * rdot0 + e.C * e.C / (r0 * r0) + 2.0 * m * e.C / r0 - 2.0 * m * std::log(r0);
  e.B = 2.0 * m * r0 * e.C + e.C * e.C + 2.0 * m;
  e.angular_ok = r0 * r0 * phidot0 - 0.5 * m * r0 > 0.0;
  e.A_positive = e.A > 0.0;
  e.B_positive = e.B > 0.0;
  e.discriminant_ok = e.A * r0 * r0 - e.B > 0.0;
  e.s_m = e.valid() ? std::sqrt(e.A * r0 * r0 - e.B) / e.A
                    : std::numeric_limits<double>::quiet_NaN();
  return e;
}

EnvelopeValue envelope_eval(const TrajectoryEnvelope& env, double s) {
  if (!env.valid()) throw std::logic_error("envelope_eval: hypothesis flags fail");
  const double b = env.B / (env.r0 * env.r0);
  const double d = env.r0 - std::sqrt(env.A - b) * s;
  return {d * d + b * s * s, s >= 0.0 && s <= env.window()};
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kModes = 3;

// Random smooth field triple, each component bounded by m/(3r). Components
// share the spatial wavenumbers so each stage needs only kModes sincos calls.
class AdversarialField {
public:
  AdversarialField(const TrajectoryEnvelope& env, std::mt19937_64& rng, int kind, bool zero)
      : budget_(env.m / 3.0), zero_(zero), constant_(kind == 0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double T0 = env.window();
    for (int c = 0; c < 3; ++c) sign_[c] = u(rng) < 0.5 ? -1.0 : 1.0;
    for (int k = 0; k < kModes; ++k) kappa_[k] = 6.0 * std::numbers::pi / env.r0 * u(rng);
    for (int c = 0; c < 3; ++c) {
      double norm = 0.0;
      for (int k = 0; k < kModes; ++k) {
        amp_[c][k] = 2.0 * u(rng) - 1.0;
        omega_[c][k] = 6.0 * std::numbers::pi / T0 * u(rng);
        phase_[c][k] = 2.0 * std::numbers::pi * u(rng);
        norm += std::abs(amp_[c][k]);
      }
      for (int k = 0; k < kModes; ++k) amp_[c][k] /= norm;
    }
  }

  // Time factors sin/cos(omega t + phase) at t.
  struct TimePart {
    double s[3][kModes], c[3][kModes];
  };

  void time_part(double t, TimePart& tp) const {
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < kModes; ++k) {
        const double a = omega_[c][k] * t + phase_[c][k];
        tp.s[c][k] = std::sin(a);
        tp.c[c][k] = std::cos(a);
      }
  }

  // Advances tp by dt given the rotation table from set_step.
  void advance(TimePart& tp) const {
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < kModes; ++k) {
        const double s = tp.s[c][k], co = tp.c[c][k];
        tp.s[c][k] = s * rot_c_[c][k] + co * rot_s_[c][k];
        tp.c[c][k] = co * rot_c_[c][k] - s * rot_s_[c][k];
      }
  }

  void set_step(double dt) {
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < kModes; ++k) {
        rot_s_[c][k] = std::sin(omega_[c][k] * dt);
        rot_c_[c][k] = std::cos(omega_[c][k] * dt);
      }
  }

  void eval(const TimePart& tp, double r, double out[3]) const {
    if (zero_) {
      out[0] = out[1] = out[2] = 0.0;
      return;
    }
    const double scale = budget_ / r;
    if (constant_) {
      for (int c = 0; c < 3; ++c) out[c] = sign_[c] * scale;
      return;
    }
    double sk[kModes], ck[kModes];
    for (int k = 0; k < kModes; ++k) {
      sk[k] = std::sin(kappa_[k] * r);
      ck[k] = std::cos(kappa_[k] * r);
    }
    for (int c = 0; c < 3; ++c) {
      double v = 0.0;
      for (int k = 0; k < kModes; ++k) v += amp_[c][k] * (tp.s[c][k] * ck[k] + tp.c[c][k] * sk[k]);
      out[c] = scale * v;
    }
  }

private:
  double budget_;
  bool zero_, constant_;
  double sign_[3];
  double kappa_[kModes];
  double amp_[3][kModes], omega_[3][kModes], phase_[3][kModes];
  double rot_s_[3][kModes] = {}, rot_c_[3][kModes] = {};
};

struct Trajectory {
  std::vector<double> r;  // radius after each completed step
  std::vector<double> L;
  bool hit_axis = false;
};

// Fixed-step RK4 of r'' = L^2/r^3 + E_r + (L/r) B, L' = r E_phi - r rdot B
// until s reaches the window or rdot >= 0.
Trajectory integrate(const TrajectoryEnvelope& env, AdversarialField field, long steps) {
  const double T0 = env.window();
  const double h = T0 / static_cast<double>(steps);
  Trajectory tr;
  tr.r.reserve(static_cast<std::size_t>(steps));
  tr.L.reserve(static_cast<std::size_t>(steps));
  double r = env.r0, v = env.rdot0, L = env.r0 * env.r0 * env.phidot0;
  AdversarialField::TimePart t0, th, t1;
  field.time_part(0.0, t0);
  field.set_step(0.5 * h);
  double F[3];
  auto rhs = [&](const AdversarialField::TimePart& tp, double x, double vv, double l, double& dx,
                 double& dv, double& dl) {
    field.eval(tp, x, F);
    const double w = l / x;
    dx = vv;
    dv = w * w / x + F[0] + w * F[2];
    dl = x * (F[1] - vv * F[2]);
  };
  for (long n = 0; n < steps; ++n) {
    const double t = h * static_cast<double>(n);
    if (n % 1024 == 1023) {
      field.time_part(t + 0.5 * h, th);
      field.time_part(t + h, t1);
    } else {
      th = t0;
      field.advance(th);
      t1 = th;
      field.advance(t1);
    }
    double k1r, k1v, k1l, k2r, k2v, k2l, k3r, k3v, k3l, k4r, k4v, k4l;
    rhs(t0, r, v, L, k1r, k1v, k1l);
    double x = r + 0.5 * h * k1r;
    if (!(x > 0.0)) { tr.hit_axis = true; break; }
    rhs(th, x, v + 0.5 * h * k1v, L + 0.5 * h * k1l, k2r, k2v, k2l);
    x = r + 0.5 * h * k2r;
    if (!(x > 0.0)) { tr.hit_axis = true; break; }
    rhs(th, x, v + 0.5 * h * k2v, L + 0.5 * h * k2l, k3r, k3v, k3l);
    x = r + h * k3r;
    if (!(x > 0.0)) { tr.hit_axis = true; break; }
    rhs(t1, x, v + h * k3v, L + h * k3l, k4r, k4v, k4l);
    const double c = h / 6.0;
    r += c * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
    v += c * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    L += c * (k1l + 2.0 * k2l + 2.0 * k3l + k4l);
    if (!(r > 0.0)) { tr.hit_axis = true; break; }
    tr.r.push_back(r);
    tr.L.push_back(L);
    if (v >= 0.0) break;
    t0 = t1;
  }
  return tr;
}

}  // namespace

AdversarialResult adversarial_envelope_test(const TrajectoryEnvelope& env,
                                            const AdversarialOptions& opt) {
  if (!env.valid()) throw std::logic_error("adversarial_envelope_test: hypothesis flags fail");
  const long steps = std::max<long>(2, std::lround(std::ceil(1.0 / opt.step_fraction / 2.0)) * 2);
  const double T0 = env.window();
  const double h = T0 / static_cast<double>(steps);
  const double L0 = env.r0 * env.r0 * env.phidot0;
  const double band = 0.5 * env.m * env.r0;

  AdversarialResult res;
  res.max_step = h;
  std::mt19937_64 rng(opt.seed);
  for (std::size_t trial = 0; trial < opt.trials; ++trial) {
    ++res.trials;
    const AdversarialField field(env, rng, static_cast<int>(trial % 4), opt.zero_fields);
    const Trajectory fine = integrate(env, field, steps);
    const Trajectory coarse = integrate(env, field, steps / 2);
    if (fine.hit_axis || coarse.hit_axis) {
      ++res.invalid;
      continue;
    }
    double diff = 0.0;
    const std::size_t common = std::min(coarse.r.size(), fine.r.size() / 2);
    for (std::size_t j = 0; j < common; ++j)
      diff = std::max(diff, std::abs(coarse.r[j] - fine.r[2 * j + 1]));
    if (diff > opt.convergence_tolerance * env.r0) {
      ++res.invalid;
      continue;
    }
    bool violated = false, angular = false;
    for (std::size_t n = 0; n < fine.r.size(); ++n) {
      const double s = h * static_cast<double>(n + 1);
      const double bound = envelope_eval(env, s).value;
      const double excess = fine.r[n] * fine.r[n] / bound - 1.0;
      res.worst_excess = std::max(res.worst_excess, excess);
      if (excess > opt.tolerance) violated = true;
      const double slack = 1e-9 * std::abs(L0);
      if (fine.L[n] < L0 - band - slack || fine.L[n] > L0 + band + slack) angular = true;
    }
    res.violations += violated;
    res.angular_violations += angular;
  }
  return res;
}

std::vector<TrajectoryEnvelope> draw_envelope_tuples(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TrajectoryEnvelope> out;
  while (out.size() < count) {
    const double r0 = 0.3 + 0.7 * u(rng);
    const double rdot0 = -200.0 + 180.0 * u(rng);
    const double phidot0 = 1.0 + 19.0 * u(rng);
    const double m = 0.01 + 4.99 * u(rng);
    const auto env = envelope_coeffs(r0, rdot0, phidot0, m);
    if (env.valid()) out.push_back(env);
  }
  return out;
}

EnvelopeSuiteResult run_envelope_suite(std::size_t tuples, std::size_t draws, std::uint64_t seed) {
  const auto envs = draw_envelope_tuples(tuples, seed);
  EnvelopeSuiteResult total;
  std::vector<AdversarialResult> results(envs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(envs.size()); ++i) {
    AdversarialOptions opt;
    opt.trials = draws;
    opt.seed = seed * 1000003ULL + static_cast<std::uint64_t>(i);
    results[i] = adversarial_envelope_test(envs[i], opt);
  }
  for (const auto& r : results) {
    ++total.tuples;
    total.trials += r.trials;
    total.violations += r.violations;
    total.angular_violations += r.angular_violations;
    total.invalid += r.invalid;
    total.worst_excess = std::max(total.worst_excess, r.worst_excess);
  }
  return total;
}

// ---------------------------------------------------------------------------

bool FieldBoundReport::asserted_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const BoundCheck& c) { return !c.asserted || c.pass(); });
}

const BoundCheck& FieldBoundReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no bound check named " + name);
}

std::string FieldBoundReport::to_json() const {
  nlohmann::json j;
  j["M"] = M;
  j["K"] = K;
  j["K1"] = K1;
  j["T1"] = T1;
  j["initial_field_norm"] = initial_field_norm;
  j["claim_scale"] = claim_scale;
  for (const auto& c : checks) {
    j["checks"][c.name] = {{"asserted", c.asserted},  {"pass", c.pass()},
                           {"checked", c.checked},    {"violations", c.violations},
                           {"worst_ratio", c.worst_ratio}};
  }
  std::size_t hyp = 0;
  for (char h : node_hypothesis) hyp += h != 0;
  j["far_field_nodes"] = node_r.size();
  j["far_field_hypothesis_nodes"] = hyp;
  j["asserted_pass"] = asserted_pass();
  return j.dump(2);
}

FieldBoundReport check_field_bounds(const std::vector<FieldSample>& samples,
                                    const FieldBoundInput& in) {
  if (samples.empty()) throw std::domain_error("check_field_bounds: no samples");
  const double tol_t = 1e-9 * std::max(1.0, in.T1);
  std::size_t at_T1 = samples.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = std::abs(samples[i].t - in.T1);
    if (d < best) {
      best = d;
      at_T1 = i;
    }
  }
  if (best > 0.5 * in.dr + tol_t) {
    std::ostringstream os;
    os << "check_field_bounds: no sample at T1 = " << in.T1;
    throw std::domain_error(os.str());
  }

  FieldBoundReport rep;
  rep.M = in.M;
  rep.K = in.K;
  rep.K1 = in.K1;
  rep.T1 = in.T1;
  rep.initial_field_norm = in.initial_field_norm;
  rep.claim_scale = in.claim_scale;

  BoundCheck gauss{"gauss_Er"};
  BoundCheck claim{"claim_field"};
  claim.asserted = in.claim_scale > 0.0;
  for (const auto& s : samples) {
    for (std::size_t j = 1; j < s.E_r.size(); ++j) {
      const double r = in.dr * static_cast<double>(j);
      const double g = std::abs(s.E_r[j]) * 2.0 * std::numbers::pi * r / in.M;
      ++gauss.checked;
      gauss.worst_ratio = std::max(gauss.worst_ratio, g);
      if (g > 1.0 + 1e-10) ++gauss.violations;
      if (in.claim_scale > 0.0 && r <= in.claim_r_max) {
        const double c = std::hypot(s.E_phi[j], s.B[j]) * r / in.claim_scale;
        ++claim.checked;
        claim.worst_ratio = std::max(claim.worst_ratio, c);
        if (c > 1.0) ++claim.violations;
      }
    }
  }

  BoundCheck far6{"far_field_6KK1T"};
  BoundCheck far4{"far_field_4KK1T"};
  far4.asserted = false;
  BoundCheck hyp{"far_field_hypothesis"};
  hyp.asserted = false;
  const auto& s = samples[at_T1];
  const double kkt = in.K * in.K1 * in.T1;
  for (std::size_t j = 1; j < s.E_r.size(); ++j) {
    const double R = in.dr * static_cast<double>(j);
    if (R < 6.0 * in.T1 * (1.0 - 1e-12)) continue;
    const double lhs = std::hypot(s.E_phi[j], s.B[j]);
    const double r6 = lhs / (in.initial_field_norm + 6.0 * kkt / R);
    const double r4 = lhs / (in.initial_field_norm + 4.0 * kkt / R);
    const double rh = kkt > 0.0 ? in.initial_field_norm / (2.0 * kkt / R)
                                : (in.initial_field_norm > 0.0 ? INFINITY : 0.0);
    for (auto* c : {&far6, &far4, &hyp}) ++c->checked;
    far6.worst_ratio = std::max(far6.worst_ratio, r6);
    far4.worst_ratio = std::max(far4.worst_ratio, r4);
    hyp.worst_ratio = std::max(hyp.worst_ratio, rh);
    far6.violations += r6 > 1.0;
    far4.violations += r4 > 1.0;
    hyp.violations += rh > 1.0;
    rep.node_r.push_back(R);
    rep.node_bound6.push_back(r6 <= 1.0);
    rep.node_bound4.push_back(r4 <= 1.0);
    rep.node_hypothesis.push_back(rh <= 1.0);
  }
  rep.checks = {gauss, far6, far4, hyp, claim};
  return rep;
}

}  // namespace vmfocus
