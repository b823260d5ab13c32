#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace vmfocus {

/// Quadratic upper bound on r(s)^2 for a trajectory starting at
/// (r0, rdot0, phidot0) under fields bounded by m/(3r).
struct TrajectoryEnvelope {
  double r0 = 0.0, rdot0 = 0.0, phidot0 = 0.0, m = 0.0;
  double C = 0.0;  // m r0 / 2 + r0^2 phidot0
  double A = 0.0;  // rdot0^2 + C^2/r0^2 + 2 m C/r0 - 2 m ln r0
  double B = 0.0;  // 2 m r0 C + C^2 + 2 m
  double s_m = 0.0;

  bool angular_ok = false;  // r0^2 phidot0 - m r0 / 2 > 0
  bool A_positive = false;
  bool B_positive = false;
  bool discriminant_ok = false;  // A r0^2 - B > 0

  bool valid() const { return angular_ok && A_positive && B_positive && discriminant_ok; }
  /// End of the time window the bound is stated for, r0 / 100.
  double window() const { return r0 / 100.0; }
  /// Minimum of the parabola, B/A, attained at s_m.
  double minimum() const { return B / A; }
};

/// Throws std::domain_error unless 0 < r0 <= 1, rdot0 < 0, phidot0 > 0, m > 0.
/// s_m is NaN when a hypothesis flag fails.
TrajectoryEnvelope envelope_coeffs(double r0, double rdot0, double phidot0, double m);

struct EnvelopeValue {
  double value;
  bool in_window;  // 0 <= s <= r0/100
};

/// (r0 - sqrt(A - B/r0^2) s)^2 + (B/r0^2) s^2. Throws std::logic_error when
/// the hypothesis flags of env fail.
EnvelopeValue envelope_eval(const TrajectoryEnvelope& env, double s);

struct AdversarialOptions {
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  /// Step as a fraction of the window r0/100.
  double step_fraction = 1e-5;
  double tolerance = 1e-6;
  /// Absolute radius difference between step h and 2h above which a trial
  /// is declared unconverged, relative to r0.
  double convergence_tolerance = 1e-9;
  /// Draw only zero fields (the free-streaming case).
  bool zero_fields = false;
};

struct AdversarialResult {
  std::size_t trials = 0;
  std::size_t violations = 0;          // r^2 above the envelope
  std::size_t angular_violations = 0;  // phidot outside the intermediate band
  std::size_t invalid = 0;             // failed the step-halving check
  double worst_excess = -1.0;          // max of r^2 / envelope - 1
  double max_step = 0.0;
};

/// Integrates the trajectory ODE under `trials` random smooth field triples
/// each bounded componentwise by m/(3r), over [0, r0/100] while rdot < 0,
/// and counts envelope and angular-band violations. Every fourth draw is a
/// constant field at the full budget with random signs. Throws
/// std::logic_error when the hypothesis flags of env fail.
AdversarialResult adversarial_envelope_test(const TrajectoryEnvelope& env,
                                            const AdversarialOptions& options);

/// Parameter tuples drawn uniformly from r0 in [0.3, 1], rdot0 in [-200, -20],
/// phidot0 in [1, 20], m in [0.01, 5], keeping those whose flags pass.
std::vector<TrajectoryEnvelope> draw_envelope_tuples(std::size_t count, std::uint64_t seed);

struct EnvelopeSuiteResult {
  std::size_t tuples = 0;
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::size_t angular_violations = 0;
  std::size_t invalid = 0;
  double worst_excess = -1.0;
};

EnvelopeSuiteResult run_envelope_suite(std::size_t tuples, std::size_t draws, std::uint64_t seed);

/// Field arrays at one stored time.
struct FieldSample {
  double t = 0.0;
  std::vector<double> E_r, E_phi, B;
};

struct BoundCheck {
  std::string name;
  bool asserted = true;
  std::size_t checked = 0;
  std::size_t violations = 0;
  /// Largest lhs/rhs seen; <= 1 means the bound held everywhere.
  double worst_ratio = 0.0;
  bool pass() const { return violations == 0; }
};

struct FieldBoundReport {
  double M = 0.0, K = 0.0, K1 = 0.0, T1 = 0.0, initial_field_norm = 0.0;
  double claim_scale = 0.0;  // 24 eps^(alpha - 4k - l)
  std::vector<BoundCheck> checks;
  /// Per node at T1: r_j, and whether each far-field bound and its
  /// initial-field hypothesis held there (R >= 6 T1 only).
  std::vector<double> node_r;
  std::vector<char> node_bound6, node_bound4, node_hypothesis;

  bool asserted_pass() const;
  const BoundCheck& check(const std::string& name) const;
  std::string to_json() const;
};

struct FieldBoundInput {
  double dr = 0.0;
  double M = 0.0;
  double K = 0.0;
  double K1 = 0.0;
  double T1 = 0.0;
  double initial_field_norm = 0.0;
  double claim_scale = 0.0;
  double claim_r_max = 10.0;
};

/// Node-wise verification over stored samples: the Gauss bound at all
/// times, the far-field bound with constants 6 and 4 at the sample closest
/// to T1 for R >= 6 T1, and the claim bound claim_scale/r for r <= claim_r_max.
/// Throws std::domain_error when no sample reaches T1.
FieldBoundReport check_field_bounds(const std::vector<FieldSample>& samples,
                                    const FieldBoundInput& in);

}  // namespace vmfocus
