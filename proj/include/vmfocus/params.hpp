#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vmfocus {

/// Raised when a user-supplied configuration cannot be run.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The four strict inequalities the exponent tuple (k, l, alpha) must satisfy.
enum class ExponentConstraint {
  KBelowThirdL,          // k < l/3
  AlphaBelowLMinusK,     // alpha < l - k
  AlphaAboveFourK,       // alpha > 4k
  LAboveTenAlphaTenK,    // l > 10 alpha + 10 k
};

std::string_view to_string(ExponentConstraint c);

/// Returns the violated constraints; empty means the tuple is admissible.
/// Throws std::domain_error for non-positive inputs.
std::vector<ExponentConstraint> validate_exponents(double k, double l, double alpha);

/// Scale and exponent parameters of the focusing construction plus the
/// quantities derived from them. Immutable after construction.
class FocusingParams {
public:
  FocusingParams(double epsilon, double k, double l, double alpha,
                 double eta = 0.5, double big_n = 10.0, double eps0 = 0.0,
                 double r0_ref = 0.75);

  double epsilon() const { return epsilon_; }
  double k() const { return k_; }
  double l() const { return l_; }
  double alpha() const { return alpha_; }
  double eta() const { return eta_; }
  double big_n() const { return big_n_; }
  /// Radius of the inner-norm window; defaults to twice the focus radius.
  double eps0() const { return eps0_; }
  double r0_ref() const { return r0_ref_; }

  /// epsilon raised to an arbitrary exponent.
  double pow_eps(double e) const;

  double m() const { return m_; }
  double paper_time() const { return t_paper_; }

  double focus_radius() const { return pow_eps(l_ - k_); }          // eps^(l-k)
  double focus_time() const { return pow_eps(2.0 * l_ - k_); }      // eps^(2l-k)
  double radial_speed_scale() const { return pow_eps(k_ - 2.0 * l_); }
  double angular_speed() const { return pow_eps(-l_); }
  double h_scale() const { return pow_eps(2.0 * k_); }              // eps^(2k)

  /// Same exponents at a different epsilon; eps0 is re-derived unless it was set.
  FocusingParams with_epsilon(double epsilon) const;

private:
  double epsilon_, k_, l_, alpha_;
  double eta_, big_n_, eps0_, r0_ref_;
  bool eps0_explicit_;
  double m_, t_paper_;
};

/// m = 100 eps^(alpha - 4k - l).
double derive_m(const FocusingParams& p);

/// T = eps^(2l-k) - 300 eps^(alpha-5k+3l) - 300 eps^(k+2l) - 300 eps^(3l-2k).
/// Non-positive at most accessible epsilon; callers branch on the sign.
double paper_time_T(const FocusingParams& p);
double paper_time_T(double epsilon, double k, double l, double alpha);

/// Largest epsilon below which T > 0, found by bisection in log(epsilon).
/// Returns 0 if no sign change exists above 1e-300.
double paper_time_threshold(double k, double l, double alpha);

/// One of the "epsilon small enough" conditions of the construction,
/// evaluated at the configured epsilon as lhs <= rhs (or lhs < rhs).
struct SmallnessCondition {
  std::string name;
  double lhs;
  double rhs;
  bool holds;
};

/// Evaluates each smallness requirement at the worst case over the initial
/// support. d1 is the cutoff derivative sum c0 + c1.
std::vector<SmallnessCondition> smallness_conditions(const FocusingParams& p, double d1);

enum class HorizonPolicy { PaperT, EnvelopeSm, MinSupport };
enum class FieldMode { Zero, Seeded };

std::string_view to_string(HorizonPolicy p);
HorizonPolicy horizon_policy_from_string(std::string_view s);
std::string_view to_string(FieldMode m);
FieldMode field_mode_from_string(std::string_view s);

struct RunConfig {
  double dr = 1e-3;
  double r_max = 2.0;
  /// Fixed particle substeps per field step; 0 selects the adaptive rule.
  int substeps = 0;
  std::size_t markers = 200000;
  std::uint64_t seed = 1;
  bool jitter = false;
  HorizonPolicy horizon_policy = HorizonPolicy::MinSupport;
  FieldMode field_mode = FieldMode::Seeded;
  /// Support radius of the velocity bump in units of eps^(2k).
  double h_width = 0.01;
  /// Hard cap on the run length, in units of eps^(2l-k).
  double max_horizon_factor = 3.0;
  /// Grid snapshot cadence in field steps; 0 disables snapshot files.
  int snapshot_every = 0;
  /// Decimation stride for the trajectory log; 0 disables it.
  std::size_t trajectory_stride = 0;
  /// Forces E = B = 0 during the push (free streaming).
  bool fields_off = false;

  double dt() const { return dr; }
  /// Throws ConfigError unless the outer boundary is causally decoupled.
  void validate(double horizon) const;
};

struct Config {
  FocusingParams params;
  RunConfig run;
};

/// Reads a flat JSON object. Unknown keys are rejected.
Config load_config(const std::string& path);
Config parse_config(std::string_view json_text);

}  // namespace vmfocus
