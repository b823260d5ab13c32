#include "vmfocus/params.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

namespace vmfocus {

std::string_view to_string(ExponentConstraint c) {
  switch (c) {
    case ExponentConstraint::KBelowThirdL: return "k < l/3";
    case ExponentConstraint::AlphaBelowLMinusK: return "alpha < l - k";
    case ExponentConstraint::AlphaAboveFourK: return "alpha > 4k";
    case ExponentConstraint::LAboveTenAlphaTenK: return "l > 10 alpha + 10 k";
  }
  return "?";
}

std::vector<ExponentConstraint> validate_exponents(double k, double l, double alpha) {
  if (!(k > 0.0) || !(l > 0.0) || !(alpha > 0.0))
    throw std::domain_error("exponents k, l, alpha must be positive");
  std::vector<ExponentConstraint> violated;
  if (!(k < l / 3.0)) violated.push_back(ExponentConstraint::KBelowThirdL);
  if (!(alpha < l - k)) violated.push_back(ExponentConstraint::AlphaBelowLMinusK);
  if (!(alpha > 4.0 * k)) violated.push_back(ExponentConstraint::AlphaAboveFourK);
  if (!(l > 10.0 * alpha + 10.0 * k)) violated.push_back(ExponentConstraint::LAboveTenAlphaTenK);
  return violated;
}

FocusingParams::FocusingParams(double epsilon, double k, double l, double alpha,
                               double eta, double big_n, double eps0, double r0_ref)
    : epsilon_(epsilon), k_(k), l_(l), alpha_(alpha), eta_(eta), big_n_(big_n),
      eps0_(eps0), r0_ref_(r0_ref), eps0_explicit_(eps0 > 0.0) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::domain_error("epsilon must lie in (0, 1)");
  const auto violated = validate_exponents(k, l, alpha);
  if (!violated.empty()) {
    std::string msg = "exponent constraints violated:";
    for (auto c : violated) {
      msg += " [";
      msg += to_string(c);
      msg += "]";
    }
    throw ConfigError(msg);
  }
  if (!(r0_ref >= 0.5 && r0_ref <= 1.0))
    throw ConfigError("r0_ref must lie in [1/2, 1]");
  if (!(eta > 0.0) || !(big_n > 0.0)) throw ConfigError("eta and big_n must be positive");
  if (!eps0_explicit_) eps0_ = 2.0 * focus_radius();
  m_ = derive_m(*this);
  t_paper_ = paper_time_T(*this);
}

double FocusingParams::pow_eps(double e) const { return std::pow(epsilon_, e); }

FocusingParams FocusingParams::with_epsilon(double epsilon) const {
  return FocusingParams(epsilon, k_, l_, alpha_, eta_, big_n_, eps0_explicit_ ? eps0_ : 0.0,
                        r0_ref_);
}

double derive_m(const FocusingParams& p) {
  return 100.0 * p.pow_eps(p.alpha() - 4.0 * p.k() - p.l());
}

double paper_time_T(double epsilon, double k, double l, double alpha) {
  // Summed in log space so that epsilon near the double underflow limit works.
  const double le = std::log(epsilon);
  auto term = [le](double e) { return std::exp(e * le); };
  return term(2.0 * l - k) - 300.0 * term(alpha - 5.0 * k + 3.0 * l) -
         300.0 * term(k + 2.0 * l) - 300.0 * term(3.0 * l - 2.0 * k);
}

double paper_time_T(const FocusingParams& p) {
  return paper_time_T(p.epsilon(), p.k(), p.l(), p.alpha());
}

double paper_time_threshold(double k, double l, double alpha) {
  // Positivity of T is scale-free: divide by the leading power and compare
  // 1 against 300 (eps^a + eps^b + eps^c), which is monotone in eps.
  auto excess = [&](double log_eps) {
    const double a = alpha - 5.0 * k + 3.0 * l - (2.0 * l - k);
    const double b = k + 2.0 * l - (2.0 * l - k);
    const double c = 3.0 * l - 2.0 * k - (2.0 * l - k);
    return 1.0 - 300.0 * (std::exp(a * log_eps) + std::exp(b * log_eps) + std::exp(c * log_eps));
  };
  double lo = std::log(1e-300);
  double hi = 0.0;
  if (excess(lo) <= 0.0) return 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return std::exp(lo);
}

std::vector<SmallnessCondition> smallness_conditions(const FocusingParams& p, double d1) {
  using std::numbers::pi;
  const double ea = p.pow_eps(p.alpha());
  const double eta = p.eta();
  const double m = p.m();
  const double e2k = p.h_scale();
  const double el = p.angular_speed();
  const double r0_min = 0.5;
  const double k = p.k(), l = p.l(), alpha = p.alpha();

  std::vector<SmallnessCondition> out;
  auto le = [&](std::string name, double lhs, double rhs) {
    out.push_back({std::move(name), lhs, rhs, lhs <= rhs});
  };
  auto lt = [&](std::string name, double lhs, double rhs) {
    out.push_back({std::move(name), lhs, rhs, lhs < rhs});
  };

  lt("rdot_box", e2k, 0.5 * r0_min);
  lt("phidot_box", e2k, 0.5 * el);
  le("rho0_sup", 2.0 * pi * ea, eta / 10.0);
  le("rho0_c1", 0.5 * ea * d1, eta);
  le("er0_sup", 2.0 * (pi / 16.0) * ea / (2.0 * pi), eta);
  le("er0_c1", 4.0 * (pi / 16.0) * ea / (2.0 * pi) + 2.0 * pi * ea, eta);
  lt("seed_field", ea, eta);
  le("er_budget", ea, m / 3.0);
  // Worst corner of the support: smallest radius, smallest angular speed.
  lt("angular_gate", 0.5 * m * r0_min, r0_min * r0_min * (el - e2k));
  le("a_window", 100.0 * p.pow_eps(-2.0 * l), 0.5 * p.pow_eps(2.0 * k - 4.0 * l));
  le("b_window", 100.0 * p.pow_eps(alpha - 4.0 * k - 2.0 * l), 0.5 * p.pow_eps(-2.0 * l));
  lt("a_r0sq_exceeds_b", 4.0 * p.pow_eps(-2.0 * l), p.pow_eps(2.0 * k - 4.0 * l));
  lt("paper_T_positive", 0.0, p.paper_time());
  le("window_T", p.focus_time(), r0_min / 100.0);
  le("claim_field", ea / 200.0 + 8.0 * p.pow_eps(alpha - 4.0 * k - l),
     20.0 * p.pow_eps(alpha - 4.0 * k - l));
  le("claim_cone", 10.0 * p.focus_time(), r0_min * p.focus_radius());
  lt("rho_growth", p.big_n(), p.pow_eps(alpha - 2.0 * l + 2.0 * k) / 640000.0);
  lt("er_growth", p.big_n(), p.pow_eps(alpha - l + k) / 6400.0);
  lt("focus_inside_eps0", 200.0 * p.focus_radius(), p.eps0());
  return out;
}

std::string_view to_string(HorizonPolicy p) {
  switch (p) {
    case HorizonPolicy::PaperT: return "paper_T";
    case HorizonPolicy::EnvelopeSm: return "envelope_sm";
    case HorizonPolicy::MinSupport: return "min_support";
  }
  return "?";
}

HorizonPolicy horizon_policy_from_string(std::string_view s) {
  if (s == "paper_T") return HorizonPolicy::PaperT;
  if (s == "envelope_sm") return HorizonPolicy::EnvelopeSm;
  if (s == "min_support") return HorizonPolicy::MinSupport;
  throw ConfigError("unknown horizon_policy: " + std::string(s));
}

std::string_view to_string(FieldMode m) {
  return m == FieldMode::Zero ? "zero" : "seeded";
}

FieldMode field_mode_from_string(std::string_view s) {
  if (s == "zero") return FieldMode::Zero;
  if (s == "seeded") return FieldMode::Seeded;
  throw ConfigError("unknown field_mode: " + std::string(s));
}

void RunConfig::validate(double horizon) const {
  if (!(dr > 0.0)) throw ConfigError("dr must be positive");
  if (markers == 0) throw ConfigError("markers must be positive");
  if (substeps < 0) throw ConfigError("substeps must be non-negative");
  if (!(h_width > 0.0 && h_width <= 1.0)) throw ConfigError("h_width must lie in (0, 1]");
  if (!(max_horizon_factor > 0.0)) throw ConfigError("max_horizon_factor must be positive");
  if (r_max < 1.0 + horizon + 2.0 * dr) {
    std::ostringstream os;
    os << "r_max = " << r_max << " is too small for causal decoupling; need >= "
       << 1.0 + horizon + 2.0 * dr;
    throw ConfigError(os.str());
  }
}

Config parse_config(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a flat JSON object");

  static const std::vector<std::string> known = {
      "epsilon", "k", "l", "alpha", "eta", "big_n", "eps0", "r0_ref", "dr", "r_max",
      "markers", "seed", "horizon_policy", "substeps", "jitter", "field_mode", "h_width",
      "max_horizon_factor", "snapshot_every", "trajectory_stride", "fields_off"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown config key: " + key);
  }

  auto num = [&](const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) throw ConfigError(std::string("config key is not a number: ") + key);
    return j[key].get<double>();
  };

  FocusingParams params(num("epsilon", 0.05), num("k", 0.01), num("l", 0.6),
                        num("alpha", 0.045), num("eta", 0.5), num("big_n", 10.0),
                        num("eps0", 0.0), num("r0_ref", 0.75));
  RunConfig run;
  run.dr = num("dr", run.dr);
  run.r_max = num("r_max", run.r_max);
  run.substeps = static_cast<int>(num("substeps", run.substeps));
  run.markers = static_cast<std::size_t>(num("markers", static_cast<double>(run.markers)));
  run.seed = static_cast<std::uint64_t>(num("seed", static_cast<double>(run.seed)));
  run.h_width = num("h_width", run.h_width);
  run.max_horizon_factor = num("max_horizon_factor", run.max_horizon_factor);
  run.snapshot_every = static_cast<int>(num("snapshot_every", run.snapshot_every));
  run.trajectory_stride =
      static_cast<std::size_t>(num("trajectory_stride", static_cast<double>(run.trajectory_stride)));
  if (j.contains("jitter")) run.jitter = j["jitter"].get<bool>();
  if (j.contains("fields_off")) run.fields_off = j["fields_off"].get<bool>();
  if (j.contains("horizon_policy"))
    run.horizon_policy = horizon_policy_from_string(j["horizon_policy"].get<std::string>());
  if (j.contains("field_mode"))
    run.field_mode = field_mode_from_string(j["field_mode"].get<std::string>());
  return Config{params, run};
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace vmfocus
