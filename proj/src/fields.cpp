#include "vmfocus/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace vmfocus {

RadialGrid::RadialGrid(double dr, double r_max) : dr_(dr) {
  if (!(dr > 0.0) || !(r_max > 2.0 * dr))
    throw std::invalid_argument("radial grid needs dr > 0 and r_max > 2 dr");
  n_ = static_cast<std::size_t>(std::llround(r_max / dr)) + 1;
  for (auto* v : {&rho, &j_r, &j_phi, &E_r, &E_phi, &B, &P_plus, &P_minus}) v->assign(n_, 0.0);
}

double RadialGrid::shell_area(std::size_t j) const {
  if (j == 0) return std::numbers::pi * 0.25 * dr_ * dr_;
  return 2.0 * std::numbers::pi * node(j) * dr_;
}

void gauss_Er(std::span<const double> rho, double dr, std::span<double> E_r) {
  if (rho.size() != E_r.size()) throw std::invalid_argument("gauss_Er: size mismatch");
  if (rho.empty()) return;
  E_r[0] = 0.0;
  double acc = 0.0;
  double prev = 0.0;  // r rho at the previous node; zero on the axis
  if (rho[0] < 0.0) throw std::logic_error("gauss_Er: negative density at node 0");
  for (std::size_t j = 1; j < rho.size(); ++j) {
    if (rho[j] < 0.0) {
      std::ostringstream os;
      os << "gauss_Er: negative density " << rho[j] << " at node " << j;
      throw std::logic_error(os.str());
    }
    const double r = dr * static_cast<double>(j);
    const double cur = r * rho[j];
    acc += 0.5 * dr * (prev + cur);
    E_r[j] = acc / r;
    prev = cur;
  }
}

void gauss_Er(RadialGrid& grid) { gauss_Er(grid.rho, grid.dr(), grid.E_r); }

void fields_from_P(RadialGrid& grid) {
  const std::size_t n = grid.size();
  for (std::size_t j = 1; j < n; ++j) {
    const double two_r = 2.0 * grid.node(j);
    grid.E_phi[j] = (grid.P_plus[j] + grid.P_minus[j]) / two_r;
    grid.B[j] = (grid.P_plus[j] - grid.P_minus[j]) / two_r;
  }
  grid.E_phi[0] = 2.0 * grid.E_phi[1] - grid.E_phi[2];
  grid.B[0] = 2.0 * grid.B[1] - grid.B[2];
}

void P_from_fields(RadialGrid& grid) {
  grid.P_plus[0] = grid.P_minus[0] = 0.0;
  for (std::size_t j = 1; j < grid.size(); ++j) {
    const double r = grid.node(j);
    grid.P_plus[j] = r * grid.E_phi[j] + r * grid.B[j];
    grid.P_minus[j] = r * grid.E_phi[j] - r * grid.B[j];
  }
}

void characteristic_source(const RadialGrid& grid, std::span<double> source) {
  for (std::size_t j = 0; j < grid.size(); ++j)
    source[j] = grid.B[j] - grid.node(j) * grid.j_phi[j];
}

double interpolate(std::span<const double> values, double dr, double r) {
  const std::size_t n = values.size();
  const double s = r / dr;
  if (s <= 0.0) return values[0];
  if (s >= static_cast<double>(n - 1)) return values[n - 1];
  const auto i = static_cast<std::size_t>(s);
  const double f = s - static_cast<double>(i);
  return (1.0 - f) * values[i] + f * values[i + 1];
}

namespace {

double derivative_at(std::span<const double> v, double dr, std::size_t j) {
  const std::size_t n = v.size();
  if (j == 0) return (v[1] - v[0]) / dr;
  if (j == n - 1) return (v[n - 1] - v[n - 2]) / dr;
  return (v[j + 1] - v[j - 1]) / (2.0 * dr);
}

}  // namespace

double c1_norm(std::span<const double> v, double dr) {
  if (v.size() < 2) throw std::invalid_argument("c1_norm: need at least two nodes");
  double sup = 0.0, slope = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    sup = std::max(sup, std::abs(v[j]));
    slope = std::max(slope, std::abs(derivative_at(v, dr, j)));
  }
  return sup + slope;
}

double c1_norm(std::span<const double> a, std::span<const double> b, double dr) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("c1_norm: bad sizes");
  double sup = 0.0, slope = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    sup = std::max(sup, std::hypot(a[j], b[j]));
    slope = std::max(slope, std::hypot(derivative_at(a, dr, j), derivative_at(b, dr, j)));
  }
  return sup + slope;
}

// ---------------------------------------------------------------------------

CharacteristicStepper::CharacteristicStepper(const RadialGrid& grid,
                                             std::function<double(double)> initial_P_minus)
    : inflow_(std::move(initial_P_minus)), dr_(grid.dr()), a_(grid.size()), b_(grid.size()) {}

void CharacteristicStepper::predict(const RadialGrid& grid, std::span<const double> source_old) {
  const std::size_t n = grid.size();
  const double half = 0.5 * dr_;
  a_[0] = 0.0;
  for (std::size_t j = 1; j < n; ++j) a_[j] = grid.P_plus[j - 1] + half * source_old[j - 1];
  for (std::size_t j = 0; j + 1 < n; ++j) b_[j] = grid.P_minus[j + 1] + half * source_old[j + 1];
  // Ghost node one cell beyond the grid: vacuum, so P- is the translated
  // initial profile and the source vanishes there.
  b_[n - 1] = inflow_(grid.node(n - 1) + dr_ + t_);
}

void CharacteristicStepper::finish(RadialGrid& grid, std::span<const double> source_new) {
  const std::size_t n = grid.size();
  const double half = 0.5 * dr_;
  grid.P_plus[0] = grid.P_minus[0] = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    grid.P_plus[j] = a_[j] + half * source_new[j];
    grid.P_minus[j] = b_[j] + half * source_new[j];
  }
  t_ += dr_;
  ++steps_;
}

void CharacteristicStepper::step(RadialGrid& grid, std::span<const double> source_old,
                                 std::span<const double> source_new) {
  predict(grid, source_old);
  finish(grid, source_new);
}

void CharacteristicStepper::step_coupled(RadialGrid& grid, std::span<const double> source_old,
                                         std::span<double> source_new) {
  predict(grid, source_old);
  const std::size_t n = grid.size();
  // Both characteristics reaching node j pick up the same new-time source,
  // so it cancels in P+ - P- = 2 r B.
  for (std::size_t j = 1; j < n; ++j) {
    const double r = grid.node(j);
    const double b_new = (a_[j] - b_[j]) / (2.0 * r);
    source_new[j] = b_new - r * grid.j_phi[j];
  }
  source_new[0] = 2.0 * source_new[1] - source_new[2] +
                  (grid.node(1) * grid.j_phi[1] * 2.0 - grid.node(2) * grid.j_phi[2]);
  finish(grid, source_new);
}

// ---------------------------------------------------------------------------

FieldHistory::FieldHistory(double dr, std::vector<double> P_plus0, std::vector<double> P_minus0,
                           std::function<double(double)> initial_P_minus)
    : dr_(dr), P_plus0_(std::move(P_plus0)), P_minus0_(std::move(P_minus0)),
      inflow_(std::move(initial_P_minus)) {}

void FieldHistory::record_source(std::span<const double> source) {
  sources_.emplace_back(source.begin(), source.end());
}

double FieldHistory::t_end() const {
  return sources_.empty() ? -1.0 : dr_ * static_cast<double>(sources_.size() - 1);
}

namespace {

// x / h snapped to the nearest integer when within round-off of it.
double grid_coordinate(double x, double h) {
  const double s = x / h;
  const double n = std::round(s);
  return std::abs(s - n) < 1e-9 ? n : s;
}

double interpolate_snapped(std::span<const double> v, double dr, double x) {
  const double s = grid_coordinate(x, dr);
  const std::size_t n = v.size();
  if (s <= 0.0) return v[0];
  if (s >= static_cast<double>(n - 1)) return v[n - 1];
  const auto i = static_cast<std::size_t>(s);
  const double f = s - static_cast<double>(i);
  return f == 0.0 ? v[i] : (1.0 - f) * v[i] + f * v[i + 1];
}

}  // namespace

double FieldHistory::source_at(double t, double x) const {
  const double r_max = dr_ * static_cast<double>(P_plus0_.size() - 1);
  if (grid_coordinate(x, dr_) > grid_coordinate(r_max, dr_)) return 0.0;
  const double s = grid_coordinate(t, dr_);
  const auto i = static_cast<std::size_t>(s);
  const double f = s - static_cast<double>(i);
  const double v0 = interpolate_snapped(sources_[i], dr_, x);
  if (f == 0.0) return v0;
  const double v1 = interpolate_snapped(sources_[i + 1], dr_, x);
  return (1.0 - f) * v0 + f * v1;
}

double FieldHistory::initial_plus(double x) const { return interpolate_snapped(P_plus0_, dr_, x); }

double FieldHistory::initial_minus(double x) const {
  const double r_max = dr_ * static_cast<double>(P_minus0_.size() - 1);
  if (grid_coordinate(x, dr_) > grid_coordinate(r_max, dr_)) return inflow_(x);
  return interpolate_snapped(P_minus0_, dr_, x);
}

std::pair<double, double> FieldHistory::reference_P(double t, double r) const {
  if (sources_.empty() || t > t_end() + 1e-12 * dr_ || t < 0.0) {
    std::ostringstream os;
    os << "reference_field_eval: t = " << t << " outside stored history [0, " << t_end() << "]";
    throw std::domain_error(os.str());
  }
  if (!(r > 0.0)) throw std::domain_error("reference_field_eval: r must be positive");

  // Composite trapezoid over [lo, t] along the path tau -> x(tau), with
  // breakpoints at the stored time levels.
  auto line_integral = [&](double lo, auto path) {
    std::vector<double> taus{lo};
    const double s_lo = grid_coordinate(lo, dr_);
    const double s_hi = grid_coordinate(t, dr_);
    for (double k = std::floor(s_lo) + 1.0; k < s_hi; k += 1.0) taus.push_back(k * dr_);
    if (s_hi > s_lo) taus.push_back(t);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < taus.size(); ++i) {
      const double f0 = source_at(taus[i], path(taus[i]));
      const double f1 = source_at(taus[i + 1], path(taus[i + 1]));
      sum += 0.5 * (taus[i + 1] - taus[i]) * (f0 + f1);
    }
    return sum;
  };

  const double t1 = std::max(0.0, t - r);
  const double plus_start = t1 > 0.0 ? 0.0 : initial_plus(r - t);
  const double plus = plus_start + line_integral(t1, [&](double tau) { return r - t + tau; });
  const double minus =
      initial_minus(r + t) + line_integral(0.0, [&](double tau) { return r + t - tau; });
  return {plus, minus};
}

std::pair<double, double> FieldHistory::reference_field_eval(double t, double r) const {
  const auto [plus, minus] = reference_P(t, r);
  return {(plus + minus) / (2.0 * r), (plus - minus) / (2.0 * r)};
}

// ---------------------------------------------------------------------------

namespace {

OracleComparison run_oracle(double dr, double r_max, int steps,
                            const std::function<double(double)>& P_plus0,
                            const std::function<double(double)>& P_minus0,
                            const SpaceTimeFn& fn, bool coupled) {
  RadialGrid g(dr, r_max);
  for (std::size_t j = 1; j < g.size(); ++j) {
    g.P_plus[j] = P_plus0(g.node(j));
    g.P_minus[j] = P_minus0(g.node(j));
  }
  fields_from_P(g);
  std::vector<double> S(g.size()), S_new(g.size());
  auto fill_jphi = [&](double t) {
    for (std::size_t j = 0; j < g.size(); ++j) g.j_phi[j] = fn(t, g.node(j));
  };
  auto fill_source = [&](double t, std::vector<double>& out) {
    for (std::size_t j = 0; j < g.size(); ++j) out[j] = fn(t, g.node(j));
  };
  if (coupled) {
    fill_jphi(0.0);
    characteristic_source(g, S);
  } else {
    fill_source(0.0, S);
  }
  FieldHistory hist(dr, g.P_plus, g.P_minus, P_minus0);
  hist.record_source(S);
  CharacteristicStepper stepper(g, P_minus0);

  OracleComparison cmp;
  for (int n = 1; n <= steps; ++n) {
    const double t = dr * n;
    if (coupled) {
      fill_jphi(t);
      stepper.step_coupled(g, S, S_new);
    } else {
      fill_source(t, S_new);
      stepper.step(g, S, S_new);
    }
    std::swap(S, S_new);
    hist.record_source(S);
    for (std::size_t j = 1; j < g.size(); ++j) {
      const auto [pp, pm] = hist.reference_P(t, g.node(j));
      cmp.max_abs_error = std::max({cmp.max_abs_error, std::abs(pp - g.P_plus[j]),
                                    std::abs(pm - g.P_minus[j])});
      cmp.scale = std::max({cmp.scale, std::abs(pp), std::abs(pm)});
      ++cmp.nodes;
    }
  }
  return cmp;
}

}  // namespace

OracleComparison compare_with_oracle(double dr, double r_max, int steps,
                                     const std::function<double(double)>& P_plus0,
                                     const std::function<double(double)>& P_minus0,
                                     const SpaceTimeFn& source) {
  return run_oracle(dr, r_max, steps, P_plus0, P_minus0, source, false);
}

OracleComparison compare_with_oracle_coupled(double dr, double r_max, int steps,
                                             const std::function<double(double)>& P_plus0,
                                             const std::function<double(double)>& P_minus0,
                                             const SpaceTimeFn& j_phi) {
  return run_oracle(dr, r_max, steps, P_plus0, P_minus0, j_phi, true);
}

double vacuum_advection_error(double dr, double r_max, int steps, double center, double width) {
  auto bump = [=](double r) {
    const double x = (r - center) / width;
    return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
  };
  RadialGrid g(dr, r_max);
  for (std::size_t j = 1; j < g.size(); ++j) g.P_minus[j] = bump(g.node(j));
  std::vector<double> zero(g.size(), 0.0);
  CharacteristicStepper stepper(g, bump);
  for (int n = 0; n < steps; ++n) stepper.step(g, zero, zero);
  double err = 0.0;
  for (std::size_t j = 1; j < g.size(); ++j) {
    const std::size_t src = j + static_cast<std::size_t>(steps);
    const double expect = bump(dr * static_cast<double>(src));
    err = std::max(err, std::abs(g.P_minus[j] - expect));
  }
  return err;
}

bool FieldVerification::pass(double oracle_tol, double advection_tol) const {
  for (const auto& c : cases)
    if (!(c.relative() <= oracle_tol)) return false;
  return advection_error <= advection_tol;
}

FieldVerification verify_field_solver(double dr, double r_max, int steps) {
  const double pi = std::numbers::pi;
  auto bump = [](double c, double w) {
    return [=](double r) {
      const double x = (r - c) / w;
      return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
    };
  };
  auto zero = [](double) { return 0.0; };
  const double a = 0.4 * r_max, b = 0.9 * r_max;
  FieldVerification v;
  auto add = [&](const char* name, OracleComparison c) {
    v.names.emplace_back(name);
    v.cases.push_back(c);
  };
  add("static_shell", compare_with_oracle(dr, r_max, steps, zero, zero,
                                          [](double, double r) { return r * r * std::exp(-r); }));
  add("pulsed", compare_with_oracle(dr, r_max, steps, bump(a, 0.1 * r_max), zero,
                                    [=](double t, double r) { return std::sin(40.0 * pi * t) * r; }));
  add("moving_source",
      compare_with_oracle(dr, r_max, steps, zero, bump(b, 0.08 * r_max), [=](double t, double r) {
        const double x = r - 0.2 * r_max - t;
        return std::exp(-200.0 * x * x);
      }));
  add("coupled_current",
      compare_with_oracle_coupled(dr, r_max, steps, zero, zero, [](double t, double r) {
        return r * std::exp(-30.0 * r) * (1.0 + t);
      }));
  add("coupled_seeded",
      compare_with_oracle_coupled(dr, r_max, steps, bump(a, 0.2 * r_max), bump(a, 0.1 * r_max),
                                  [](double t, double r) { return std::cos(7.0 * r + 20.0 * t); }));
  v.advection_error = vacuum_advection_error(dr, r_max, steps, 0.6 * r_max, 0.1 * r_max);
  return v;
}

}  // namespace vmfocus
