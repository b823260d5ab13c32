#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vmfocus {

/// Uniform radial grid r_j = j dr, j = 0..J, carrying the velocity moments
/// and the fields. P_plus/P_minus are r E_phi +- r B.
class RadialGrid {
public:
  RadialGrid(double dr, double r_max);

  std::size_t size() const { return n_; }
  std::size_t last() const { return n_ - 1; }
  double dr() const { return dr_; }
  double r_max() const { return dr_ * static_cast<double>(n_ - 1); }
  double node(std::size_t j) const { return dr_ * static_cast<double>(j); }
  /// Area of the annulus represented by node j: 2 pi r_j dr, and the disk
  /// of radius dr/2 on the axis.
  double shell_area(std::size_t j) const;

  std::vector<double> rho, j_r, j_phi;
  std::vector<double> E_r, E_phi, B;
  std::vector<double> P_plus, P_minus;

private:
  double dr_;
  std::size_t n_;
};

/// r E_r(r) = int_0^r s rho(s) ds by the running trapezoid; E_r(0) = 0.
/// Throws std::logic_error on a negative density entry.
void gauss_Er(std::span<const double> rho, double dr, std::span<double> E_r);
void gauss_Er(RadialGrid& grid);

/// E_phi = (P+ + P-)/(2r), B = (P+ - P-)/(2r) for j >= 1; the axis value is
/// linearly extrapolated from nodes 1 and 2.
void fields_from_P(RadialGrid& grid);
/// Inverse map; leaves the axis at zero.
void P_from_fields(RadialGrid& grid);

/// Source of both characteristic equations, (B - r j_phi) at every node.
void characteristic_source(const RadialGrid& grid, std::span<double> source);

/// Advances P+ (outgoing) and P- (incoming) by one step dt = dr along the
/// unit-speed characteristics, integrating the source by the trapezoid rule
/// along each characteristic segment. P+ vanishes on the axis; the incoming
/// P- at the outer node is taken from the initial profile translated inward
/// (vacuum beyond the grid).
class CharacteristicStepper {
public:
  /// initial_P_minus is evaluated beyond r_max to supply inflow.
  CharacteristicStepper(const RadialGrid& grid, std::function<double(double)> initial_P_minus);

  double time() const { return t_; }
  std::size_t steps() const { return steps_; }

  /// Prescribed source at the old and new time levels.
  void step(RadialGrid& grid, std::span<const double> source_old,
            std::span<const double> source_new);

  /// Self-consistent source B - r j_phi, where grid.j_phi already holds the
  /// new-time current. B at the new time follows from the characteristic
  /// data alone, so the update stays explicit. Writes the new source.
  void step_coupled(RadialGrid& grid, std::span<const double> source_old,
                    std::span<double> source_new);

private:
  void predict(const RadialGrid& grid, std::span<const double> source_old);
  void finish(RadialGrid& grid, std::span<const double> source_new);

  std::function<double(double)> inflow_;
  double dr_;
  double t_ = 0.0;
  std::size_t steps_ = 0;
  std::vector<double> a_, b_;  // P+ and P- with the old-time half of the source added
};

/// Stored initial data and per-step source snapshots for the direct
/// quadrature of the retarded characteristic integrals.
class FieldHistory {
public:
  FieldHistory(double dr, std::vector<double> P_plus0, std::vector<double> P_minus0,
               std::function<double(double)> initial_P_minus);

  /// Appends the source at time level steps() (the first call stores t = 0).
  void record_source(std::span<const double> source);
  std::size_t levels() const { return sources_.size(); }
  double t_end() const;

  /// (E_phi, B)(t, r) from the representation formulas with
  /// t1 = max(0, t - r), trapezoid quadrature over the stored time levels.
  /// Throws std::domain_error if t lies beyond the stored history.
  std::pair<double, double> reference_field_eval(double t, double r) const;

  /// P+ and P- at (t, r) before the division by r.
  std::pair<double, double> reference_P(double t, double r) const;

private:
  double source_at(double t, double x) const;
  double initial_plus(double x) const;
  double initial_minus(double x) const;

  double dr_;
  std::vector<double> P_plus0_, P_minus0_;
  std::function<double(double)> inflow_;
  std::vector<std::vector<double>> sources_;
};

struct OracleComparison {
  double max_abs_error = 0.0;
  double scale = 0.0;  // max |P| of the oracle over the compared nodes
  std::size_t nodes = 0;
  double relative() const { return scale > 0.0 ? max_abs_error / scale : max_abs_error; }
};

using SpaceTimeFn = std::function<double(double t, double r)>;

/// Runs the stepper for `steps` steps from P+-(0) given by the two profiles
/// with a prescribed source, recording the history, and compares P+- at
/// every node r > 0 and every step against reference_P.
OracleComparison compare_with_oracle(double dr, double r_max, int steps,
                                     const std::function<double(double)>& P_plus0,
                                     const std::function<double(double)>& P_minus0,
                                     const SpaceTimeFn& source);

/// Same with the self-consistent source B - r j_phi for a prescribed j_phi.
OracleComparison compare_with_oracle_coupled(double dr, double r_max, int steps,
                                             const std::function<double(double)>& P_plus0,
                                             const std::function<double(double)>& P_minus0,
                                             const SpaceTimeFn& j_phi);

/// Max |P-(n dt, r_j) - P-(0, r_j + n dr)| for a vacuum bump at `center`
/// after `steps` steps.
double vacuum_advection_error(double dr, double r_max, int steps, double center, double width);

struct FieldVerification {
  std::vector<std::string> names;
  std::vector<OracleComparison> cases;
  double advection_error = 0.0;
  bool pass(double oracle_tol = 1e-10, double advection_tol = 1e-12) const;
};

/// Five manufactured cases (three prescribed sources, two coupled) against
/// the oracle plus the vacuum bump advection, on [0, r_max] with step dr.
FieldVerification verify_field_solver(double dr, double r_max, int steps);

/// sup |v| + sup |v'| with central differences (one-sided at the ends).
double c1_norm(std::span<const double> v, double dr);
/// Same for the pair (a, b) measured in the Euclidean norm.
double c1_norm(std::span<const double> a, std::span<const double> b, double dr);

/// Linear interpolation of a nodal array at radius r, clamped to the grid.
double interpolate(std::span<const double> values, double dr, double r);

}  // namespace vmfocus
