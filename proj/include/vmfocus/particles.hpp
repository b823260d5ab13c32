#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vmfocus/fields.hpp"
#include "vmfocus/initdata.hpp"

namespace vmfocus {

/// A marker reached the axis even after the substep count was doubled the
/// maximum number of times.
class AxisCrossing : public std::runtime_error {
public:
  AxisCrossing(std::size_t marker, double r, int substeps);
  std::size_t marker() const { return marker_; }
  int substeps() const { return substeps_; }

private:
  std::size_t marker_;
  int substeps_;
};

/// (E_r, E_phi, B) frozen over one field step, interleaved per node.
class FieldSnapshot {
public:
  FieldSnapshot() = default;
  explicit FieldSnapshot(const RadialGrid& grid);
  /// All fields zero on [0, r_max].
  static FieldSnapshot zero(double dr, double r_max);

  double dr() const { return dr_; }
  double r_max() const { return r_max_; }
  bool vacuum() const { return vacuum_; }

  /// Linear interpolation in r. out = {E_r, E_phi, B}.
  void eval(double r, double out[3]) const {
    const double s = r * inv_dr_;
    auto i = static_cast<std::size_t>(s);
    if (i >= n_ - 1) i = n_ - 2;
    const double f = s - static_cast<double>(i);
    const double* a = &data_[3 * i];
    out[0] = a[0] + f * (a[3] - a[0]);
    out[1] = a[1] + f * (a[4] - a[1]);
    out[2] = a[2] + f * (a[5] - a[2]);
  }

private:
  std::vector<double> data_;
  std::size_t n_ = 0;
  double dr_ = 0.0, inv_dr_ = 0.0, r_max_ = 0.0;
  bool vacuum_ = false;
};

struct PushStats {
  int substeps = 0;         // requested substeps per field step
  int max_substeps = 0;     // largest count any marker needed after doubling
  std::size_t rejected = 0; // markers that needed at least one doubling
};

/// Default substep count ceil(4 v_max dt / dr), v_max the largest marker
/// speed sqrt(rdot^2 + (L/r)^2). At least 1.
int adaptive_substeps(const MarkerEnsemble& e, double dt, double dr);

/// One RK4 step of size h for r'' = L^2/r^3 + E_r + (L/r) B,
/// L' = r E_phi - r rdot B. Returns false if any stage radius is <= 0.
bool rk4_step(const FieldSnapshot& f, double h, double& r, double& rdot, double& L);

/// Advances every marker by dt using `substeps` RK4 substeps against the
/// frozen fields. A marker whose radius would become non-positive is retried
/// from its start state with twice the substeps, up to 8 doublings; then
/// AxisCrossing is thrown. Markers leaving [0, r_max) throw std::out_of_range.
PushStats push(MarkerEnsemble& e, const FieldSnapshot& f, double dt, int substeps);

/// Cloud-in-cell deposition of rho, j_r = sum w rdot, j_phi = sum w L/r,
/// each divided by the node shell area. Clears the moment arrays first.
void deposit(const MarkerEnsemble& e, RadialGrid& grid);

/// Sum over nodes of rho_j times the shell area.
double deposited_charge(const RadialGrid& grid);

/// Exact minimum and maximum marker radius.
std::pair<double, double> support_extent(const MarkerEnsemble& e);

/// Closed-form free-streaming radius from polar initial data, via the
/// straight Cartesian line: sqrt(r0^2 + 2 r0 rdot0 t + (rdot0^2 + L^2/r0^2) t^2).
double free_streaming_radius(double r0, double rdot0, double L, double t);

/// Decimated marker log, columns t,marker,r,rdot,L.
class TrajectoryLog {
public:
  explicit TrajectoryLog(std::size_t stride) : stride_(stride) {}
  bool enabled() const { return stride_ > 0; }
  void record(double t, const MarkerEnsemble& e);
  void write_csv(std::ostream& os) const;
  std::size_t rows() const { return t_.size(); }

private:
  std::size_t stride_;
  std::vector<double> t_, r_, rdot_, L_;
  std::vector<std::size_t> id_;
};

}  // namespace vmfocus
