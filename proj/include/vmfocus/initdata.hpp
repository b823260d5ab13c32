#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vmfocus/params.hpp"

namespace vmfocus {

class RadialGrid;

/// exp(-1 / (1 - x^2)) on (-1, 1), zero elsewhere. C-infinity, all
/// derivatives vanish at +-1.
double smooth_bump(double x);
/// Derivative of smooth_bump.
double smooth_bump_derivative(double x);
/// Integral of smooth_bump over (-1, 1).
double smooth_bump_integral();

/// Velocity profile H(a, b) in squared arguments, normalized so that
/// the integral of H(u1^2, u2^2) over the (u1, u2) plane is 1.
///
/// H(a, b) = Z g(a / w^2) s(b / w^2), where g(x) = exp(-1/(1-x)) on [0, 1)
/// and s(x) = g((2x - 1)^2) is supported in the open interval (0, 1). The
/// support is therefore [0, w^2) x (0, w^2), inside [0, 1) x (0, 1) for any
/// width w in (0, 1].
class BumpProfile {
public:
  explicit BumpProfile(double width = 1.0);

  double operator()(double a, double b) const;
  double width() const { return width_; }
  double normalization() const { return z_; }
  /// Independent tensor-product quadrature of the normalization integral.
  double integral() const;

private:
  double width_;
  double z_;
};

/// Smooth cutoff equal to 1 on [5/8, 7/8], 0 outside [1/2, 1]. The two
/// transitions are the normalized primitive of smooth_bump, each of width 1/8.
class CutoffChi {
public:
  CutoffChi();

  double operator()(double r) const;
  double derivative(double r) const;

  double c0() const { return 1.0; }
  /// sup |chi'|, measured by dense sampling.
  double c1() const { return c1_; }
  double d1() const { return c0() + c1_; }

  /// Integral of r^2 chi(r) over [a, b], exact for the interpolated profile.
  double integral_r2(double a, double b) const;

private:
  double step(double x) const;  // normalized primitive of smooth_bump on [-1, 1]
  std::vector<double> table_;   // primitive at uniform x nodes
  double c1_;
};

/// Phase-space markers in the reduced variables (r, rdot, L = r^2 phidot).
/// Weights never change once sampled.
struct MarkerEnsemble {
  std::vector<double> r;
  std::vector<double> rdot;
  std::vector<double> L;
  std::vector<double> weight;

  std::size_t size() const { return r.size(); }
  bool empty() const { return r.empty(); }
  void reserve(std::size_t n);
  void push_back(double r0, double rdot0, double L0, double w);
  double total_weight() const;
};

/// Stratification of the marker lattice: n_r radial strata times
/// n_vel x n_vel velocity strata.
struct StrataLayout {
  std::size_t n_r;
  std::size_t n_vel;
  std::size_t count() const { return n_r * n_vel * n_vel; }
};

/// Smallest layout holding at least n markers with roughly 64 radial strata
/// per velocity stratum. Throws ConfigError when fewer than 2 strata per
/// dimension would result.
StrataLayout strata_for(std::size_t n);

/// The focusing initial distribution and everything derived from it.
class InitialData {
public:
  InitialData(const FocusingParams& params, double h_width);

  const FocusingParams& params() const { return params_; }
  const BumpProfile& profile() const { return h_; }
  const CutoffChi& chi() const { return chi_; }

  /// f0(r, rdot, phidot). Throws std::domain_error for r <= 0.
  double f0(double r, double rdot, double phidot) const;

  /// Rescaled profile H_eps(a, b) = eps^(-4k) H(a / eps^(4k), b / eps^(4k)).
  double h_eps(double a, double b) const;

  /// Total mass by one-dimensional quadrature: 2 pi eps^alpha int r^2 chi dr.
  double exact_mass() const;

  /// Velocity support box for a marker at radius r: |rdot| and phidot ranges.
  struct Box {
    double rdot_abs_lo, rdot_abs_hi, phidot_lo, phidot_hi;
  };
  Box support_box(double r) const;

private:
  FocusingParams params_;
  BumpProfile h_;
  CutoffChi chi_;
};

/// Deterministic stratified lattice over the support of f0 in the
/// coordinates (r, u1, u2), rdot = -(r - eps^(2k) u1) eps^(k-2l),
/// phidot = eps^(-l) + eps^(2k) u2. Each marker sits at its cell midpoint and
/// carries the integral of f0 over the cell with respect to
/// (2 pi r dr)(r drdot dphidot), so the weights sum to the exact mass.
/// With jitter enabled, each point is moved uniformly inside its cell using
/// the seed. Zero-weight cells are dropped.
MarkerEnsemble sample_markers(const InitialData& data, std::size_t n, std::uint64_t seed,
                              bool jitter = false);

/// Initial azimuthal electric and magnetic field profiles.
class InitialFieldProfile {
public:
  /// Seeded mode places a smooth bump centered at r = 1.5 whose C1 norm is
  /// half of eps^alpha / 200.
  InitialFieldProfile(FieldMode mode, double eps_alpha);

  FieldMode mode() const { return mode_; }
  double E_phi(double r) const;
  double B(double r) const;
  double P_plus(double r) const { return r * (E_phi(r) + B(r)); }
  double P_minus(double r) const { return r * (E_phi(r) - B(r)); }
  /// Outermost radius of the support.
  double support_end() const { return center_ + half_width_; }

private:
  FieldMode mode_;
  double amplitude_ = 0.0;
  double center_ = 1.5;
  double half_width_ = 0.1;
};

struct InitialDensityReport {
  double deposited_charge = 0.0;
  double rho_max = 0.0;
  /// rho_max / (eps^alpha max chi); the profile is c eps^alpha chi~(r).
  double shape_constant = 0.0;
  double support_lo = 0.0, support_hi = 0.0;  // outermost nodes with rho > 0
  double c1_norm = 0.0;                       // sup |rho| + sup |rho'|, central differences
};

/// Deposits the ensemble onto grid (rho, j_r, j_phi) and checks the shape.
/// Throws std::logic_error when the deposit leaves [1/2 - dr, 1 + dr].
InitialDensityReport initial_density(const MarkerEnsemble& e, const InitialData& data,
                                     RadialGrid& grid);

struct InitialFieldReport {
  double Er_max = 0.0;
  double field_sup = 0.0;        // sup |(E_phi, B)|
  double field_r_sup = 0.0;      // sup r |(E_phi, B)|
  double field_c1 = 0.0;         // sup |(E_phi, B)| + sup |(E_phi, B)'|
  double Er_c1 = 0.0;
  double B_c1 = 0.0;
};

/// E_r from the deposited density, (E_phi, B) and P+- from the profile.
/// Throws ConfigError when the seeded pair exceeds eps^alpha/(200 r)
/// pointwise or eps^alpha/200 in C1.
InitialFieldReport initial_fields(RadialGrid& grid, const InitialFieldProfile& profile,
                                  double eps_alpha);

// Ensemble dump/restore. CSV columns: r,rdot,L,weight. The binary layout is
// the 8-byte magic "VMFENS01", a little-endian uint64 marker count, then
// count rows of four little-endian IEEE-754 doubles (r, rdot, L, weight).
void write_ensemble_csv(std::ostream& os, const MarkerEnsemble& e);
MarkerEnsemble read_ensemble_csv(std::istream& is);
void write_ensemble_binary(std::ostream& os, const MarkerEnsemble& e);
MarkerEnsemble read_ensemble_binary(std::istream& is);

}  // namespace vmfocus
