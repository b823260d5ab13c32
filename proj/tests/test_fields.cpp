#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "vmfocus/fields.hpp"

using namespace vmfocus;

namespace {

double bump(double r, double c, double w) {
  const double x = (r - c) / w;
  return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
}

}  // namespace

TEST(Grid, ShellAreas) {
  RadialGrid g(0.01, 1.0);
  EXPECT_EQ(g.size(), 101u);
  EXPECT_DOUBLE_EQ(g.r_max(), 1.0);
  EXPECT_NEAR(g.shell_area(0), std::numbers::pi * 0.005 * 0.005, 1e-18);
  EXPECT_NEAR(g.shell_area(40), 2.0 * std::numbers::pi * 0.4 * 0.01, 1e-16);
}

TEST(Gauss, ConstantDensityIsExact) {
  RadialGrid g(0.01, 1.0);
  std::fill(g.rho.begin(), g.rho.end(), 3.0);
  gauss_Er(g);
  EXPECT_DOUBLE_EQ(g.E_r[0], 0.0);
  for (std::size_t j = 1; j < g.size(); ++j) ASSERT_NEAR(g.E_r[j], 1.5 * g.node(j), 1e-13);
}

TEST(Gauss, ShellExteriorIsPointCharge) {
  RadialGrid g(0.001, 2.0);
  double q = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    g.rho[j] = bump(g.node(j), 0.5, 0.1);
  }
  gauss_Er(g);
  for (std::size_t j = 1; j < g.size(); ++j) q += 0.5 * g.dr() * (g.node(j - 1) * g.rho[j - 1] + g.node(j) * g.rho[j]);
  EXPECT_NEAR(g.E_r[1500] * 1.5, q, 1e-14);
  EXPECT_NEAR(g.E_r[2000] * 2.0, q, 1e-14);
}

TEST(Gauss, RejectsNegativeDensity) {
  RadialGrid g(0.1, 1.0);
  g.rho[3] = -1e-3;
  EXPECT_THROW(gauss_Er(g), std::logic_error);
}

TEST(Characteristics, PAlgebraRoundTrip) {
  RadialGrid g(0.01, 1.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    g.E_phi[j] = std::sin(3.0 * g.node(j));
    g.B[j] = g.node(j) * g.node(j);
  }
  P_from_fields(g);
  EXPECT_DOUBLE_EQ(g.P_plus[0], 0.0);
  EXPECT_NEAR(g.P_plus[50], 0.5 * (std::sin(1.5) + 0.25), 1e-15);
  EXPECT_NEAR(g.P_minus[50], 0.5 * (std::sin(1.5) - 0.25), 1e-15);
  const auto Ephi = g.E_phi, B = g.B;
  std::fill(g.E_phi.begin(), g.E_phi.end(), 0.0);
  std::fill(g.B.begin(), g.B.end(), 0.0);
  fields_from_P(g);
  for (std::size_t j = 1; j < g.size(); ++j) {
    ASSERT_NEAR(g.E_phi[j], Ephi[j], 1e-14);
    ASSERT_NEAR(g.B[j], B[j], 1e-14);
  }
  EXPECT_NEAR(g.E_phi[0], 2.0 * Ephi[1] - Ephi[2], 1e-15);
}

TEST(Characteristics, Source) {
  RadialGrid g(0.1, 1.0);
  std::fill(g.B.begin(), g.B.end(), 2.0);
  std::fill(g.j_phi.begin(), g.j_phi.end(), 1.0);
  std::vector<double> S(g.size());
  characteristic_source(g, S);
  EXPECT_NEAR(S[5], 2.0 - 0.5, 1e-15);
}

TEST(Characteristics, VacuumTranslation) {
  const double dr = 0.01;
  RadialGrid g(dr, 1.0);
  for (std::size_t j = 1; j < g.size(); ++j) {
    g.P_plus[j] = bump(g.node(j), 0.3, 0.1);
    g.P_minus[j] = bump(g.node(j), 0.6, 0.1);
  }
  auto inflow = [](double r) { return bump(r, 0.6, 0.1); };
  const auto Pp0 = g.P_plus;
  CharacteristicStepper st(g, inflow);
  std::vector<double> zero(g.size(), 0.0);
  for (int n = 0; n < 10; ++n) st.step(g, zero, zero);
  EXPECT_EQ(st.steps(), 10u);
  EXPECT_NEAR(st.time(), 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(g.P_plus[0], 0.0);
  for (std::size_t j = 10; j < g.size(); ++j) ASSERT_DOUBLE_EQ(g.P_plus[j], Pp0[j - 10]);
  for (std::size_t j = 1; j < 10; ++j) ASSERT_DOUBLE_EQ(g.P_plus[j], 0.0);
  for (std::size_t j = 1; j < g.size(); ++j)
    ASSERT_NEAR(g.P_minus[j], inflow(g.node(j) + 0.1), 1e-15);
}

TEST(Characteristics, ConstantSourceTrapezoid) {
  const double dr = 0.01, c = 0.7;
  RadialGrid g(dr, 1.0);
  CharacteristicStepper st(g, [](double) { return 0.0; });
  std::vector<double> S(g.size(), c);
  for (int n = 0; n < 5; ++n) st.step(g, S, S);
  for (std::size_t j = 1; j < g.size(); ++j) {
    const double r = g.node(j);
    ASSERT_NEAR(g.P_plus[j], c * std::min(r, 0.05), 1e-15);
    // the segment reaching past r_max picks up half its trapezoid weight
    const double expect = j == g.last() ? 0.5 * c * dr : c * std::min(0.05, 1.0 - r + 0.5 * dr);
    ASSERT_NEAR(g.P_minus[j], expect, 1e-15) << j;
  }
}

TEST(Characteristics, CoupledMatchesPrescribedWhenSourceKnown) {
  const double dr = 0.005;
  RadialGrid g(dr, 1.0);
  for (std::size_t j = 0; j < g.size(); ++j) g.j_phi[j] = std::exp(-10.0 * g.node(j));
  std::vector<double> S(g.size()), S_new(g.size());
  characteristic_source(g, S);
  CharacteristicStepper st(g, [](double) { return 0.0; });
  st.step_coupled(g, S, S_new);
  fields_from_P(g);
  for (std::size_t j = 1; j < g.size(); ++j)
    ASSERT_NEAR(S_new[j], g.B[j] - g.node(j) * g.j_phi[j], 1e-15);
}

TEST(Oracle, KinkAndDomain) {
  const double dr = 0.01, c = 0.3;
  const std::size_t n = 101;
  FieldHistory h(dr, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                 [](double) { return 0.0; });
  std::vector<double> S(n, c);
  for (int k = 0; k <= 20; ++k) h.record_source(S);
  EXPECT_EQ(h.levels(), 21u);
  EXPECT_NEAR(h.t_end(), 0.2, 1e-15);
  // r < t: the outgoing characteristic starts on the axis at t - r
  auto [pp, pm] = h.reference_P(0.2, 0.05);
  EXPECT_NEAR(pp, c * 0.05, 1e-15);
  EXPECT_NEAR(pm, c * 0.2, 1e-15);
  // r > t: it starts at t = 0
  std::tie(pp, pm) = h.reference_P(0.1, 0.3);
  EXPECT_NEAR(pp, c * 0.1, 1e-15);
  // incoming characteristic leaving the stored grid sees vacuum beyond it
  std::tie(pp, pm) = h.reference_P(0.2, 0.95);
  EXPECT_NEAR(pm, c * (0.05 + 0.5 * dr), 1e-15);
  const auto [Ephi, B] = h.reference_field_eval(0.1, 0.3);
  EXPECT_NEAR(Ephi, (0.03 + 0.03) / 0.6, 1e-14);
  EXPECT_NEAR(B, 0.0, 1e-14);
  EXPECT_THROW(h.reference_P(0.25, 0.3), std::domain_error);
  EXPECT_THROW(h.reference_P(0.1, 0.0), std::domain_error);
}

TEST(Oracle, PrescribedSources) {
  const double pi = std::numbers::pi;
  auto zero = [](double) { return 0.0; };
  auto b1 = [](double r) { return bump(r, 0.2, 0.05); };
  auto b2 = [](double r) { return bump(r, 0.45, 0.04); };
  const std::vector<SpaceTimeFn> sources = {
      [](double, double r) { return r * r * std::exp(-r); },
      [=](double t, double r) { return std::sin(40.0 * pi * t) * r; },
      [](double t, double r) { return std::exp(-200.0 * (r - 0.1 - t) * (r - 0.1 - t)); },
  };
  for (const auto& s : sources) {
    const auto cmp = compare_with_oracle(0.001, 0.5, 64, b1, b2, s);
    EXPECT_GT(cmp.scale, 0.0);
    EXPECT_LE(cmp.relative(), 1e-10);
  }
  const auto flat = compare_with_oracle(0.001, 0.5, 64, zero, zero, sources[0]);
  EXPECT_LE(flat.relative(), 1e-10);
}

TEST(Oracle, CoupledSources) {
  auto zero = [](double) { return 0.0; };
  auto seed = [](double r) { return bump(r, 0.3, 0.1); };
  const auto a = compare_with_oracle_coupled(
      0.001, 0.5, 64, zero, zero, [](double t, double r) { return r * std::exp(-30.0 * r) * (1.0 + t); });
  EXPECT_LE(a.relative(), 1e-10);
  const auto b = compare_with_oracle_coupled(
      0.001, 0.5, 64, seed, seed, [](double t, double r) { return std::cos(7.0 * r + 20.0 * t); });
  EXPECT_LE(b.relative(), 1e-10);
}

TEST(Oracle, VacuumAdvectionIsNodeExact) {
  EXPECT_LE(vacuum_advection_error(0.001, 2.0, 200, 1.5, 0.1), 1e-12);
  EXPECT_LE(vacuum_advection_error(0.001, 0.5, 64, 0.3, 0.05), 1e-12);
}

TEST(Norms, C1) {
  std::vector<double> v(101);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = 2.0 * 0.01 * static_cast<double>(j);
  EXPECT_NEAR(c1_norm(v, 0.01), 2.0 + 2.0, 1e-12);
  std::vector<double> w(101, 0.0);
  EXPECT_NEAR(c1_norm(v, w, 0.01), 4.0, 1e-12);
}
