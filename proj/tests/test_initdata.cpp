#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "vmfocus/fields.hpp"
#include "vmfocus/initdata.hpp"

using namespace vmfocus;

namespace {

FocusingParams reference() { return FocusingParams(0.05, 0.01, 0.6, 0.045); }

const InitialData& data() {
  static const InitialData d(reference(), 0.01);
  return d;
}

}  // namespace

TEST(Bump, IntegralAndSupport) {
  EXPECT_NEAR(smooth_bump_integral(), 0.44399381616807944, 1e-12);
  EXPECT_DOUBLE_EQ(smooth_bump(1.0), 0.0);
  EXPECT_DOUBLE_EQ(smooth_bump(-1.2), 0.0);
  EXPECT_NEAR(smooth_bump(0.0), std::exp(-1.0), 1e-15);
  const double h = 1e-6;
  EXPECT_NEAR(smooth_bump_derivative(0.3), (smooth_bump(0.3 + h) - smooth_bump(0.3 - h)) / (2 * h),
              1e-8);
}

TEST(Cutoff, ValuesAndNorms) {
  const CutoffChi chi;
  EXPECT_DOUBLE_EQ(chi(0.5), 0.0);
  EXPECT_DOUBLE_EQ(chi(0.7), 1.0);
  EXPECT_DOUBLE_EQ(chi(1.0), 0.0);
  EXPECT_NEAR(chi(0.6), 0.9305962794998959, 1e-9);
  EXPECT_NEAR(chi(0.95), 0.3365225134319684, 1e-9);
  EXPECT_NEAR(chi.c1(), 13.257101437905682, 1e-4);
  EXPECT_NEAR(chi.d1(), 14.257101437905682, 1e-4);
  EXPECT_NEAR(chi.integral_r2(0.5, 1.0), 0.2155636430218708, 1e-11);
}

TEST(Profile, Normalization) {
  const BumpProfile unit(1.0);
  EXPECT_NEAR(unit.normalization(), 6.618635779612062, 1e-8);
  EXPECT_NEAR(unit.integral(), 1.0, 1e-9);
  const BumpProfile narrow(0.01);
  EXPECT_NEAR(narrow.integral(), 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(narrow(0.5e-4, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(narrow(1e-4, 0.5e-4), 0.0);
  EXPECT_GT(narrow(0.0, 0.5e-4), 0.0);
}

TEST(InitialData, ExactMass) {
  EXPECT_NEAR(data().exact_mass(), 1.1836111102263895, 1e-10);
}

TEST(InitialData, DensityAndSupport) {
  EXPECT_THROW(data().f0(0.0, -30.0, 6.0), std::domain_error);
  EXPECT_DOUBLE_EQ(data().f0(0.4, -30.0, 6.0), 0.0);
  const auto box = data().support_box(0.75);
  EXPECT_LT(box.rdot_abs_lo, box.rdot_abs_hi);
  EXPECT_LT(box.phidot_lo, box.phidot_hi);
  const double spread = reference().h_scale() * 0.01;
  EXPECT_NEAR(box.phidot_lo, reference().angular_speed() - spread, 1e-12);
  EXPECT_NEAR(box.rdot_abs_hi, (0.75 + spread) * reference().radial_speed_scale(), 1e-11);
}

TEST(Sampler, WeightsSumToExactMass) {
  for (std::size_t n : {5000u, 20000u, 50000u}) {
    const MarkerEnsemble e = sample_markers(data(), n, 1);
    EXPECT_GE(e.size(), n / 2) << n;
    EXPECT_NEAR(e.total_weight() / data().exact_mass(), 1.0, 1e-10) << n;
  }
}

TEST(Sampler, MarkersInsideSupportBox) {
  const MarkerEnsemble e = sample_markers(data(), 20000, 3, true);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double r = e.r[i];
    ASSERT_GT(r, 0.5);
    ASSERT_LT(r, 1.0);
    const auto box = data().support_box(r);
    const double phidot = e.L[i] / (r * r);
    ASSERT_GE(-e.rdot[i], box.rdot_abs_lo - 1e-12);
    ASSERT_LE(-e.rdot[i], box.rdot_abs_hi + 1e-12);
    ASSERT_GE(phidot, box.phidot_lo - 1e-12);
    ASSERT_LE(phidot, box.phidot_hi + 1e-12);
    ASSERT_GT(e.weight[i], 0.0);
  }
}

TEST(Sampler, Deterministic) {
  const MarkerEnsemble a = sample_markers(data(), 5000, 7, true);
  const MarkerEnsemble b = sample_markers(data(), 5000, 7, true);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a.r[i], b.r[i]);
}

TEST(Sampler, Strata) {
  const auto s = strata_for(200000);
  EXPECT_GE(s.count(), 200000u);
  EXPECT_EQ(s.n_vel, 14u);
  EXPECT_THROW(strata_for(4), ConfigError);
}

TEST(InitialGrid, DensityShape) {
  const MarkerEnsemble e = sample_markers(data(), 20000, 1);
  RadialGrid g(1e-3, 2.0);
  const auto rep = initial_density(e, data(), g);
  EXPECT_NEAR(rep.deposited_charge / e.total_weight(), 1.0, 1e-12);
  EXPECT_GE(rep.support_lo, 0.5 - 1e-3);
  EXPECT_LE(rep.support_hi, 1.0 + 1e-3);
  EXPECT_GT(rep.shape_constant, 0.25);
  EXPECT_LT(rep.shape_constant, 1.0);
}

TEST(InitialGrid, SeededFieldsRespectBudget) {
  const double ea = reference().pow_eps(reference().alpha());
  const InitialFieldProfile prof(FieldMode::Seeded, ea);
  EXPECT_LE(prof.support_end(), 1.6 + 1e-12);
  const MarkerEnsemble e = sample_markers(data(), 5000, 1);
  RadialGrid g(1e-3, 2.0);
  initial_density(e, data(), g);
  const auto rep = initial_fields(g, prof, ea);
  EXPECT_GT(rep.field_sup, 0.0);
  EXPECT_LE(rep.field_c1, ea / 200.0);
  EXPECT_NEAR(rep.Er_max, e.total_weight() / (2.0 * std::numbers::pi * 1.0), 0.05);
  for (std::size_t j = 1; j < g.size(); ++j) {
    ASSERT_NEAR(g.P_plus[j], g.node(j) * (g.E_phi[j] + g.B[j]), 1e-15);
  }

  const InitialFieldProfile zero(FieldMode::Zero, ea);
  EXPECT_DOUBLE_EQ(zero.E_phi(1.5), 0.0);
  EXPECT_DOUBLE_EQ(zero.B(1.5), 0.0);
}

TEST(EnsembleIO, CsvRoundTrip) {
  const MarkerEnsemble e = sample_markers(data(), 5000, 2, true);
  std::stringstream ss;
  write_ensemble_csv(ss, e);
  const MarkerEnsemble back = read_ensemble_csv(ss);
  ASSERT_EQ(back.size(), e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    ASSERT_EQ(back.r[i], e.r[i]);
    ASSERT_EQ(back.rdot[i], e.rdot[i]);
    ASSERT_EQ(back.L[i], e.L[i]);
    ASSERT_EQ(back.weight[i], e.weight[i]);
  }
}

TEST(EnsembleIO, BinaryRoundTrip) {
  const MarkerEnsemble e = sample_markers(data(), 5000, 2, true);
  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  write_ensemble_binary(ss, e);
  const std::string bytes = ss.str();
  EXPECT_EQ(bytes.substr(0, 8), "VMFENS01");
  EXPECT_EQ(bytes.size(), 16 + 32 * e.size());
  const MarkerEnsemble back = read_ensemble_binary(ss);
  ASSERT_EQ(back.size(), e.size());
  for (std::size_t i = 0; i < e.size(); ++i) ASSERT_EQ(back.weight[i], e.weight[i]);

  std::stringstream bad("NOTMAGIC........");
  EXPECT_ANY_THROW(read_ensemble_binary(bad));
  std::stringstream bad_csv("r,rdot,L,weight\n0.5,1,2\n");
  EXPECT_ANY_THROW(read_ensemble_csv(bad_csv));
}
