#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "vmfocus/bounds.hpp"

using namespace vmfocus;

TEST(Envelope, ReferenceCoefficients) {
  const auto env = envelope_coeffs(0.75, -26.5, 6.03, 2.6);
  EXPECT_NEAR(env.C, 4.366875, 1e-14);
  EXPECT_NEAR(env.A, 767.924453026749, 1e-10);
  EXPECT_NEAR(env.B, 41.300409765625, 1e-12);
  EXPECT_NEAR(env.s_m, 0.02573827051534848, 1e-15);
  EXPECT_NEAR(env.minimum(), 0.053781865654675766, 1e-15);
  EXPECT_TRUE(env.valid());
  EXPECT_DOUBLE_EQ(env.window(), 0.0075);
}

TEST(Envelope, Evaluation) {
  const auto env = envelope_coeffs(0.75, -26.5, 6.03, 2.6);
  const auto v0 = envelope_eval(env, 0.0);
  EXPECT_NEAR(v0.value, 0.5625, 1e-15);
  EXPECT_TRUE(v0.in_window);
  const auto vm = envelope_eval(env, env.s_m);
  EXPECT_NEAR(vm.value, env.minimum(), 1e-14);
  EXPECT_FALSE(vm.in_window);
  EXPECT_LT(envelope_eval(env, 0.005).value, 0.5625);
}

TEST(Envelope, RejectsBadInputs) {
  EXPECT_THROW(envelope_coeffs(0.0, -1.0, 1.0, 1.0), std::domain_error);
  EXPECT_THROW(envelope_coeffs(1.5, -1.0, 1.0, 1.0), std::domain_error);
  EXPECT_THROW(envelope_coeffs(0.5, 1.0, 1.0, 1.0), std::domain_error);
  EXPECT_THROW(envelope_coeffs(0.5, -1.0, 0.0, 1.0), std::domain_error);
  EXPECT_THROW(envelope_coeffs(0.5, -1.0, 1.0, 0.0), std::domain_error);
}

TEST(Envelope, FailedFlags) {
  const auto env = envelope_coeffs(0.75, -26.5, 1.0, 10.0);
  EXPECT_FALSE(env.angular_ok);
  EXPECT_FALSE(env.valid());
  EXPECT_TRUE(std::isnan(env.s_m));
  EXPECT_THROW(envelope_eval(env, 0.0), std::logic_error);
  AdversarialOptions opt;
  EXPECT_THROW(adversarial_envelope_test(env, opt), std::logic_error);
}

TEST(Adversarial, ReferenceTuple) {
  const auto env = envelope_coeffs(0.75, -26.5, 6.03, 2.6);
  AdversarialOptions opt;
  opt.trials = 12;
  const auto res = adversarial_envelope_test(env, opt);
  EXPECT_EQ(res.trials, 12u);
  EXPECT_EQ(res.violations, 0u);
  EXPECT_EQ(res.angular_violations, 0u);
  EXPECT_EQ(res.invalid, 0u);
  EXPECT_LT(res.worst_excess, 0.0);
}

TEST(Adversarial, ZeroFields) {
  const auto env = envelope_coeffs(0.6, -80.0, 12.0, 0.5);
  AdversarialOptions opt;
  opt.trials = 2;
  opt.zero_fields = true;
  const auto res = adversarial_envelope_test(env, opt);
  EXPECT_EQ(res.violations, 0u);
  EXPECT_EQ(res.invalid, 0u);
}

TEST(Adversarial, TupleDraws) {
  const auto a = draw_envelope_tuples(10, 5);
  const auto b = draw_envelope_tuples(10, 5);
  ASSERT_EQ(a.size(), 10u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(a[i].valid());
    EXPECT_EQ(a[i].r0, b[i].r0);
    EXPECT_GE(a[i].r0, 0.3);
    EXPECT_LE(a[i].r0, 1.0);
    EXPECT_LE(a[i].rdot0, -20.0);
    EXPECT_GE(a[i].m, 0.01);
  }
}

TEST(Adversarial, SmallSuite) {
  const auto res = run_envelope_suite(4, 4, 11);
  EXPECT_EQ(res.tuples, 4u);
  EXPECT_EQ(res.trials, 16u);
  EXPECT_EQ(res.violations, 0u);
  EXPECT_EQ(res.angular_violations, 0u);
}

namespace {

FieldSample point_charge(double t, double M, double dr, std::size_t n, double scale) {
  FieldSample s;
  s.t = t;
  s.E_r.assign(n, 0.0);
  s.E_phi.assign(n, 0.0);
  s.B.assign(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    const double r = dr * static_cast<double>(j);
    s.E_r[j] = scale * M / (2.0 * std::numbers::pi * r);
  }
  return s;
}

}  // namespace

TEST(FieldBounds, GaussAndFarField) {
  const double dr = 0.01, M = 1.2;
  std::vector<FieldSample> samples = {point_charge(0.0, M, dr, 201, 1.0),
                                      point_charge(0.05, M, dr, 201, 0.5)};
  for (std::size_t j = 1; j < 201; ++j) samples[1].B[j] = 1e-3 / (dr * static_cast<double>(j));
  FieldBoundInput in{dr, M, 20.0, 6.0, 0.05, 1e-4, 0.01, 10.0};
  const auto rep = check_field_bounds(samples, in);
  EXPECT_TRUE(rep.asserted_pass());
  EXPECT_NEAR(rep.check("gauss_Er").worst_ratio, 1.0, 1e-14);
  EXPECT_EQ(rep.check("far_field_6KK1T").violations, 0u);
  EXPECT_GT(rep.check("far_field_6KK1T").checked, 0u);
  EXPECT_NEAR(rep.check("claim_field").worst_ratio, 0.1, 1e-12);
  EXPECT_NEAR(rep.node_r.front(), 0.3, 1e-15);
  EXPECT_FALSE(rep.to_json().empty());

  samples[0] = point_charge(0.0, M, dr, 201, 1.01);
  const auto bad = check_field_bounds(samples, in);
  EXPECT_FALSE(bad.asserted_pass());
  EXPECT_EQ(bad.check("gauss_Er").violations, 200u);

  in.T1 = 0.5;
  EXPECT_THROW(check_field_bounds(samples, in), std::domain_error);
}
