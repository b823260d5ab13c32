#include "vmfocus/initdata.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace vmfocus {

namespace {

using boost::math::quadrature::gauss_kronrod;

template <class F>
double integrate(F f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

// exp(-1/(1-x)) on [0, 1); the profile factor in a squared argument.
double radial_factor(double x) {
  if (x < 0.0 || x >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - x));
}

// Same factor moved into the open interval (0, 1).
double shell_factor(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double y = 2.0 * x - 1.0;
  return radial_factor(y * y);
}

}  // namespace

double smooth_bump(double x) {
  if (x <= -1.0 || x >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - x * x));
}

double smooth_bump_derivative(double x) {
  if (x <= -1.0 || x >= 1.0) return 0.0;
  const double q = 1.0 - x * x;
  return smooth_bump(x) * (-2.0 * x / (q * q));
}

double smooth_bump_integral() {
  static const double value = integrate(smooth_bump, -1.0, 1.0);
  return value;
}

// ---------------------------------------------------------------------------

BumpProfile::BumpProfile(double width) : width_(width) {
  if (!(width > 0.0 && width <= 1.0))
    throw std::domain_error("bump profile width must lie in (0, 1]");
  const double i1 = integrate([](double s) { return radial_factor(s * s); }, -1.0, 1.0);
  const double i2 = integrate([](double s) { return shell_factor(s * s); }, -1.0, 1.0);
  z_ = 1.0 / (width_ * width_ * i1 * i2);
  const double check = integral();
  if (std::abs(check - 1.0) > 1e-8) {
    std::ostringstream os;
    os << "bump profile normalization check failed: integral = " << std::setprecision(17)
       << check;
    throw std::logic_error(os.str());
  }
}

double BumpProfile::operator()(double a, double b) const {
  const double w2 = width_ * width_;
  return z_ * radial_factor(a / w2) * shell_factor(b / w2);
}

double BumpProfile::integral() const {
  // Midpoint tensor rule over the support square; the integrand is flat to
  // all orders at the boundary so the rule converges spectrally.
  constexpr int n = 1200;
  const double h = 2.0 * width_ / n;
  std::vector<double> u2(n);
  for (int i = 0; i < n; ++i) {
    const double u = -width_ + (i + 0.5) * h;
    u2[i] = u * u;
  }
  // H is separable, but sum the full tensor product to check the product as
  // evaluated rather than its factors.
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sum += (*this)(u2[i], u2[j]);
  return sum * h * h;
}

// ---------------------------------------------------------------------------

CutoffChi::CutoffChi() {
  constexpr int n = 4096;
  table_.resize(n + 1);
  const double h = 2.0 / n;
  const double total = smooth_bump_integral();
  double acc = 0.0;
  table_[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += boost::math::quadrature::gauss<double, 15>::integrate(smooth_bump, -1.0 + i * h,
                                                                 -1.0 + (i + 1) * h);
    table_[i + 1] = acc / total;
  }
  table_[n] = 1.0;

  c1_ = 0.0;
  constexpr int samples = 200000;
  for (int i = 0; i <= samples; ++i) {
    const double r = 0.5 + 0.5 * i / samples;
    c1_ = std::max(c1_, std::abs(derivative(r)));
  }
}

double CutoffChi::step(double x) const {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const int n = static_cast<int>(table_.size()) - 1;
  const double h = 2.0 / n;
  const double s = (x + 1.0) / h;
  const int i = std::min(static_cast<int>(s), n - 1);
  const double t = s - i;
  // Cubic Hermite with the exact derivative of the primitive.
  const double total = smooth_bump_integral();
  const double x0 = -1.0 + i * h;
  const double d0 = smooth_bump(x0) / total * h;
  const double d1 = smooth_bump(x0 + h) / total * h;
  const double y0 = table_[i], y1 = table_[i + 1];
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * d1;
}

double CutoffChi::operator()(double r) const {
  if (r <= 0.5 || r >= 1.0) return 0.0;
  if (r < 0.625) return step((r - 0.5625) * 16.0);
  if (r <= 0.875) return 1.0;
  return step((0.9375 - r) * 16.0);
}

double CutoffChi::integral_r2(double a, double b) const {
  using boost::math::quadrature::gauss;
  if (b < a) return -integral_r2(b, a);
  a = std::max(a, 0.5);
  b = std::min(b, 1.0);
  if (!(b > a)) return 0.0;
  // Between table nodes chi is a cubic, so r^2 chi is a quintic there.
  const int n = static_cast<int>(table_.size()) - 1;
  std::vector<double> cuts{a, b, 0.625, 0.875};
  auto node_r = [&](double r_lo, double r_hi, double center, double dir) {
    for (int i = 0; i <= n; ++i) {
      const double r = center + dir * (-1.0 + 2.0 * i / n) / 16.0;
      if (r > r_lo && r < r_hi) cuts.push_back(r);
    }
  };
  if (a < 0.625) node_r(a, std::min(b, 0.625), 0.5625, 1.0);
  if (b > 0.875) node_r(std::max(a, 0.875), b, 0.9375, -1.0);
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = std::max(cuts[i], a), hi = std::min(cuts[i + 1], b);
    if (hi > lo)
      sum += gauss<double, 7>::integrate([this](double r) { return r * r * (*this)(r); }, lo, hi);
  }
  return sum;
}

double CutoffChi::derivative(double r) const {
  const double total = smooth_bump_integral();
  if (r <= 0.5 || r >= 1.0) return 0.0;
  if (r < 0.625) return 16.0 * smooth_bump((r - 0.5625) * 16.0) / total;
  if (r <= 0.875) return 0.0;
  return -16.0 * smooth_bump((0.9375 - r) * 16.0) / total;
}

// ---------------------------------------------------------------------------

void MarkerEnsemble::reserve(std::size_t n) {
  r.reserve(n);
  rdot.reserve(n);
  L.reserve(n);
  weight.reserve(n);
}

void MarkerEnsemble::push_back(double r0, double rdot0, double L0, double w) {
  r.push_back(r0);
  rdot.push_back(rdot0);
  L.push_back(L0);
  weight.push_back(w);
}

double MarkerEnsemble::total_weight() const {
  double s = 0.0;
  for (double w : weight) s += w;
  return s;
}

StrataLayout strata_for(std::size_t n) {
  const auto n_vel = static_cast<std::size_t>(std::cbrt(static_cast<double>(n) / 64.0));
  StrataLayout s{0, std::max<std::size_t>(n_vel, 2)};
  s.n_r = (n + s.n_vel * s.n_vel - 1) / (s.n_vel * s.n_vel);
  if (s.n_r < 2) {
    std::ostringstream os;
    os << "marker count " << n << " is too small to stratify the support box"
       << " (need at least 2 strata per dimension, i.e. n >= 8)";
    throw ConfigError(os.str());
  }
  return s;
}

// ---------------------------------------------------------------------------

InitialData::InitialData(const FocusingParams& params, double h_width)
    : params_(params), h_(h_width) {}

double InitialData::h_eps(double a, double b) const {
  const double s = params_.pow_eps(4.0 * params_.k());
  return h_(a / s, b / s) / s;
}

double InitialData::f0(double r, double rdot, double phidot) const {
  if (!(r > 0.0)) throw std::domain_error("f0 evaluated at r <= 0");
  if (rdot >= 0.0) return 0.0;
  const double chi = chi_(r);
  if (chi == 0.0) return 0.0;
  const auto& p = params_;
  const double u1 = r - std::abs(rdot) * p.focus_time();
  const double u2 = phidot - p.angular_speed();
  return p.pow_eps(p.alpha() - p.k() + 2.0 * p.l()) * h_eps(u1 * u1, u2 * u2) * chi;
}

double InitialData::exact_mass() const {
  return 2.0 * std::numbers::pi * params_.pow_eps(params_.alpha()) * chi_.integral_r2(0.5, 1.0);
}

InitialData::Box InitialData::support_box(double r) const {
  const auto& p = params_;
  const double spread = p.h_scale() * h_.width();
  return Box{(r - spread) * p.radial_speed_scale(), (r + spread) * p.radial_speed_scale(),
             p.angular_speed() - spread, p.angular_speed() + spread};
}

MarkerEnsemble sample_markers(const InitialData& data, std::size_t n, std::uint64_t seed,
                              bool jitter) {
  using boost::math::quadrature::gauss;
  const auto layout = strata_for(n);
  const auto& p = data.params();
  const double w = data.profile().width();
  const double e2k = p.h_scale();
  const double speed = p.radial_speed_scale();
  const auto& chi = data.chi();

  const double dr = 0.5 / static_cast<double>(layout.n_r);
  const double du = 2.0 * w / static_cast<double>(layout.n_vel);

  // In (r, u1, u2) the density separates into chi(r) r^2 times the two
  // profile factors, so each cell integral is a product of 1D integrals.
  const double w2 = w * w;
  std::vector<double> g1(layout.n_vel), g2(layout.n_vel);
  auto cell_integral = [&](auto f, double a) {
    constexpr int pieces = 64;
    const double h = du / pieces;
    double sum = 0.0;
    for (int q = 0; q < pieces; ++q) sum += gauss<double, 15>::integrate(f, a + q * h, a + (q + 1) * h);
    return sum;
  };
  for (std::size_t j = 0; j < layout.n_vel; ++j) {
    const double a = -w + static_cast<double>(j) * du;
    g1[j] = cell_integral([&](double u) { return radial_factor(u * u / w2); }, a);
    g2[j] = cell_integral([&](double u) { return shell_factor(u * u / w2); }, a);
  }
  const double scale =
      2.0 * std::numbers::pi * p.pow_eps(p.alpha()) * data.profile().normalization();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto offset = [&]() { return jitter ? unit(rng) : 0.5; };

  MarkerEnsemble e;
  e.reserve(layout.count());
  for (std::size_t i = 0; i < layout.n_r; ++i) {
    const double lo = 0.5 + static_cast<double>(i) * dr;
    const double gr = chi.integral_r2(lo, lo + dr);
    for (std::size_t j = 0; j < layout.n_vel; ++j) {
      for (std::size_t k = 0; k < layout.n_vel; ++k) {
        const double weight = scale * gr * g1[j] * g2[k];
        const double r = lo + offset() * dr;
        const double u1 = -w + (static_cast<double>(j) + offset()) * du;
        const double u2 = -w + (static_cast<double>(k) + offset()) * du;
        if (!(weight > 0.0)) continue;
        const double rdot = -(r - e2k * u1) * speed;
        const double phidot = p.angular_speed() + e2k * u2;
        e.push_back(r, rdot, r * r * phidot, weight);
      }
    }
  }
  return e;
}

// ---------------------------------------------------------------------------

InitialFieldProfile::InitialFieldProfile(FieldMode mode, double eps_alpha) : mode_(mode) {
  if (mode_ == FieldMode::Zero) return;
  double slope = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    const double x = -1.0 + 2.0 * i / 100000.0;
    slope = std::max(slope, std::abs(smooth_bump_derivative(x)));
  }
  // Unit-peak bump: e * smooth_bump. The (E_phi, B) pair is (1/2, 1) times it.
  const double pair_norm = std::sqrt(1.25);
  const double c1_unit = pair_norm * std::numbers::e * (1.0 / std::numbers::e + slope / half_width_);
  amplitude_ = 0.5 * (eps_alpha / 200.0) / c1_unit;
}

double InitialFieldProfile::B(double r) const {
  if (mode_ == FieldMode::Zero) return 0.0;
  return amplitude_ * std::numbers::e * smooth_bump((r - center_) / half_width_);
}

double InitialFieldProfile::E_phi(double r) const { return 0.5 * B(r); }

// ---------------------------------------------------------------------------

void write_ensemble_csv(std::ostream& os, const MarkerEnsemble& e) {
  os << "r,rdot,L,weight\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < e.size(); ++i)
    os << e.r[i] << ',' << e.rdot[i] << ',' << e.L[i] << ',' << e.weight[i] << '\n';
}

MarkerEnsemble read_ensemble_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("r,rdot,L,weight", 0) != 0)
    throw std::runtime_error("ensemble CSV: missing header r,rdot,L,weight");
  MarkerEnsemble e;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    double v[4];
    char comma;
    if (!(ls >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3]))
      throw std::runtime_error("ensemble CSV: malformed row " + std::to_string(row));
    e.push_back(v[0], v[1], v[2], v[3]);
  }
  return e;
}

namespace {

constexpr char kMagic[8] = {'V', 'M', 'F', 'E', 'N', 'S', '0', '1'};

template <class T>
void put_le(std::ostream& os, T value) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  os.write(reinterpret_cast<const char*>(bits.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bits;
  if (!is.read(reinterpret_cast<char*>(bits.data()), sizeof(T)))
    throw std::runtime_error("ensemble binary: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_ensemble_binary(std::ostream& os, const MarkerEnsemble& e) {
  os.write(kMagic, sizeof(kMagic));
  put_le<std::uint64_t>(os, e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    put_le(os, e.r[i]);
    put_le(os, e.rdot[i]);
    put_le(os, e.L[i]);
    put_le(os, e.weight[i]);
  }
}

MarkerEnsemble read_ensemble_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("ensemble binary: bad magic");
  const auto n = get_le<std::uint64_t>(is);
  MarkerEnsemble e;
  e.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double r = get_le<double>(is);
    const double rdot = get_le<double>(is);
    const double L = get_le<double>(is);
    const double w = get_le<double>(is);
    e.push_back(r, rdot, L, w);
  }
  return e;
}

}  // namespace vmfocus
