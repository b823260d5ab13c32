#include "vmfocus/particles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vmfocus {

namespace {

std::string axis_message(std::size_t marker, double r, int substeps) {
  std::ostringstream os;
  os << "axis crossing: marker " << marker << " reached r = " << r << " with " << substeps
     << " substeps";
  return os.str();
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int thread_id() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

constexpr int kMaxDoublings = 8;

}  // namespace

AxisCrossing::AxisCrossing(std::size_t marker, double r, int substeps)
    : std::runtime_error(axis_message(marker, r, substeps)), marker_(marker), substeps_(substeps) {}

FieldSnapshot::FieldSnapshot(const RadialGrid& grid)
    : data_(3 * grid.size()), n_(grid.size()), dr_(grid.dr()), inv_dr_(1.0 / grid.dr()),
      r_max_(grid.r_max()) {
  for (std::size_t j = 0; j < n_; ++j) {
    data_[3 * j] = grid.E_r[j];
    data_[3 * j + 1] = grid.E_phi[j];
    data_[3 * j + 2] = grid.B[j];
  }
}

FieldSnapshot FieldSnapshot::zero(double dr, double r_max) {
  FieldSnapshot f;
  f.n_ = static_cast<std::size_t>(std::llround(r_max / dr)) + 1;
  f.data_.assign(3 * f.n_, 0.0);
  f.dr_ = dr;
  f.inv_dr_ = 1.0 / dr;
  f.r_max_ = dr * static_cast<double>(f.n_ - 1);
  f.vacuum_ = true;
  return f;
}

int adaptive_substeps(const MarkerEnsemble& e, double dt, double dr) {
  double v2 = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double vt = e.L[i] / e.r[i];
    v2 = std::max(v2, e.rdot[i] * e.rdot[i] + vt * vt);
  }
  return std::max(1, static_cast<int>(std::ceil(4.0 * std::sqrt(v2) * dt / dr)));
}

bool rk4_step(const FieldSnapshot& f, double h, double& r, double& rdot, double& L) {
  double F[3] = {0.0, 0.0, 0.0};
  const bool vac = f.vacuum();
  auto rhs = [&](double x, double v, double l, double& dx, double& dv, double& dl) {
    if (!vac) f.eval(x, F);
    const double inv = 1.0 / x;
    const double w = l * inv;
    dx = v;
    dv = w * w * inv + F[0] + w * F[2];
    dl = x * (F[1] - v * F[2]);
  };
  double k1r, k1v, k1l, k2r, k2v, k2l, k3r, k3v, k3l, k4r, k4v, k4l;
  rhs(r, rdot, L, k1r, k1v, k1l);
  double x = r + 0.5 * h * k1r;
  if (!(x > 0.0)) return false;
  rhs(x, rdot + 0.5 * h * k1v, L + 0.5 * h * k1l, k2r, k2v, k2l);
  x = r + 0.5 * h * k2r;
  if (!(x > 0.0)) return false;
  rhs(x, rdot + 0.5 * h * k2v, L + 0.5 * h * k2l, k3r, k3v, k3l);
  x = r + h * k3r;
  if (!(x > 0.0)) return false;
  rhs(x, rdot + h * k3v, L + h * k3l, k4r, k4v, k4l);
  const double c = h / 6.0;
  const double rn = r + c * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
  if (!(rn > 0.0)) return false;
  r = rn;
  rdot += c * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  L += c * (k1l + 2.0 * k2l + 2.0 * k3l + k4l);
  return true;
}

PushStats push(MarkerEnsemble& e, const FieldSnapshot& f, double dt, int substeps) {
  if (substeps < 1) throw std::invalid_argument("push: substeps must be >= 1");
  PushStats stats;
  stats.substeps = substeps;
  stats.max_substeps = substeps;
  const auto n = static_cast<std::ptrdiff_t>(e.size());
  const double r_max = f.r_max();

  std::atomic<bool> failed{false};
  std::size_t fail_marker = 0;
  double fail_r = 0.0;
  int fail_sub = 0;
  bool out_of_grid = false;
  std::size_t rejected = 0;
  int max_sub = substeps;

#pragma omp parallel for schedule(static) reduction(+ : rejected) reduction(max : max_sub)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    int sub = substeps;
    for (int attempt = 0; attempt <= kMaxDoublings; ++attempt, sub *= 2) {
      double r = e.r[i], v = e.rdot[i], L = e.L[i];
      const double h = dt / sub;
      bool ok = true;
      for (int s = 0; s < sub && ok; ++s) ok = rk4_step(f, h, r, v, L) && r < r_max;
      if (ok) {
        e.r[i] = r;
        e.rdot[i] = v;
        e.L[i] = L;
        if (attempt > 0) ++rejected;
        max_sub = std::max(max_sub, sub);
        break;
      }
      if (r >= r_max || attempt == kMaxDoublings) {
#pragma omp critical(vmfocus_push_failure)
        {
          if (!failed.load()) {
            fail_marker = static_cast<std::size_t>(i);
            fail_r = r;
            fail_sub = sub;
            out_of_grid = r >= r_max;
            failed.store(true);
          }
        }
        break;
      }
    }
  }
  if (failed.load()) {
    if (out_of_grid) {
      std::ostringstream os;
      os << "push: marker " << fail_marker << " left the grid at r = " << fail_r;
      throw std::out_of_range(os.str());
    }
    throw AxisCrossing(fail_marker, fail_r, fail_sub);
  }
  stats.rejected = rejected;
  stats.max_substeps = max_sub;
  return stats;
}

void deposit(const MarkerEnsemble& e, RadialGrid& grid) {
  const std::size_t nodes = grid.size();
  const double inv_dr = 1.0 / grid.dr();
  const double r_max = grid.r_max();
  const int nt = thread_count();
  // Per-thread private grids, interleaved (rho, j_r, j_phi), merged in
  // thread order so the result does not depend on scheduling.
  std::vector<double> priv(static_cast<std::size_t>(nt) * 3 * nodes, 0.0);
  const auto n = static_cast<std::ptrdiff_t>(e.size());
  std::atomic<bool> bad{false};

#pragma omp parallel
  {
    double* g = priv.data() + static_cast<std::size_t>(thread_id()) * 3 * nodes;
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double r = e.r[i];
      if (!(r >= 0.0 && r < r_max)) {
        bad.store(true, std::memory_order_relaxed);
        continue;
      }
      const double s = r * inv_dr;
      const auto j = static_cast<std::size_t>(s);
      const double f = s - static_cast<double>(j);
      const double w = e.weight[i];
      const double wr = w * e.rdot[i];
      const double wp = w * e.L[i] / r;
      double* a = g + 3 * j;
      a[0] += (1.0 - f) * w;
      a[1] += (1.0 - f) * wr;
      a[2] += (1.0 - f) * wp;
      a[3] += f * w;
      a[4] += f * wr;
      a[5] += f * wp;
    }
  }
  if (bad.load()) throw std::out_of_range("deposit: marker outside the radial grid");

  for (std::size_t j = 0; j < nodes; ++j) {
    double q = 0.0, jr = 0.0, jp = 0.0;
    for (int t = 0; t < nt; ++t) {
      const double* a = priv.data() + static_cast<std::size_t>(t) * 3 * nodes + 3 * j;
      q += a[0];
      jr += a[1];
      jp += a[2];
    }
    const double area = grid.shell_area(j);
    grid.rho[j] = q / area;
    grid.j_r[j] = jr / area;
    grid.j_phi[j] = jp / area;
  }
}

double deposited_charge(const RadialGrid& grid) {
  double q = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) q += grid.rho[j] * grid.shell_area(j);
  return q;
}

std::pair<double, double> support_extent(const MarkerEnsemble& e) {
  if (e.empty()) throw std::invalid_argument("support_extent: empty ensemble");
  const auto [lo, hi] = std::minmax_element(e.r.begin(), e.r.end());
  return {*lo, *hi};
}

double free_streaming_radius(double r0, double rdot0, double L, double t) {
  const double vt = L / r0;
  return std::sqrt(r0 * r0 + 2.0 * r0 * rdot0 * t + (rdot0 * rdot0 + vt * vt) * t * t);
}

void TrajectoryLog::record(double t, const MarkerEnsemble& e) {
  if (!enabled()) return;
  for (std::size_t i = 0; i < e.size(); i += stride_) {
    t_.push_back(t);
    id_.push_back(i);
    r_.push_back(e.r[i]);
    rdot_.push_back(e.rdot[i]);
    L_.push_back(e.L[i]);
  }
}

void TrajectoryLog::write_csv(std::ostream& os) const {
  os << "t,marker,r,rdot,L\n" << std::setprecision(17);
  for (std::size_t k = 0; k < t_.size(); ++k)
    os << t_[k] << ',' << id_[k] << ',' << r_[k] << ',' << rdot_[k] << ',' << L_[k] << '\n';
}

}  // namespace vmfocus
