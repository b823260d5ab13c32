#include <algorithm>
#include <cmath>
#include <sstream>

#include "vmfocus/fields.hpp"
#include "vmfocus/initdata.hpp"
#include "vmfocus/particles.hpp"

namespace vmfocus {

InitialDensityReport initial_density(const MarkerEnsemble& e, const InitialData& data,
                                     RadialGrid& grid) {
  deposit(e, grid);
  InitialDensityReport rep;
  rep.deposited_charge = deposited_charge(grid);
  bool any = false;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (grid.rho[j] <= 0.0) continue;
    if (!any) rep.support_lo = grid.node(j);
    rep.support_hi = grid.node(j);
    any = true;
    rep.rho_max = std::max(rep.rho_max, grid.rho[j]);
  }
  const double dr = grid.dr();
  if (any && (rep.support_lo < 0.5 - dr - 1e-12 || rep.support_hi > 1.0 + dr + 1e-12)) {
    std::ostringstream os;
    os << "initial density support [" << rep.support_lo << ", " << rep.support_hi
       << "] leaves [1/2 - dr, 1 + dr]";
    throw std::logic_error(os.str());
  }
  rep.shape_constant = rep.rho_max / data.params().pow_eps(data.params().alpha());
  rep.c1_norm = c1_norm(grid.rho, dr);
  return rep;
}

InitialFieldReport initial_fields(RadialGrid& grid, const InitialFieldProfile& profile,
                                  double eps_alpha) {
  gauss_Er(grid);
  InitialFieldReport rep;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double r = grid.node(j);
    grid.E_phi[j] = profile.E_phi(r);
    grid.B[j] = profile.B(r);
    rep.Er_max = std::max(rep.Er_max, std::abs(grid.E_r[j]));
    const double pair = std::hypot(grid.E_phi[j], grid.B[j]);
    rep.field_sup = std::max(rep.field_sup, pair);
    rep.field_r_sup = std::max(rep.field_r_sup, r * pair);
  }
  P_from_fields(grid);
  rep.field_c1 = c1_norm(grid.E_phi, grid.B, grid.dr());
  rep.Er_c1 = c1_norm(grid.E_r, grid.dr());
  rep.B_c1 = c1_norm(grid.B, grid.dr());
  if (rep.field_r_sup > eps_alpha / 200.0) {
    std::ostringstream os;
    os << "seeded fields exceed eps^alpha/(200 r): sup r|(E_phi, B)| = " << rep.field_r_sup;
    throw ConfigError(os.str());
  }
  if (rep.field_c1 > eps_alpha / 200.0) {
    std::ostringstream os;
    os << "seeded fields exceed the C1 budget eps^alpha/200: " << rep.field_c1;
    throw ConfigError(os.str());
  }
  return rep;
}

}  // namespace vmfocus
