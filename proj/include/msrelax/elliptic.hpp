#pragma once

#include <array>
#include <complex>
#include <vector>

// Weierstrass sigma function of the square lattice 2L(Z + iZ) (half periods
// omega1 = L, omega3 = iL) and the periodic fundamental solution
//   Lambda(z) = Re log sigma(z) - beta |z|^2,  beta = pi / (8 L^2),
// which satisfies Delta Lambda = 2 pi sum_w delta_w - pi / (2 L^2).
namespace msrelax::elliptic {

using cplx = std::complex<double>;

class LatticeKernel {
 public:
  explicit LatticeKernel(double L, int trunc = 16);

  double L() const { return L_; }
  int trunc() const { return trunc_; }
  cplx omega1() const { return {L_, 0.0}; }
  cplx omega3() const { return {0.0, L_}; }
  cplx eta1() const { return eta1_; }
  cplx eta3() const { return eta3_; }
  double background() const;

  // Overrides the quasi-periods (used to probe the Legendre residual).
  void set_quasi_periods(cplx eta1, cplx eta3) {
    eta1_ = eta1;
    eta3_ = eta3;
  }

  // Lattice sum G_n = sum_{w != 0} w^{-n} for n = 4, 8, ... of the unit-spacing
  // lattice Z[i]; the 2L-lattice value is G_n(Z[i]) / (2L)^n.
  long double eisenstein_unit(int n) const;
  int max_series_order() const { return static_cast<int>(unit_eisenstein_.size()) - 1; }

  // G_{4j} minus its partial sum over the shells max(|m|,|n|) <= trunc, unit lattice.
  const std::array<cplx, 3>& unit_tail() const { return unit_tail_; }

 private:
  double L_;
  int trunc_;
  cplx eta1_;
  cplx eta3_;
  std::vector<long double> unit_eisenstein_;  // index n, nonzero only for n % 4 == 0
  std::array<cplx, 3> unit_tail_{};
};

// log z + sum_{w != 0} [log(1 - z/w) + z/w + (z/w)^2 / 2] over square shells up to
// trunc, plus the exact remainder of the shells beyond trunc. Throws NearPole
// within 1e-8 L of a lattice point.
cplx log_sigma(const LatticeKernel& kernel, cplx z);

double lambda(const LatticeKernel& kernel, cplx z);

// Lambda evaluated after reducing z to the fundamental cell [-L, L)^2.
double lambda_periodic(const LatticeKernel& kernel, cplx z);

// log|z| - sum_{k = 4, 8, ...} Re(G_k z^k) / k - beta |z|^2 for |z| < 1.8 L.
// max_order <= 0 selects the truncation adaptively.
double lambda_series_small(const LatticeKernel& kernel, cplx z, int max_order = 0);

// Lambda(z) - log|z|, the smooth remainder near the origin (|z| < 1.8 L).
double lambda_smooth(const LatticeKernel& kernel, cplx z, int max_order = 0);

// |eta1 omega3 - eta3 omega1 - i pi / 2|
double legendre_residual(const LatticeKernel& kernel);

cplx wrap_to_cell(double L, cplx z);

// Charge bookkeeping of Delta Lambda = 2 pi delta - pi / (2 L^2) on one cell.
struct ChargeCheck {
  double boundary_flux = 0.0;    // outward flux of grad Lambda through the cell edges
  double circle_flux = 0.0;      // outward flux through |z| = r
  double circle_expected = 0.0;  // 2 pi - (pi / (2 L^2)) pi r^2
  double max_laplacian_error = 0.0;  // max |Delta_h (Lambda - log|z|) + pi / (2 L^2)| at the probes
  // |boundary_flux| + |circle_flux - circle_expected| + |cell integral of Delta_h Lambda - (-2 pi)|,
  // divided by 2 pi; the last term uses the probe mean of Delta_h Lambda.
  double residual = 0.0;
};

// Fluxes by the trapezoid rule on m points per edge (periodic integrands) and
// fourth-order central differences of step h L. Near the pole the differences act on
// Lambda - log|z|, whose flux through the circle is the exact 2 pi of log|z|
// plus the smooth part; the 5-point Laplacian probes use the same split.
ChargeCheck charge_check(const LatticeKernel& kernel, double r = 0.25, int m = 64, double h = 1e-3,
                         int probes = 100, unsigned seed = 1);

}  // namespace msrelax::elliptic
