#pragma once

#include "msrelax/geometry.hpp"

// H = ||chi_A - chi_B||^2 in the homogeneous H^{-1} norm of the torus
// [-L, L)^2, i.e. int |grad theta|^2 with -Delta theta = chi_A - chi_B.
// Plane curves are embedded in a torus with half edge embed_factor * R.
namespace msrelax::potential {

struct HOptions {
  int grid = 1024;
  double embed_factor = 8.0;
  int samples_per_cell = 16;  // angular samples per grid cell along the band
  int radial_points = 8;      // Gauss-Legendre points across the band
};

struct HResult {
  double H = 0.0;
  double L = 0.0;            // half edge of the periodic box used
  double band_cells = 0.0;   // max |rho_A - rho_B| in grid cells
  bool grid_too_coarse = false;  // band thinner than 4 cells
  double mass = 0.0;         // net deposited mass before the mean was removed
};

// Spectral route: the signed band between the two radial functions (about a
// common centre) is deposited on a G x G grid, and
//   H = (1/(4 L^2)) sum_{k != 0} |f_hat(k)|^2 / |k|^2,  k = (pi/L)(m, n).
HResult squared_distance(const geometry::RadialCurve& a, const geometry::RadialCurve& b,
                         const HOptions& options = {});

// Against the disk B_R(center), R the curve's length scale.
HResult squared_distance(const geometry::RadialCurve& curve, const geometry::Vec2& center,
                         const HOptions& options = {});

struct DirectOptions {
  int grid = 64;             // cells per side of the box enclosing both sets
  int subsamples = 64;       // point-membership samples per cell side
  int subcells = 8;          // near-field resolution per cell side (divides subsamples)
  double embed_factor = 8.0;
};

// Real-space route: cell masses from point-membership sampling on a grid that
// just covers both sets, then H = -(1/2pi) sum_ij m_i m_j <Lambda>_{ij} with
// cell-pair averages of the periodic Green's function.
double squared_distance_direct(const geometry::RadialCurve& a, const geometry::RadialCurve& b,
                               const DirectOptions& options = {});

// Disk of radius R about `center` as a radial curve about the same pole as `like`.
geometry::RadialCurve disk_like(const geometry::RadialCurve& like, const geometry::Vec2& center);

// Mean of log|x - y| over x in the unit square and y in the unit square shifted
// by (p, q).
double cell_pair_mean_log(int p, int q);

}  // namespace msrelax::potential
