#pragma once

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <vector>

#include "msrelax/elliptic.hpp"
#include "msrelax/geometry.hpp"
#include "msrelax/spectral.hpp"

// Single-layer boundary integral solver. With G the fundamental solution
// ((1/2pi) log|z| on the plane, Lambda(z)/(2pi) on the torus), the bordered
// Nystrom system
//   int_Gamma G(x_i - y) phi(y) ds_y + c = g(x_i),   int_Gamma phi ds = 0
// yields the harmonic extension u = S[phi] + c of g on both sides of Gamma, and
// phi = du_out/dn - du_in/dn. For g = curvature, phi is the normal velocity V.
namespace msrelax::potential {

struct Kernel {
  std::shared_ptr<const elliptic::LatticeKernel> lattice;  // null on the plane

  static Kernel plane() { return {}; }
  static Kernel torus(double L, int trunc = 16) {
    return {std::make_shared<const elliptic::LatticeKernel>(L, trunc)};
  }
  bool is_torus() const { return lattice != nullptr; }
};

Kernel kernel_for(const geometry::Domain& domain);

// Collocation matrix of the single-layer operator at the M curve nodes, with
// the logarithmic singularity integrated by trigonometric product quadrature.
Eigen::MatrixXd assemble(const geometry::GeometryCache& cache, const Kernel& kernel);

struct LayerDensity {
  std::vector<double> values;
  double mean_constraint_residual = 0.0;  // |int phi ds|
};

struct BieSolve {
  LayerDensity density;
  double additive_constant = 0.0;
  double residual_norm = 0.0;  // relative residual of the bordered system
  double rcond = 0.0;          // reciprocal condition estimate of the bordered matrix
};

BieSolve solve_with_matrix(const geometry::GeometryCache& cache, const Eigen::MatrixXd& single_layer,
                           std::span<const double> data);
BieSolve solve_with_data(const geometry::GeometryCache& cache, const Kernel& kernel, std::span<const double> data);

// Mullins-Sekerka normal velocity: data = curvature. Positive V moves the
// interface outward.
BieSolve solve_ms(const geometry::GeometryCache& cache, const Kernel& kernel);

// D = -int kappa V ds. Throws NegativeDissipation below -1e-10 times the scale
// sqrt(int kappa^2 ds * int V^2 ds).
double dissipation(const geometry::GeometryCache& cache, const BieSolve& solve);

struct VelocityNorms {
  double l2 = 0.0;            // ||V||_{L^2(Gamma)}
  double vs_l2 = 0.0;         // ||dV/ds||_{L^2(Gamma)}
  double h_minus_half = 0.0;  // ||V||_{H^{-1/2}(Gamma)}
};

VelocityNorms normal_velocity_sobolev(const geometry::GeometryCache& cache, std::span<const double> V);
VelocityNorms normal_velocity_sobolev(const geometry::GeometryCache& cache, const BieSolve& solve);

struct TraceRow {
  int k = 0;
  double interior = 0.0;  // Dirichlet energy of the harmonic extension into the unit disk
  double exterior = 0.0;  // same for the exterior, decaying at infinity
  double h_half = 0.0;    // ||g||^2_{H^{1/2}(S^1)}
};

struct TraceTable {
  std::vector<TraceRow> modes;  // one row per k = 1..k_max
  TraceRow total;               // the full datum
};

// Compares the extension energies, computed by Gauss-Legendre quadrature of the
// explicit r^k and r^{-k} extensions, with the H^{1/2} norm of the datum.
TraceTable trace_equality_disk(const spectral::RealSeries& g_hat, int k_max);

}  // namespace msrelax::potential
