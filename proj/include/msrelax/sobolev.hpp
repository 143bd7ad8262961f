#pragma once

#include <complex>
#include <span>
#include <vector>

#include "msrelax/geometry.hpp"

// Homogeneous fractional Sobolev norms of real 2P-periodic signals.
//
// Coefficients use the unitary normalization
//   f_hat(k) = (2P)^{-1/2} int_0^{2P} f(x) exp(-i pi k x / P) dx,
// so that ||f||^2_{L^2} = sum_k |f_hat(k)|^2 and
//   ||f||^2_{H^sigma} = sum_{k != 0} |pi k / P|^{2 sigma} |f_hat(k)|^2.
namespace msrelax::sobolev {

struct PeriodicSignal {
  double P = 0.0;
  std::vector<std::complex<double>> coeffs;  // index k + K for k in [-K, K]

  int K() const { return (static_cast<int>(coeffs.size()) - 1) / 2; }
  std::complex<double>& at(int k) { return coeffs[static_cast<std::size_t>(k + K())]; }
  const std::complex<double>& at(int k) const { return coeffs[static_cast<std::size_t>(k + K())]; }
};

// Samples taken at x_j = 2P j / M, M even. The Nyquist bin is discarded.
PeriodicSignal from_samples(std::span<const double> f, double P);

// Real samples of the signal at M uniform points (M > 2K).
std::vector<double> to_samples(const PeriodicSignal& s, int m);

double l2_norm(const PeriodicSignal& s);

// Throws NonZeroMean when sigma < 0 and |f_hat(0)| exceeds mean_tol * ||f||_{L^2}.
double h_norm(const PeriodicSignal& s, double sigma, double mean_tol = 1e-12);

// |d|^sigma: multiplies f_hat(k) by |pi k / P|^sigma and removes the mean.
PeriodicSignal fractional_derivative(const PeriodicSignal& s, double sigma);

struct InterpolationCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs, 0 when both vanish
};

// ||f||_sigma <= ||f||_alpha^{1/p} ||f||_beta^{1/q} with
// p = (beta - alpha)/(beta - sigma), q = (beta - alpha)/(sigma - alpha).
InterpolationCheck interpolation_check(const PeriodicSignal& s, double alpha, double sigma, double beta);

struct PoincareCheck {
  double lhs = 0.0;  // ||f - mean||^2_{L^2}
  double rhs = 0.0;  // (P/pi)^{2 sigma} ||f||^2_{H^sigma}
  bool holds = false;
};

PoincareCheck poincare_check(const PeriodicSignal& s, double sigma);

// Node values resampled to M uniform arc-length points of the curve.
// `length` receives L(Gamma).
std::vector<double> arclength_resample(const geometry::GeometryCache& cache, std::span<const double> f_nodes,
                                       double& length);

// ||f||_{H^sigma(Gamma)} for node values on the curve; |sigma| < 1 or sigma = +-1.
double curve_norm(const geometry::GeometryCache& cache, std::span<const double> f_nodes, double sigma);

}  // namespace msrelax::sobolev
