#pragma once

#include <complex>
#include <span>
#include <vector>

// Real trigonometric series on [0, 2*pi) sampled at M uniform nodes.
//
// A band-limited function is stored as cosine/sine coefficient vectors of
// length N,
//   f(phi) = a[0] + sum_{k=1}^{N-1} a[k] cos(k phi) + b[k] sin(k phi),
// and sampled on M >= 2N nodes phi_j = 2*pi*j/M. Transforms go through FFTW
// with FFTW_ESTIMATE plans so results are reproducible run to run.
namespace msrelax::spectral {

struct RealSeries {
  std::vector<double> a;
  std::vector<double> b;

  RealSeries() = default;
  explicit RealSeries(int n) : a(static_cast<std::size_t>(n), 0.0), b(static_cast<std::size_t>(n), 0.0) {}
  int size() const { return static_cast<int>(a.size()); }
};

std::vector<double> nodes(int m);

// Samples of the series at m uniform nodes; m must be at least 2*size().
std::vector<double> synthesize(const RealSeries& s, int m);

// Coefficients of the trigonometric interpolant of node values, truncated to
// n modes (n <= m/2). The Nyquist mode is discarded.
RealSeries analyze(std::span<const double> values, int n);

// d/dphi applied `order` times in coefficient space.
RealSeries derivative(const RealSeries& s, int order = 1);

double evaluate(const RealSeries& s, double phi);

// Value and first derivative at an arbitrary angle.
void evaluate_with_derivative(const RealSeries& s, double phi, double& value, double& deriv);

// Complex DFT coefficients c_k, k = 0..m/2, of real samples:
// c_k = (1/m) sum_j f_j exp(-i k phi_j).
std::vector<std::complex<double>> forward(std::span<const double> values);

// Inverse of `forward` for an m-point real signal.
std::vector<double> backward(std::span<const std::complex<double>> coeffs, int m);

// Periodic spectral derivative of node values (Nyquist mode zeroed).
std::vector<double> differentiate_nodes(std::span<const double> values, int order = 1);

// Evaluates the trigonometric interpolant of node values at arbitrary angles.
std::vector<double> interpolate(std::span<const double> values, std::span<const double> at);

}  // namespace msrelax::spectral
