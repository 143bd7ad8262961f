#include "msrelax/sobolev.hpp"

#include <cmath>
#include <numbers>

#include "msrelax/error.hpp"
#include "msrelax/spectral.hpp"

namespace msrelax::sobolev {
namespace {

constexpr double kPi = std::numbers::pi;

double weight(const PeriodicSignal& s, int k, double sigma) {
  return std::pow(std::abs(kPi * k / s.P), sigma);
}

}  // namespace

PeriodicSignal from_samples(std::span<const double> f, double P) {
  const int m = static_cast<int>(f.size());
  if (!(P > 0.0)) throw Error(ErrorKind::InvalidArgument, "half-period must be positive");
  const auto c = spectral::forward(f);
  const int K = m / 2 - 1;
  PeriodicSignal s;
  s.P = P;
  s.coeffs.assign(static_cast<std::size_t>(2 * K + 1), 0.0);
  const double scale = std::sqrt(2.0 * P);
  for (int k = 0; k <= K; ++k) {
    s.at(k) = scale * c[k];
    s.at(-k) = std::conj(s.at(k));
  }
  return s;
}

std::vector<double> to_samples(const PeriodicSignal& s, int m) {
  const int K = s.K();
  if (m <= 2 * K) throw Error(ErrorKind::InvalidArgument, "to_samples: need m > 2K");
  std::vector<std::complex<double>> c(static_cast<std::size_t>(m / 2 + 1), 0.0);
  const double scale = 1.0 / std::sqrt(2.0 * s.P);
  for (int k = 0; k <= K; ++k) c[k] = scale * s.at(k);
  return spectral::backward(c, m);
}

double l2_norm(const PeriodicSignal& s) {
  double sum = 0.0;
  for (const auto& c : s.coeffs) sum += std::norm(c);
  return std::sqrt(sum);
}

double h_norm(const PeriodicSignal& s, double sigma, double mean_tol) {
  if (sigma < 0.0 && s.K() >= 0 && std::abs(s.at(0)) > mean_tol * l2_norm(s))
    throw Error(ErrorKind::NonZeroMean, "negative-order norm of a signal with nonzero mean");
  double sum = 0.0;
  for (int k = 1; k <= s.K(); ++k) sum += 2.0 * weight(s, k, 2.0 * sigma) * std::norm(s.at(k));
  return std::sqrt(sum);
}

PeriodicSignal fractional_derivative(const PeriodicSignal& s, double sigma) {
  PeriodicSignal d = s;
  d.at(0) = 0.0;
  for (int k = 1; k <= s.K(); ++k) {
    const double w = weight(s, k, sigma);
    d.at(k) *= w;
    d.at(-k) *= w;
  }
  return d;
}

InterpolationCheck interpolation_check(const PeriodicSignal& s, double alpha, double sigma, double beta) {
  if (!(alpha < sigma && sigma < beta)) throw Error(ErrorKind::OrderingViolation, "need alpha < sigma < beta");
  InterpolationCheck r;
  r.lhs = h_norm(s, sigma);
  const double inv_p = (beta - sigma) / (beta - alpha);
  const double inv_q = (sigma - alpha) / (beta - alpha);
  r.rhs = std::pow(h_norm(s, alpha), inv_p) * std::pow(h_norm(s, beta), inv_q);
  r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
  return r;
}

PoincareCheck poincare_check(const PeriodicSignal& s, double sigma) {
  PoincareCheck r;
  for (int k = 1; k <= s.K(); ++k) r.lhs += 2.0 * std::norm(s.at(k));
  const double n = h_norm(s, sigma);
  r.rhs = std::pow(s.P / kPi, 2.0 * sigma) * n * n;
  r.holds = r.lhs <= r.rhs * (1.0 + 1e-12);
  return r;
}

std::vector<double> arclength_resample(const geometry::GeometryCache& cache, std::span<const double> f_nodes,
                                       double& length) {
  const int m = cache.M;
  if (static_cast<int>(f_nodes.size()) != m) throw Error(ErrorKind::InvalidArgument, "node count mismatch");
  const spectral::RealSeries ell = spectral::analyze(cache.ell, m / 2);
  // s(phi) = ell_0 phi + S(phi), S the antiderivative of the oscillatory part with S(0) = 0.
  spectral::RealSeries S(ell.size());
  for (int k = 1; k < ell.size(); ++k) {
    S.a[k] = -ell.b[k] / k;
    S.b[k] = ell.a[k] / k;
    S.a[0] += ell.b[k] / k;
  }
  length = 2.0 * kPi * ell.a[0];
  std::vector<double> phi(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double target = length * j / m;
    double x = 2.0 * kPi * j / m;
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
      double sv = 0.0;
      double sd = 0.0;
      spectral::evaluate_with_derivative(S, x, sv, sd);
      const double l = ell.a[0] + sd;
      if (!(l > 0.0)) throw Error(ErrorKind::ResampleFailure, "arc-length map is not monotone");
      const double dx = (ell.a[0] * x + sv - target) / l;
      x -= dx;
      if (std::abs(dx) <= 1e-13 * (1.0 + std::abs(x))) {
        converged = true;
        break;
      }
    }
    if (!converged) throw Error(ErrorKind::ResampleFailure, "Newton inversion of s(phi) did not converge");
    phi[j] = x;
  }
  return spectral::interpolate(f_nodes, phi);
}

double curve_norm(const geometry::GeometryCache& cache, std::span<const double> f_nodes, double sigma) {
  if (!(std::abs(sigma) < 1.0 || sigma == 1.0 || sigma == -1.0))
    throw Error(ErrorKind::InvalidArgument, "curve_norm supports |sigma| < 1 or sigma = +-1");
  double length = 0.0;
  const auto g = arclength_resample(cache, f_nodes, length);
  return h_norm(from_samples(g, 0.5 * length), sigma);
}

}  // namespace msrelax::sobolev
