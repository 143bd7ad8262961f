#include "msrelax/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "msrelax/error.hpp"

namespace msrelax::spectral {
namespace {

// The FFTW planner is not reentrant; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Plan1d {
  int m = 0;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  explicit Plan1d(int size) : m(size) {
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(static_cast<std::size_t>(m));
    spec = fftw_alloc_complex(static_cast<std::size_t>(m / 2 + 1));
    r2c = fftw_plan_dft_r2c_1d(m, real, spec, FFTW_ESTIMATE);
    c2r = fftw_plan_dft_c2r_1d(m, spec, real, FFTW_ESTIMATE);
  }
  Plan1d(const Plan1d&) = delete;
  Plan1d& operator=(const Plan1d&) = delete;
  ~Plan1d() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
    fftw_free(real);
    fftw_free(spec);
  }
};

Plan1d& plan_for(int m) {
  thread_local std::map<int, std::unique_ptr<Plan1d>> cache;
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, std::make_unique<Plan1d>(m)).first;
  return *it->second;
}

void require_even(int m) {
  if (m < 2 || m % 2 != 0) throw Error(ErrorKind::InvalidArgument, "node count must be even and >= 2");
}

}  // namespace

std::vector<double> nodes(int m) {
  std::vector<double> phi(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) phi[j] = 2.0 * std::numbers::pi * j / m;
  return phi;
}

std::vector<std::complex<double>> forward(std::span<const double> values) {
  const int m = static_cast<int>(values.size());
  require_even(m);
  Plan1d& p = plan_for(m);
  std::copy(values.begin(), values.end(), p.real);
  fftw_execute(p.r2c);
  std::vector<std::complex<double>> c(static_cast<std::size_t>(m / 2 + 1));
  for (int k = 0; k <= m / 2; ++k) c[k] = std::complex<double>(p.spec[k][0], p.spec[k][1]) / static_cast<double>(m);
  return c;
}

std::vector<double> backward(std::span<const std::complex<double>> coeffs, int m) {
  require_even(m);
  if (static_cast<int>(coeffs.size()) != m / 2 + 1)
    throw Error(ErrorKind::InvalidArgument, "backward: expected m/2+1 coefficients");
  Plan1d& p = plan_for(m);
  for (int k = 0; k <= m / 2; ++k) {
    p.spec[k][0] = coeffs[k].real();
    p.spec[k][1] = coeffs[k].imag();
  }
  // Imaginary parts of the self-conjugate bins must vanish for a real signal.
  p.spec[0][1] = 0.0;
  p.spec[m / 2][1] = 0.0;
  fftw_execute(p.c2r);
  return std::vector<double>(p.real, p.real + m);
}

std::vector<double> synthesize(const RealSeries& s, int m) {
  const int n = s.size();
  if (m < 2 * n) throw Error(ErrorKind::InvalidArgument, "synthesize: need m >= 2N nodes");
  std::vector<std::complex<double>> c(static_cast<std::size_t>(m / 2 + 1), 0.0);
  if (n > 0) c[0] = s.a[0];
  for (int k = 1; k < n; ++k) c[k] = std::complex<double>(0.5 * s.a[k], -0.5 * s.b[k]);
  return backward(c, m);
}

RealSeries analyze(std::span<const double> values, int n) {
  const int m = static_cast<int>(values.size());
  if (n > m / 2) throw Error(ErrorKind::InvalidArgument, "analyze: need n <= m/2");
  const auto c = forward(values);
  RealSeries s(n);
  if (n > 0) s.a[0] = c[0].real();
  for (int k = 1; k < n; ++k) {
    s.a[k] = 2.0 * c[k].real();
    s.b[k] = -2.0 * c[k].imag();
  }
  return s;
}

RealSeries derivative(const RealSeries& s, int order) {
  RealSeries d(s.size());
  for (int k = 1; k < s.size(); ++k) {
    double a = s.a[k];
    double b = s.b[k];
    for (int o = 0; o < order; ++o) {
      // d/dphi (a cos + b sin) = k b cos - k a sin
      const double na = k * b;
      const double nb = -k * a;
      a = na;
      b = nb;
    }
    d.a[k] = a;
    d.b[k] = b;
  }
  return d;
}

void evaluate_with_derivative(const RealSeries& s, double phi, double& value, double& deriv) {
  const std::complex<double> step(std::cos(phi), std::sin(phi));
  std::complex<double> rot(1.0, 0.0);
  value = s.size() > 0 ? s.a[0] : 0.0;
  deriv = 0.0;
  for (int k = 1; k < s.size(); ++k) {
    rot *= step;
    // Resynchronize periodically so the rotation error stays at roundoff.
    if (k % 64 == 0) rot = std::complex<double>(std::cos(k * phi), std::sin(k * phi));
    value += s.a[k] * rot.real() + s.b[k] * rot.imag();
    deriv += k * (s.b[k] * rot.real() - s.a[k] * rot.imag());
  }
}

double evaluate(const RealSeries& s, double phi) {
  double v = 0.0;
  double d = 0.0;
  evaluate_with_derivative(s, phi, v, d);
  return v;
}

std::vector<double> differentiate_nodes(std::span<const double> values, int order) {
  const int m = static_cast<int>(values.size());
  auto c = forward(values);
  const std::complex<double> I(0.0, 1.0);
  for (int k = 0; k <= m / 2; ++k) {
    std::complex<double> f = 1.0;
    for (int o = 0; o < order; ++o) f *= I * static_cast<double>(k);
    c[k] *= f;
  }
  c[m / 2] = 0.0;
  return backward(c, m);
}

std::vector<double> interpolate(std::span<const double> values, std::span<const double> at) {
  const int m = static_cast<int>(values.size());
  const auto c = forward(values);
  std::vector<double> out(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) {
    const double phi = at[i];
    const std::complex<double> step(std::cos(phi), std::sin(phi));
    std::complex<double> rot(1.0, 0.0);
    double v = c[0].real();
    for (int k = 1; k < m / 2; ++k) {
      rot *= step;
      if (k % 64 == 0) rot = std::complex<double>(std::cos(k * phi), std::sin(k * phi));
      v += 2.0 * (c[k] * rot).real();
    }
    v += c[m / 2].real() * std::cos(0.5 * m * phi);
    out[i] = v;
  }
  return out;
}

}  // namespace msrelax::spectral
