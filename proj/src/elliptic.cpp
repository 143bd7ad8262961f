#include "msrelax/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "msrelax/error.hpp"

namespace msrelax::elliptic {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxSeriesOrder = 1024;

struct KahanSum {
  cplx sum{0.0, 0.0};
  cplx comp{0.0, 0.0};

  void add(cplx x) {
    const cplx y = x - comp;
    const cplx t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

// log(1 - u) + u + u^2/2 without cancellation for small |u|.
cplx cubic_remainder(cplx u) {
  const double a = std::abs(u);
  if (a > 0.25) return std::log(1.0 - u) + u + 0.5 * u * u;
  cplx power = u * u * u;
  cplx s = 0.0;
  for (int n = 3; n < 200; ++n) {
    const cplx term = power / static_cast<double>(n);
    s -= term;
    if (std::abs(term) < 1e-18 * std::abs(s)) break;
    power *= u;
  }
  return s;
}

}  // namespace

LatticeKernel::LatticeKernel(double L, int trunc) : L_(L), trunc_(trunc) {
  if (!(L > 0.0)) throw Error(ErrorKind::InvalidArgument, "half edge must be positive");
  if (trunc < 2) throw Error(ErrorKind::InvalidArgument, "lattice truncation must be >= 2");
  eta1_ = cplx(kPi / (4.0 * L), 0.0);
  eta3_ = cplx(0.0, -kPi / (4.0 * L));

  // Laurent coefficients of the Weierstrass p-function for Z[i] (g3 = 0):
  // p = z^-2 + sum_{k>=2} c_k z^{2k-2}, c_k = (2k-1) G_{2k}.
  const long double pi = std::numbers::pi_v<long double>;
  const long double gamma_quarter = std::tgamma(0.25L);
  long double g4 = std::pow(gamma_quarter, 8) / (960.0L * pi * pi);
  const int kmax = kMaxSeriesOrder / 2;
  std::vector<long double> c(static_cast<std::size_t>(kmax + 1), 0.0L);
  c[2] = 3.0L * g4;
  for (int k = 4; k <= kmax; ++k) {
    long double s = 0.0L;
    for (int m = 2; m <= k - 2; ++m) s += c[m] * c[k - m];
    c[k] = 3.0L * s / ((2.0L * k + 1.0L) * (k - 3.0L));
  }
  unit_eisenstein_.assign(static_cast<std::size_t>(kMaxSeriesOrder + 1), 0.0L);
  for (int k = 2; k <= kmax; ++k) unit_eisenstein_[2 * k] = c[k] / (2.0L * k - 1.0L);

  for (int j = 1; j <= 3; ++j) {
    const int n = 4 * j;
    std::complex<long double> partial = 0.0L;
    for (int r = trunc_; r >= 1; --r) {
      std::complex<long double> shell = 0.0L;
      for (int m = -r; m <= r; ++m) {
        for (int q = -r; q <= r; ++q) {
          if (std::max(std::abs(m), std::abs(q)) != r) continue;
          const std::complex<long double> w(static_cast<long double>(m), static_cast<long double>(q));
          shell += std::pow(w, -n);
        }
      }
      partial += shell;
    }
    const std::complex<long double> tail = unit_eisenstein_[n] - partial;
    unit_tail_[j - 1] = cplx(static_cast<double>(tail.real()), static_cast<double>(tail.imag()));
  }
}

double LatticeKernel::background() const { return kPi / (8.0 * L_ * L_); }

long double LatticeKernel::eisenstein_unit(int n) const {
  if (n < 0 || n > kMaxSeriesOrder) throw Error(ErrorKind::InvalidArgument, "Eisenstein order out of range");
  return unit_eisenstein_[n];
}

cplx wrap_to_cell(double L, cplx z) {
  const double p = 2.0 * L;
  const double x = z.real() - p * std::floor((z.real() + L) / p);
  const double y = z.imag() - p * std::floor((z.imag() + L) / p);
  return {x, y};
}

cplx log_sigma(const LatticeKernel& kernel, cplx z) {
  const double L = kernel.L();
  const double p = 2.0 * L;
  const cplx nearest(p * std::round(z.real() / p), p * std::round(z.imag() / p));
  if (std::abs(z - nearest) <= 1e-8 * L) throw Error(ErrorKind::NearPole, "argument is within 1e-8 L of a lattice point");

  const int T = kernel.trunc();
  KahanSum acc;
  // Outer shells first so small terms accumulate before the large ones.
  for (int r = T; r >= 1; --r) {
    for (int m = -r; m <= r; ++m) {
      for (int q = -r; q <= r; ++q) {
        if (std::max(std::abs(m), std::abs(q)) != r) continue;
        const cplx w(p * m, p * q);
        acc.add(cubic_remainder(z / w));
      }
    }
  }
  const cplx zeta = z / p;
  const cplx zeta4 = zeta * zeta * zeta * zeta;
  cplx power = zeta4;
  cplx tail = 0.0;
  for (int j = 1; j <= 3; ++j) {
    tail -= power * kernel.unit_tail()[j - 1] / static_cast<double>(4 * j);
    power *= zeta4;
  }
  return std::log(z) + acc.sum + tail;
}

double lambda(const LatticeKernel& kernel, cplx z) {
  return log_sigma(kernel, z).real() - kernel.background() * std::norm(z);
}

double lambda_periodic(const LatticeKernel& kernel, cplx z) { return lambda(kernel, wrap_to_cell(kernel.L(), z)); }

double lambda_smooth(const LatticeKernel& kernel, cplx z, int max_order) {
  const double L = kernel.L();
  if (!(std::abs(z) < 1.8 * L)) throw Error(ErrorKind::OutOfRadius, "series form needs |z| < 1.8 L");
  const cplx zeta = z / (2.0 * L);
  const cplx zeta4 = zeta * zeta * zeta * zeta;
  const double r4 = std::abs(zeta4);
  const int limit = max_order > 0 ? std::min(max_order, kernel.max_series_order()) : kernel.max_series_order();
  cplx power = zeta4;
  double bound = r4;
  double s = 0.0;
  int n = 4;
  for (; n <= limit; n += 4) {
    // G_n is real on the square lattice.
    s -= static_cast<double>(kernel.eisenstein_unit(n)) * power.real() / n;
    if (max_order <= 0 && 5.0 * bound / n < 1e-18) break;
    power *= zeta4;
    bound *= r4;
  }
  if (max_order <= 0 && n > limit) throw Error(ErrorKind::OutOfRadius, "series did not converge");
  return s - kernel.background() * std::norm(z);
}

double lambda_series_small(const LatticeKernel& kernel, cplx z, int max_order) {
  if (z == cplx(0.0, 0.0)) throw Error(ErrorKind::NearPole, "Lambda is singular at the origin");
  return std::log(std::abs(z)) + lambda_smooth(kernel, z, max_order);
}

double legendre_residual(const LatticeKernel& kernel) {
  const cplx r = kernel.eta1() * kernel.omega3() - kernel.eta3() * kernel.omega1() - cplx(0.0, kPi / 2.0);
  return std::abs(r);
}

ChargeCheck charge_check(const LatticeKernel& kernel, double r, int m, double h, int probes, unsigned seed) {
  const double L = kernel.L();
  const double step = h * L;
  const double rho = kPi / (2.0 * L * L);
  auto f = [&](double x, double y) { return lambda_periodic(kernel, {x, y}); };
  // Lambda - log|z| from the product form; log|z| is harmonic with flux 2 pi.
  auto g = [&](double x, double y) { return lambda(kernel, {x, y}) - std::log(std::hypot(x, y)); };
  auto grad = [&](const auto& fn, double x, double y) {
    const double a = step, b = 2.0 * step;
    return std::array<double, 2>{
        (8.0 * (fn(x + a, y) - fn(x - a, y)) - (fn(x + b, y) - fn(x - b, y))) / (12.0 * step),
        (8.0 * (fn(x, y + a) - fn(x, y - a)) - (fn(x, y + b) - fn(x, y - b))) / (12.0 * step)};
  };

  ChargeCheck c;
  const double dl = 2.0 * L / m;
  for (int j = 0; j < m; ++j) {
    const double s = -L + j * dl;
    c.boundary_flux += dl * (grad(f, L, s)[0] - grad(f, -L, s)[0] + grad(f, s, L)[1] - grad(f, s, -L)[1]);
  }
  const double rr = r * L;
  c.circle_flux = 2.0 * kPi;
  for (int j = 0; j < m; ++j) {
    const double t = 2.0 * kPi * j / m;
    const auto d = grad(g, rr * std::cos(t), rr * std::sin(t));
    c.circle_flux += (2.0 * kPi * rr / m) * (d[0] * std::cos(t) + d[1] * std::sin(t));
  }
  c.circle_expected = 2.0 * kPi - rho * kPi * rr * rr;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-L + 2.0 * step, L - 2.0 * step);
  double mean = 0.0;
  for (int n = 0; n < probes; ++n) {
    double x = u(rng), y = u(rng);
    while (std::hypot(x, y) < 2.0 * step) x = u(rng), y = u(rng);
    const double lap = (g(x + step, y) + g(x - step, y) + g(x, y + step) + g(x, y - step) - 4.0 * g(x, y)) / (step * step);
    c.max_laplacian_error = std::max(c.max_laplacian_error, std::abs(lap + rho));
    mean += lap;
  }
  mean /= std::max(probes, 1);
  const double cell_integral = mean * 4.0 * L * L;
  c.residual = (std::abs(c.boundary_flux) + std::abs(c.circle_flux - c.circle_expected) +
                std::abs(cell_integral + 2.0 * kPi)) /
               (2.0 * kPi);
  return c;
}

}  // namespace msrelax::elliptic
