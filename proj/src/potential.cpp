#include "msrelax/potential.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <map>
#include <numbers>

#include "msrelax/error.hpp"
#include "msrelax/sobolev.hpp"

namespace msrelax::potential {
namespace {

constexpr double kPi = std::numbers::pi;

// Weights of the product rule int_0^{2pi} log(4 sin^2((t - s)/2)) f(s) ds
// ~ sum_j R(t - t_j) f(t_j) on M = 2n nodes, indexed by the node offset.
const std::vector<double>& log_weights(int m) {
  thread_local std::map<int, std::vector<double>> cache;
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  const int n = m / 2;
  std::vector<double> cosines(static_cast<std::size_t>(m));
  for (int q = 0; q < m; ++q) cosines[q] = std::cos(2.0 * kPi * q / m);
  std::vector<double> w(static_cast<std::size_t>(m));
  for (int d = 0; d < m; ++d) {
    double s = 0.0;
    for (int k = 1; k < n; ++k) s += cosines[(static_cast<long>(k) * d) % m] / k;
    w[d] = -(2.0 * kPi / n) * s - (kPi / (static_cast<double>(n) * n)) * ((d % 2 == 0) ? 1.0 : -1.0);
  }
  return cache.emplace(m, std::move(w)).first->second;
}

double torus_smooth(const elliptic::LatticeKernel& lattice, const geometry::Vec2& d) {
  const elliptic::cplx z(d.x(), d.y());
  const double r = std::abs(z);
  if (r == 0.0) return 0.0;
  if (r < 1.5 * lattice.L()) return elliptic::lambda_smooth(lattice, z);
  return elliptic::lambda(lattice, z) - std::log(r);
}

}  // namespace

Kernel kernel_for(const geometry::Domain& domain) {
  if (domain.is_torus()) return Kernel::torus(domain.L);
  return Kernel::plane();
}

Eigen::MatrixXd assemble(const geometry::GeometryCache& cache, const Kernel& kernel) {
  const int m = cache.M;
  const auto& rw = log_weights(m);
  const double h = 2.0 * kPi / m;
  const double inv2pi = 1.0 / (2.0 * kPi);
  std::vector<double> sin2(static_cast<std::size_t>(m));
  for (int d = 0; d < m; ++d) {
    const double sn = std::sin(kPi * d / m);
    sin2[d] = 4.0 * sn * sn;
  }
  Eigen::MatrixXd A(m, m);
  for (int j = 0; j < m; ++j) {
    const double wj = inv2pi * cache.ell[j];
    const geometry::Vec2 pj = cache.position[j];
    for (int i = 0; i < m; ++i) {
      const int d = i >= j ? i - j : i - j + m;
      const double smooth = i == j ? std::log(cache.ell[i])
                                   : 0.5 * std::log((cache.position[i] - pj).squaredNorm() / sin2[d]);
      A(i, j) = wj * (0.5 * rw[d] + h * smooth);
    }
  }
  if (kernel.is_torus()) {
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const double v = inv2pi * h * torus_smooth(*kernel.lattice, cache.position[i] - cache.position[j]);
        A(i, j) += v * cache.ell[j];
        A(j, i) += v * cache.ell[i];
      }
    }
  }
  return A;
}

BieSolve solve_with_matrix(const geometry::GeometryCache& cache, const Eigen::MatrixXd& single_layer,
                           std::span<const double> data) {
  const int m = cache.M;
  if (static_cast<int>(data.size()) != m) throw Error(ErrorKind::InvalidArgument, "boundary data size mismatch");
  const double h = 2.0 * kPi / m;
  Eigen::MatrixXd B(m + 1, m + 1);
  B.topLeftCorner(m, m) = single_layer;
  B.col(m).head(m).setOnes();
  for (int j = 0; j < m; ++j) B(m, j) = h * cache.ell[j];
  B(m, m) = 0.0;
  Eigen::VectorXd rhs(m + 1);
  for (int i = 0; i < m; ++i) rhs(i) = data[i];
  rhs(m) = 0.0;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) throw Error(ErrorKind::SolverSingular, "bordered single-layer system is singular, rcond " + std::to_string(rcond));
  const Eigen::VectorXd x = lu.solve(rhs);

  BieSolve out;
  out.rcond = rcond;
  out.density.values.assign(x.data(), x.data() + m);
  out.additive_constant = x(m);
  const double rnorm = rhs.norm();
  out.residual_norm = (B * x - rhs).norm() / (rnorm > 0.0 ? rnorm : 1.0);
  double mean = 0.0;
  for (int j = 0; j < m; ++j) mean += h * cache.ell[j] * x(j);
  out.density.mean_constraint_residual = std::abs(mean);
  return out;
}

BieSolve solve_with_data(const geometry::GeometryCache& cache, const Kernel& kernel, std::span<const double> data) {
  return solve_with_matrix(cache, assemble(cache, kernel), data);
}

BieSolve solve_ms(const geometry::GeometryCache& cache, const Kernel& kernel) {
  return solve_with_data(cache, kernel, cache.kappa);
}

double dissipation(const geometry::GeometryCache& cache, const BieSolve& solve) {
  const double h = 2.0 * kPi / cache.M;
  double d = 0.0;
  double kk = 0.0;
  double vv = 0.0;
  for (int j = 0; j < cache.M; ++j) {
    const double w = h * cache.ell[j];
    const double v = solve.density.values[j];
    d -= w * cache.kappa[j] * v;
    kk += w * cache.kappa[j] * cache.kappa[j];
    vv += w * v * v;
  }
  if (d < -1e-10 * std::sqrt(kk * vv)) throw Error(ErrorKind::NegativeDissipation, "D = " + std::to_string(d));
  return d;
}

VelocityNorms normal_velocity_sobolev(const geometry::GeometryCache& cache, std::span<const double> V) {
  const double h = 2.0 * kPi / cache.M;
  const auto Vphi = spectral::differentiate_nodes(V, 1);
  VelocityNorms n;
  double l2 = 0.0;
  double vs = 0.0;
  for (int j = 0; j < cache.M; ++j) {
    l2 += h * cache.ell[j] * V[j] * V[j];
    vs += h * Vphi[j] * Vphi[j] / cache.ell[j];
  }
  n.l2 = std::sqrt(l2);
  n.vs_l2 = std::sqrt(vs);
  n.h_minus_half = sobolev::curve_norm(cache, V, -0.5);
  return n;
}

VelocityNorms normal_velocity_sobolev(const geometry::GeometryCache& cache, const BieSolve& solve) {
  return normal_velocity_sobolev(cache, solve.density.values);
}

namespace {

struct Quadrature {
  std::vector<double> x;
  std::vector<double> w;
};

Quadrature gauss_legendre(int n, double a, double b) {
  gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n));
  Quadrature q;
  q.x.resize(n);
  q.w.resize(n);
  for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(a, b, static_cast<std::size_t>(i), &q.x[i], &q.w[i], t);
  gsl_integration_glfixed_table_free(t);
  return q;
}

// Extension energies of sum_k r^{+-k} (a_k cos k theta + b_k sin k theta) over
// the modes in [k_lo, k_hi]. The exterior integral is taken in s = 1/r, so the
// quadrature variable `r` below plays the role of s there.
void extension_energies(const spectral::RealSeries& g, int k_lo, int k_hi, const Quadrature& radial, int n_theta,
                        double& interior, double& exterior) {
  interior = 0.0;
  exterior = 0.0;
  const double dtheta = 2.0 * kPi / n_theta;
  for (std::size_t q = 0; q < radial.x.size(); ++q) {
    const double r = radial.x[q];
    for (int i = 0; i < n_theta; ++i) {
      const double th = dtheta * i;
      double in_r = 0.0;
      double in_t = 0.0;
      double ex_r = 0.0;
      double ex_t = 0.0;
      for (int k = k_lo; k <= k_hi; ++k) {
        const double c = std::cos(k * th);
        const double s = std::sin(k * th);
        const double f = g.a[k] * c + g.b[k] * s;
        const double df = -g.a[k] * s + g.b[k] * c;
        const double rk1 = std::pow(r, k - 1);
        // interior: grad r^k f = k r^{k-1} (f, df), weight r dr
        in_r += k * rk1 * f;
        in_t += k * rk1 * df;
        // exterior with r = 1/s: |grad|^2 r dr = (sum k s^k (-f, df))^2 ds / s
        ex_r -= k * rk1 * r * f;
        ex_t += k * rk1 * r * df;
      }
      interior += radial.w[q] * dtheta * r * (in_r * in_r + in_t * in_t);
      exterior += radial.w[q] * dtheta * (ex_r * ex_r + ex_t * ex_t) / r;
    }
  }
}

}  // namespace

TraceTable trace_equality_disk(const spectral::RealSeries& g_hat, int k_max) {
  if (k_max < 1 || k_max >= g_hat.size()) throw Error(ErrorKind::InvalidArgument, "k_max must lie in [1, N-1]");
  const Quadrature radial = gauss_legendre(k_max + 2, 0.0, 1.0);
  const int n_theta = 4 * (k_max + 1);
  TraceTable table;
  auto h_half = [&](int k_lo, int k_hi) {
    spectral::RealSeries part(g_hat.size());
    for (int k = k_lo; k <= k_hi; ++k) {
      part.a[k] = g_hat.a[k];
      part.b[k] = g_hat.b[k];
    }
    const auto samples = spectral::synthesize(part, 2 * g_hat.size());
    const double n = sobolev::h_norm(sobolev::from_samples(samples, kPi), 0.5);
    return n * n;
  };
  for (int k = 1; k <= k_max; ++k) {
    TraceRow row;
    row.k = k;
    extension_energies(g_hat, k, k, radial, n_theta, row.interior, row.exterior);
    row.h_half = h_half(k, k);
    table.modes.push_back(row);
  }
  table.total.k = 0;
  extension_energies(g_hat, 1, k_max, radial, n_theta, table.total.interior, table.total.exterior);
  table.total.h_half = h_half(1, k_max);
  return table;
}

}  // namespace msrelax::potential
