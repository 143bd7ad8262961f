#include "msrelax/geometry.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "msrelax/error.hpp"

namespace msrelax::geometry {
namespace {

constexpr double kPi = std::numbers::pi;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double trapezoid(const std::vector<double>& f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * 2.0 * kPi / static_cast<double>(f.size());
}

}  // namespace

void RadialCurve::validate() const {
  if (!(R > 0.0) || !std::isfinite(R)) throw Error(ErrorKind::InvalidArgument, "R must be positive");
  const int n = modes();
  if (n < 16 || !is_power_of_two(n))
    throw Error(ErrorKind::InvalidArgument, "mode count must be a power of two >= 16, got " + std::to_string(n));
  if (static_cast<int>(rho_hat.b.size()) != n) throw Error(ErrorKind::InvalidArgument, "cos/sin length mismatch");
  if (domain.is_torus() && !(domain.L > 0.0)) throw Error(ErrorKind::InvalidArgument, "torus half edge must be positive");
  const auto rho = spectral::synthesize(rho_hat, node_count());
  double rmax = 0.0;
  for (double r : rho) {
    if (!(r > 0.0)) throw Error(ErrorKind::NonPositiveRadius, "rho <= 0 at a quadrature node");
    rmax = std::max(rmax, r);
  }
  if (domain.is_torus()) {
    const double reach = rmax + std::max(std::abs(pole.x()), std::abs(pole.y()));
    if (!(reach < domain.L)) throw Error(ErrorKind::InvalidArgument, "curve does not fit in the torus cell");
  }
}

double RadialCurve::resolution_ratio() const {
  const int n = modes();
  double amax = 0.0;
  for (int k = 1; k < n; ++k) amax = std::max(amax, std::hypot(rho_hat.a[k], rho_hat.b[k]));
  amax = std::max(amax, 1e-12 * R);
  double top = 0.0;
  for (int k = std::max(1, n - 2); k < n; ++k) top = std::max(top, std::hypot(rho_hat.a[k], rho_hat.b[k]));
  return top / amax;
}

RadialCurve circle(double R, int n_modes, Vec2 pole, Domain domain) {
  RadialCurve c;
  c.R = R;
  c.rho_hat = spectral::RealSeries(n_modes);
  c.rho_hat.a[0] = R;
  c.pole = pole;
  c.domain = domain;
  c.validate();
  return c;
}

RadialCurve from_function(const std::function<double(double)>& rho, double R, int n_modes, Vec2 pole,
                          Domain domain) {
  const int m = 2 * n_modes;
  const auto phi = spectral::nodes(m);
  std::vector<double> v(phi.size());
  for (std::size_t j = 0; j < phi.size(); ++j) v[j] = rho(phi[j]);
  RadialCurve c;
  c.R = R;
  c.rho_hat = spectral::analyze(v, n_modes);
  c.pole = pole;
  c.domain = domain;
  c.validate();
  return c;
}

double shifted_disk_radius(double r, double a, double angle, double phi) {
  const double s = std::sin(phi - angle);
  return a * std::cos(phi - angle) + std::sqrt(r * r - a * a * s * s);
}

std::vector<double> radial_function_about(const RadialCurve& curve, const Vec2& center,
                                          const std::vector<double>& theta) {
  const Vec2 d = curve.pole - center;
  std::vector<double> out(theta.size());
  double phi = theta.empty() ? 0.0 : theta[0];
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const Vec2 e(std::cos(theta[i]), std::sin(theta[i]));
    const double dxe = d.x() * e.y() - d.y() * e.x();
    // g(phi) = d x e_theta - rho(phi) sin(phi - theta) vanishes on the ray.
    phi = i == 0 ? theta[0] : phi + (theta[i] - theta[i - 1]);
    bool converged = false;
    double rho = 0.0;
    double rho_p = 0.0;
    for (int it = 0; it < 60; ++it) {
      spectral::evaluate_with_derivative(curve.rho_hat, phi, rho, rho_p);
      const double s = std::sin(phi - theta[i]);
      const double c = std::cos(phi - theta[i]);
      const double g = dxe - rho * s;
      const double dg = -rho_p * s - rho * c;
      if (!(std::abs(dg) > 0.0)) break;
      double step = g / dg;
      if (std::abs(step) > 0.5) step = std::copysign(0.5, step);
      phi -= step;
      if (std::abs(step) <= 1e-14 * (1.0 + std::abs(phi))) {
        converged = true;
        break;
      }
    }
    spectral::evaluate_with_derivative(curve.rho_hat, phi, rho, rho_p);
    const double r = (d + rho * Vec2(std::cos(phi), std::sin(phi))).dot(e);
    const double miss = std::abs(dxe - rho * std::sin(phi - theta[i]));
    if (!converged && miss > 1e-12 * curve.R) throw Error(ErrorKind::RecenterFail, "ray/curve intersection did not converge");
    if (!(r > 0.0)) throw Error(ErrorKind::RecenterFail, "curve is not star-shaped about the new centre");
    out[i] = r;
  }
  return out;
}

RadialCurve project_area(RadialCurve curve) {
  // (1/2) int rho^2 = pi (a0^2 + (1/2) sum (a_k^2 + b_k^2))
  double osc = 0.0;
  for (int k = 1; k < curve.modes(); ++k) osc += curve.rho_hat.a[k] * curve.rho_hat.a[k] + curve.rho_hat.b[k] * curve.rho_hat.b[k];
  const double a0sq = curve.R * curve.R - 0.5 * osc;
  if (!(a0sq > 0.0)) throw Error(ErrorKind::NonPositiveRadius, "area projection has no positive zero mode");
  curve.rho_hat.a[0] = std::sqrt(a0sq);
  return curve;
}

double GeometryCache::weight() const { return 2.0 * kPi / static_cast<double>(M); }

GeometryCache build_cache(const RadialCurve& curve, const CacheOptions& options) {
  curve.validate();
  GeometryCache g;
  g.M = curve.node_count();
  g.R = curve.R;
  g.pole = curve.pole;
  g.domain = curve.domain;
  g.rho_hat = curve.rho_hat;

  const double ratio = curve.resolution_ratio();
  if (ratio > options.unresolved_tol) {
    if (options.policy == ResolutionPolicy::Abort)
      throw Error(ErrorKind::Unresolved, "top-mode ratio " + std::to_string(ratio) + " exceeds threshold");
    g.resolution_warning = options.policy == ResolutionPolicy::Warn;
  }

  const int m = g.M;
  g.phi = spectral::nodes(m);
  g.rho = spectral::synthesize(curve.rho_hat, m);
  spectral::RealSeries dev = curve.rho_hat;
  dev.a[0] -= curve.R;
  g.rho_dev = spectral::synthesize(dev, m);
  g.rho_phi = spectral::synthesize(spectral::derivative(curve.rho_hat, 1), m);
  g.rho_phiphi = spectral::synthesize(spectral::derivative(curve.rho_hat, 2), m);

  g.ell.resize(m);
  g.kappa.resize(m);
  g.omega.resize(m);
  g.position.resize(m);
  g.tangent.resize(m);
  g.normal.resize(m);
  for (int j = 0; j < m; ++j) {
    const double r = g.rho[j];
    const double rp = g.rho_phi[j];
    const double rpp = g.rho_phiphi[j];
    if (!(r > 0.0)) throw Error(ErrorKind::NonPositiveRadius, "rho <= 0 at a quadrature node");
    const double l = std::hypot(r, rp);
    const double c = std::cos(g.phi[j]);
    const double s = std::sin(g.phi[j]);
    g.ell[j] = l;
    g.kappa[j] = (rp * rp - r * rpp) / (l * l * l) + 1.0 / l;
    g.omega[j] = std::atan2(rp, r);
    g.position[j] = curve.pole + r * Vec2(c, s);
    g.tangent[j] = Vec2(rp * c - r * s, rp * s + r * c) / l;
    g.normal[j] = Vec2(rp * s + r * c, -rp * c + r * s) / l;
  }
  return g;
}

double perimeter(const GeometryCache& cache) { return trapezoid(cache.ell); }

double enclosed_area(const GeometryCache& cache) {
  std::vector<double> f(cache.rho.size());
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = 0.5 * cache.rho[j] * cache.rho[j];
  return trapezoid(f);
}

double energy_gap(const GeometryCache& cache) {
  // ell - R = (u (2R + u) + rho_phi^2) / (ell + R) with u = rho - R
  std::vector<double> f(cache.rho.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double u = cache.rho_dev[j];
    const double rp = cache.rho_phi[j];
    f[j] = (u * (2.0 * cache.R + u) + rp * rp) / (cache.ell[j] + cache.R);
  }
  return trapezoid(f);
}

double isoperimetric_deficit(const GeometryCache& cache) {
  // L - 2 sqrt(pi A) = (L - 2 pi R) - 2 sqrt(pi) (A - pi R^2) / (sqrt(A) + sqrt(pi) R),
  // with A - pi R^2 taken from the coefficients so the zero-mode rounding cancels.
  const auto& s = cache.rho_hat;
  double osc = 0.0;
  for (int k = 1; k < s.size(); ++k) osc += s.a[k] * s.a[k] + s.b[k] * s.b[k];
  const double excess = kPi * ((s.a[0] - cache.R) * (s.a[0] + cache.R) + 0.5 * osc);
  const double area = kPi * cache.R * cache.R + excess;
  const double sqrt_pi = std::sqrt(kPi);
  return energy_gap(cache) - 2.0 * sqrt_pi * excess / (std::sqrt(area) + sqrt_pi * cache.R);
}

double mean_curvature(const GeometryCache& cache) { return 2.0 * kPi / perimeter(cache); }

Vec2 barycenter_bulk(const GeometryCache& cache) {
  std::vector<double> fx(cache.rho.size());
  std::vector<double> fy(cache.rho.size());
  for (std::size_t j = 0; j < fx.size(); ++j) {
    const double r3 = cache.rho[j] * cache.rho[j] * cache.rho[j];
    fx[j] = r3 * std::cos(cache.phi[j]);
    fy[j] = r3 * std::sin(cache.phi[j]);
  }
  const double area = enclosed_area(cache);
  return cache.pole + Vec2(trapezoid(fx), trapezoid(fy)) / (3.0 * area);
}

Vec2 barycenter_boundary(const GeometryCache& cache) {
  std::vector<double> fx(cache.rho.size());
  std::vector<double> fy(cache.rho.size());
  for (std::size_t j = 0; j < fx.size(); ++j) {
    const Vec2 d = cache.position[j] - cache.pole;
    fx[j] = d.x() * cache.ell[j];
    fy[j] = d.y() * cache.ell[j];
  }
  return cache.pole + Vec2(trapezoid(fx), trapezoid(fy)) / perimeter(cache);
}

double barycenter_equivalence_residual(const GeometryCache& cache) {
  const Vec2 bulk = barycenter_bulk(cache) - cache.pole;
  const Vec2 boundary = barycenter_boundary(cache) - cache.pole;
  const double factor = perimeter(cache) / (3.0 * enclosed_area(cache));
  return (bulk - factor * boundary).norm();
}

Vec2 cone_weighted_barycenter_offset(const GeometryCache& cache) {
  std::vector<double> fx(cache.rho.size());
  std::vector<double> fy(cache.rho.size());
  for (std::size_t j = 0; j < fx.size(); ++j) {
    const Vec2 d = cache.position[j] - cache.pole;
    const double w = d.dot(cache.normal[j]) * cache.ell[j];
    fx[j] = d.x() * w;
    fy[j] = d.y() * w;
  }
  return Vec2(trapezoid(fx), trapezoid(fy)) / (3.0 * enclosed_area(cache));
}

AdmissibilityReport admissibility_report(const RadialCurve& curve, double delta, const AdmissibilityTolerances& tol) {
  CacheOptions opts;
  opts.policy = ResolutionPolicy::Ignore;
  const GeometryCache g = build_cache(curve, opts);
  AdmissibilityReport r;
  for (int j = 0; j < g.M; ++j) {
    r.annulus = std::max(r.annulus, std::abs(g.rho_dev[j]) / curve.R);
    r.slope = std::max(r.slope, std::abs(g.rho_phi[j]) / curve.R);
  }
  r.barycenter = (barycenter_bulk(g) - g.pole).norm() / curve.R;
  const double disk = kPi * curve.R * curve.R;
  r.area = std::abs(enclosed_area(g) - disk) / disk;
  r.annulus_ok = r.annulus <= delta;
  r.slope_ok = r.slope <= delta;
  r.barycenter_ok = r.barycenter <= tol.barycenter;
  r.area_ok = r.area <= tol.area;
  return r;
}

namespace {

struct AnnulusProblem {
  std::vector<Vec2> points;
};

void annulus_radii(const AnnulusProblem& p, const Vec2& c, double& r_out, double& r_in) {
  r_out = 0.0;
  r_in = std::numeric_limits<double>::infinity();
  for (const Vec2& x : p.points) {
    const double d = (x - c).norm();
    r_out = std::max(r_out, d);
    r_in = std::min(r_in, d);
  }
}

double annulus_width(const gsl_vector* v, void* params) {
  const auto* p = static_cast<const AnnulusProblem*>(params);
  double r_out = 0.0;
  double r_in = 0.0;
  annulus_radii(*p, Vec2(gsl_vector_get(v, 0), gsl_vector_get(v, 1)), r_out, r_in);
  return r_out - r_in;
}

}  // namespace

BonnesenReport bonnesen_monitor(const GeometryCache& cache) {
  const int dense = 8 * cache.M;
  const auto rho = spectral::synthesize(cache.rho_hat, dense);
  const auto phi = spectral::nodes(dense);
  AnnulusProblem problem;
  problem.points.resize(rho.size());
  for (int j = 0; j < dense; ++j) problem.points[j] = cache.pole + rho[j] * Vec2(std::cos(phi[j]), std::sin(phi[j]));

  const Vec2 start = barycenter_bulk(cache);
  const double scale = std::sqrt(enclosed_area(cache) / kPi);

  gsl_multimin_function fn;
  fn.n = 2;
  fn.f = annulus_width;
  fn.params = &problem;
  gsl_vector* x = gsl_vector_alloc(2);
  gsl_vector* step = gsl_vector_alloc(2);
  gsl_vector_set(x, 0, start.x());
  gsl_vector_set(x, 1, start.y());
  gsl_vector_set_all(step, 0.05 * scale);
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
  gsl_multimin_fminimizer_set(s, &fn, x, step);

  int status = GSL_CONTINUE;
  int iter = 0;
  constexpr int kMaxIter = 2000;
  while (status == GSL_CONTINUE && iter < kMaxIter) {
    ++iter;
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-13 * scale);
  }
  const Vec2 center(gsl_vector_get(s->x, 0), gsl_vector_get(s->x, 1));
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(x);

  if (!std::isfinite(center.x()) || !std::isfinite(center.y()) || (center - start).norm() > scale)
    throw Error(ErrorKind::OptimFail, "annulus centre search diverged");

  BonnesenReport r;
  r.center = center;
  r.iterations = iter;
  annulus_radii(problem, center, r.R_out, r.R_in);
  const double width = r.R_out - r.R_in;
  r.lhs = kPi * kPi * width * width;
  const double len = perimeter(cache);
  // L^2 - 4 pi |Omega| = (L - 2 pi R)(L + 2 pi R) with R the equal-area radius
  const double deficit = isoperimetric_deficit(cache);
  r.rhs = deficit * (len + 2.0 * kPi * scale);
  return r;
}

}  // namespace msrelax::geometry
