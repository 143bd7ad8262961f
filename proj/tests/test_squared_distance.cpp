#include <gtest/gtest.h>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>

#include <cmath>
#include <vector>

#include "msrelax/squared_distance.hpp"

using namespace msrelax;
using namespace msrelax::potential;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct DiskPair {
  double a;
  double R;
};

double bessel_integrand(double r, void* p) {
  const auto q = *static_cast<DiskPair*>(p);
  if (r < 1e-6) return kPi * std::pow(q.R, 4) * q.a * q.a * r / 4;
  const double j1 = gsl_sf_bessel_J1(q.R * r);
  return 4 * kPi * (1 - gsl_sf_bessel_J0(r * q.a)) * q.R * q.R * j1 * j1 / (r * r * r);
}

// Plane H between B_R(0) and B_R(a) from the Fourier side:
//   H = 4 pi R^2 int_0^inf (1 - J0(a r)) J1(R r)^2 r^-3 dr,
// integrated panel by panel with the averaged asymptotic tail added; the
// periodic box of half edge L lowers it by pi^2 R^4 a^2 / (8 L^2).
double shifted_disk_H(double a, double R, double L) {
  gsl_set_error_handler_off();
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(1000);
  DiskPair p{a, R};
  gsl_function F{&bessel_integrand, &p};
  const double X = 4000.0 / R;
  double total = 0.0;
  for (double lo = 0.0; lo < X; lo += kPi / R) {
    double res = 0.0, err = 0.0;
    gsl_integration_qag(&F, lo, std::min(lo + kPi / R, X), 1e-18, 1e-10, 1000, GSL_INTEG_GAUSS61, w, &res, &err);
    total += res;
  }
  gsl_integration_workspace_free(w);
  total += 4.0 * R / (3.0 * X * X * X);
  return total - kPi * kPi * std::pow(R, 4) * a * a / (8 * L * L);
}

geometry::RadialCurve shifted(double a, double angle) {
  return geometry::from_function([=](double p) { return geometry::shifted_disk_radius(1.0, a, angle, p); }, 1.0, 64);
}

}  // namespace

TEST(SquaredDistance, IdenticalCurvesGiveZero) {
  const auto c = geometry::project_area(
      geometry::from_function([](double p) { return 1.0 + 0.02 * std::cos(3 * p); }, 1.0, 64));
  HOptions o;
  o.grid = 256;
  EXPECT_NEAR(squared_distance(c, c, o).H, 0.0, 1e-18);
}

TEST(SquaredDistance, ShiftedDiskAgainstBesselIntegral) {
  for (double a : {0.02, 0.05}) {
    const auto r = squared_distance(shifted(a, 0.3), geometry::Vec2::Zero());
    const double ref = shifted_disk_H(a, 1.0, r.L);
    EXPECT_NEAR(r.H / ref, 1.0, 5e-3) << "a " << a;
  }
}

TEST(SquaredDistance, DirectRouteAgainstBesselIntegral) {
  const auto c = shifted(0.05, 0.3);
  DirectOptions o;
  o.grid = 32;
  const double H = squared_distance_direct(c, disk_like(c, geometry::Vec2::Zero()), o);
  EXPECT_NEAR(H / shifted_disk_H(0.05, 1.0, o.embed_factor), 1.0, 5e-3);
}

TEST(SquaredDistance, ScalesWithR4) {
  // H of a set difference scales like length^4.
  HOptions o;
  o.grid = 512;
  const auto a = shifted(0.05, 0.0);
  auto b = geometry::from_function([](double p) { return geometry::shifted_disk_radius(2.0, 0.1, 0.0, p); }, 2.0, 64);
  const double h1 = squared_distance(a, geometry::Vec2::Zero(), o).H;
  const double h2 = squared_distance(b, geometry::Vec2::Zero(), o).H;
  EXPECT_NEAR(h2 / h1, 16.0, 16.0 * 1e-9);
}

TEST(SquaredDistance, CellPairMeanLog) {
  // Mean log distance of two uniform points in the unit square.
  EXPECT_NEAR(cell_pair_mean_log(0, 0), std::log(2.0) / 3 + kPi / 3 - 25.0 / 12, 1e-10);
  // Separated cells: tensor Gauss-Legendre on the smooth integrand.
  const int n = 12;
  gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(n);
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(0.0, 1.0, i, &x[i], &w[i], t);
  gsl_integration_glfixed_table_free(t);
  const int p = 3, q = 1;
  double ref = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double dx = p + x[k] - x[i];
          const double dy = q + x[l] - x[j];
          ref += w[i] * w[j] * w[k] * w[l] * 0.5 * std::log(dx * dx + dy * dy);
        }
  EXPECT_NEAR(cell_pair_mean_log(p, q), ref, 1e-9);
  EXPECT_NEAR(cell_pair_mean_log(-p, q), ref, 1e-9);
}

TEST(SquaredDistance, CoarseGridFlag) {
  HOptions o;
  o.grid = 64;
  EXPECT_TRUE(squared_distance(shifted(0.01, 0.0), geometry::Vec2::Zero(), o).grid_too_coarse);
}
