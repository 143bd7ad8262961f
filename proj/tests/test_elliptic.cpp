#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "msrelax/elliptic.hpp"
#include "msrelax/error.hpp"

using namespace msrelax;
using namespace msrelax::elliptic;

namespace {

constexpr double kPi = 3.14159265358979323846;

// sum_{w != 0} w^-4 over square shells of Z[i] up to T.
double brute_g4(int T) {
  double s = 0.0;
  for (int r = T; r >= 1; --r)
    for (int m = -r; m <= r; ++m)
      for (int n = -r; n <= r; ++n) {
        if (std::max(std::abs(m), std::abs(n)) != r) continue;
        s += std::real(std::pow(std::complex<double>(m, n), -4));
      }
  return s;
}

}  // namespace

TEST(Elliptic, EisensteinG4MatchesLatticeSum) {
  LatticeKernel k(1.0);
  // Shell sums converge like T^-2; one Richardson step removes the leading term.
  const double s1 = brute_g4(200), s2 = brute_g4(400);
  const double extrapolated = (4 * s2 - s1) / 3;
  EXPECT_NEAR(static_cast<double>(k.eisenstein_unit(4)), extrapolated, 1e-8);
  EXPECT_EQ(k.eisenstein_unit(6), 0.0L);
}

TEST(Elliptic, PeriodicityAtRandomPoints) {
  for (double L : {1.0, 3.0}) {
    LatticeKernel k(L);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-L, L);
    for (int i = 0; i < 40; ++i) {
      const cplx z(u(rng), u(rng));
      if (std::abs(z) < 0.05 * L) continue;
      const double v = lambda(k, z);
      EXPECT_NEAR(lambda(k, z + cplx(2 * L, 0)), v, 1e-10);
      EXPECT_NEAR(lambda(k, z + cplx(0, 2 * L)), v, 1e-10);
      EXPECT_NEAR(lambda(k, z - cplx(2 * L, 2 * L)), v, 1e-10);
    }
  }
}

TEST(Elliptic, SquareLatticeSymmetry) {
  LatticeKernel k(1.0);
  const cplx z(0.31, 0.57);
  const double v = lambda(k, z);
  EXPECT_NEAR(lambda(k, -z), v, 1e-13);
  EXPECT_NEAR(lambda(k, cplx(0, 1) * z), v, 1e-13);
  EXPECT_NEAR(lambda(k, std::conj(z)), v, 1e-13);
}

TEST(Elliptic, LegendreRelation) {
  LatticeKernel k(2.0);
  EXPECT_LE(legendre_residual(k), 1e-12);
  k.set_quasi_periods(k.eta1() * 1.01, k.eta3());
  EXPECT_GT(legendre_residual(k), 1e-3);
}

TEST(Elliptic, SeriesAgreesWithProductForm) {
  LatticeKernel k(1.5);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 30; ++i) {
    const cplx z(u(rng), u(rng));
    if (std::abs(z) < 1e-3) continue;
    EXPECT_NEAR(lambda_series_small(k, z), lambda(k, z), 1e-12);
    EXPECT_NEAR(lambda_smooth(k, z), lambda(k, z) - std::log(std::abs(z)), 1e-12);
  }
}

TEST(Elliptic, TruncationIndependence) {
  LatticeKernel a(1.0, 8), b(1.0, 32);
  for (const cplx z : {cplx(0.2, 0.1), cplx(-0.9, 0.95), cplx(0.7, -0.3)}) EXPECT_NEAR(lambda(a, z), lambda(b, z), 1e-14);
}

TEST(Elliptic, ChargeBalance) {
  LatticeKernel k(1.0);
  const auto c = charge_check(k);
  EXPECT_NEAR(c.boundary_flux, 0.0, 1e-9);
  EXPECT_NEAR(c.circle_flux, c.circle_expected, 1e-9);
  EXPECT_LE(c.max_laplacian_error, 1e-5);
  EXPECT_LE(c.residual, 1e-6);
  EXPECT_NEAR(4.0 * k.background() * 4.0, 2 * kPi, 1e-14);
}

TEST(Elliptic, NearPoleAndRangeErrors) {
  LatticeKernel k(1.0);
  try {
    lambda(k, cplx(2.0, 1e-12));
    FAIL() << "expected NearPole";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NearPole);
  }
  EXPECT_THROW(lambda_smooth(k, cplx(1.9, 0.0)), Error);
  EXPECT_THROW(LatticeKernel(0.0), Error);
}

TEST(Elliptic, WrapToCell) {
  const cplx w = wrap_to_cell(1.0, cplx(3.5, -2.25));
  EXPECT_NEAR(w.real(), -0.5, 1e-15);
  EXPECT_NEAR(w.imag(), -0.25, 1e-15);
  LatticeKernel k(1.0);
  EXPECT_NEAR(lambda_periodic(k, cplx(3.5, -2.25)), lambda(k, w), 1e-12);
}
