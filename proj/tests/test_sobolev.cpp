#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "msrelax/error.hpp"
#include "msrelax/geometry.hpp"
#include "msrelax/sobolev.hpp"

using namespace msrelax;
using namespace msrelax::sobolev;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> samples(double P, int m, const std::function<double(double)>& f) {
  std::vector<double> v(m);
  for (int j = 0; j < m; ++j) v[j] = f(2 * P * j / m);
  return v;
}

}  // namespace

TEST(Sobolev, PureModeNorms) {
  const double P = 2.5;
  const int k = 3;
  const auto s = from_samples(samples(P, 64, [&](double x) { return std::cos(kPi * k * x / P); }), P);
  // int_0^{2P} cos^2 = P
  EXPECT_NEAR(l2_norm(s), std::sqrt(P), 1e-14);
  for (double sigma : {-1.0, -0.5, 0.5, 1.0, 1.5}) {
    const double ref = std::pow(kPi * k / P, sigma) * std::sqrt(P);
    EXPECT_NEAR(h_norm(s, sigma), ref, 1e-13 * ref) << "sigma " << sigma;
  }
}

TEST(Sobolev, NegativeOrderRejectsMean) {
  const auto s = from_samples(samples(1.0, 32, [](double x) { return 1.0 + std::sin(kPi * x); }), 1.0);
  try {
    h_norm(s, -0.5);
    FAIL() << "expected NonZeroMean";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonZeroMean);
  }
  EXPECT_NO_THROW(h_norm(s, 0.5));
}

TEST(Sobolev, RoundTripAndFractionalDerivative) {
  const double P = 1.0;
  const auto f = samples(P, 32, [](double x) { return std::sin(kPi * x) + 0.3 * std::cos(3 * kPi * x); });
  const auto s = from_samples(f, P);
  const auto back = to_samples(s, 32);
  for (int j = 0; j < 32; ++j) EXPECT_NEAR(back[j], f[j], 1e-15);
  const auto d = fractional_derivative(s, 1.0);
  EXPECT_NEAR(l2_norm(d), h_norm(s, 1.0), 1e-13);
}

TEST(Sobolev, InterpolationAndPoincareHoldOnRandomSignals) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double P = 0.5 + trial % 4;
    std::vector<double> a(12), b(12);
    for (int k = 1; k < 12; ++k) a[k] = normal(rng) / k, b[k] = normal(rng) / k;
    const auto s = from_samples(samples(P, 64,
                                        [&](double x) {
                                          double v = 0.0;
                                          for (int k = 1; k < 12; ++k)
                                            v += a[k] * std::cos(kPi * k * x / P) + b[k] * std::sin(kPi * k * x / P);
                                          return v;
                                        }),
                                P);
    const auto ic = interpolation_check(s, -0.5, 0.25, 1.0);
    EXPECT_LE(ic.lhs, ic.rhs * (1 + 1e-12));
    EXPECT_TRUE(poincare_check(s, 0.75).holds);
  }
}

TEST(Sobolev, CurveNormOnCircle) {
  // Arc length s = R phi, so cos(k phi) has frequency k / R on a period 2 pi R.
  const double R = 1.7;
  const int k = 4;
  const auto cache = geometry::build_cache(geometry::circle(R, 32));
  std::vector<double> f(cache.M);
  for (int j = 0; j < cache.M; ++j) f[j] = std::cos(k * cache.phi[j]);
  for (double sigma : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const double ref = std::pow(k / R, sigma) * std::sqrt(kPi * R);
    EXPECT_NEAR(curve_norm(cache, f, sigma), ref, 1e-11 * ref) << "sigma " << sigma;
  }
}

TEST(Sobolev, ArclengthResampleOnCurvedBoundary) {
  const auto curve = geometry::from_function([](double p) { return 1.0 + 0.05 * std::cos(3 * p); }, 1.0, 64);
  const auto cache = geometry::build_cache(curve);
  double length = 0.0;
  const auto v = arclength_resample(cache, cache.ell, length);
  EXPECT_NEAR(length, geometry::perimeter(cache), 1e-13);
  EXPECT_EQ(v.size(), static_cast<std::size_t>(cache.M));
}
