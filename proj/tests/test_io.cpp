#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "msrelax/config.hpp"
#include "msrelax/curve_io.hpp"
#include "msrelax/error.hpp"
#include "msrelax/trajectory.hpp"

using namespace msrelax;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Config, ParsesKeysCommentsAndRanges) {
  std::istringstream in(
      "# regime run\n"
      "domain = torus\nL = 8\nN = 64\n"
      "modes = 8-11, 14   # inclusive range\n"
      "amps = 6e-4\nphases = random\nseed = 3\n"
      "scheme = rk4\nt_end = 0.3\nk_H = 5\n"
      "initial = start.msrc\n");
  const auto c = parse_config(in, "/data/runs");
  EXPECT_EQ(c.domain, "torus");
  EXPECT_DOUBLE_EQ(c.L, 8.0);
  EXPECT_EQ(c.modes, (std::vector<int>{8, 9, 10, 11, 14}));
  EXPECT_TRUE(c.random_phases);
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.scheme, "rk4");
  EXPECT_EQ(c.initial, "/data/runs/start.msrc");
  EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  RunConfig c;
  EXPECT_EQ(kind_of([&] { set_config_value(c, "colour", "red"); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([&] { set_config_value(c, "N", "abc"); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([&] { set_config_value(c, "domain", "sphere"); }), ErrorKind::ConfigError);
  RunConfig bad_n;
  bad_n.N = 48;
  EXPECT_EQ(kind_of([&] { validate_config(bad_n); }), ErrorKind::ConfigError);
  RunConfig torus;
  torus.domain = "torus";
  EXPECT_EQ(kind_of([&] { validate_config(torus); }), ErrorKind::ConfigError);
  RunConfig modes;
  modes.N = 16;
  modes.modes = {20};
  modes.amps = {0.01};
  EXPECT_EQ(kind_of([&] { validate_config(modes); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { load_config("/nonexistent/run.cfg"); }), ErrorKind::IoError);
}

TEST(Config, HashIgnoresOutputLocations) {
  RunConfig a;
  a.modes = {2};
  a.amps = {0.01};
  RunConfig b = a;
  b.output_dir = "/elsewhere";
  b.trajectory = "t.csv";
  EXPECT_EQ(a.hash(), b.hash());
  b.c_acc = 0.01;
  EXPECT_NE(a.hash(), b.hash());
  // FNV-1a reference values
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(CurveIo, RoundTripIsExact) {
  auto c = geometry::from_function([](double p) { return 1.0 + 0.01 * std::cos(3 * p) + 1e-3 * std::sin(7 * p); },
                                   1.0, 16, geometry::Vec2(0.1, -0.2), geometry::Domain::torus(4.0));
  std::stringstream ss;
  curve_io::write(ss, c);
  const auto d = curve_io::read(ss);
  EXPECT_EQ(d.modes(), 16);
  EXPECT_TRUE(d.domain.is_torus());
  EXPECT_EQ(d.domain.L, 4.0);
  EXPECT_EQ(d.pole, c.pole);
  for (int k = 0; k < 16; ++k) {
    EXPECT_EQ(d.rho_hat.a[k], c.rho_hat.a[k]);
    EXPECT_EQ(d.rho_hat.b[k], c.rho_hat.b[k]);
  }
}

TEST(CurveIo, MalformedInput) {
  std::istringstream bad("msrc v2 16 1 plane 0 0\n");
  EXPECT_EQ(kind_of([&] { curve_io::read(bad); }), ErrorKind::IoError);
  std::istringstream trunc("msrc v1 4 1 plane 0 0\n1 0\n0 0\n");
  EXPECT_EQ(kind_of([&] { curve_io::read(trunc); }), ErrorKind::IoError);
}

TEST(Trajectory, RoundTripKeepsRowsAndNaN) {
  TrajectoryLog log;
  log.meta.N = 64;
  log.meta.R = 1.5;
  log.meta.seed = 5;
  log.meta.config_hash = 0x1234abcdULL;
  log.meta.scheme = "etdrk4";
  log.meta.status = "finished";
  for (int i = 0; i < 3; ++i) {
    DiagnosticsRecord r;
    r.step = i;
    r.t = 0.1 * i + 1.0 / 3.0;
    r.E = std::exp(-i);
    r.D = 2.0 / 7.0;
    r.H = i == 1 ? 0.25 : std::nan("");
    r.mode_amps[3] = 1e-5 * i;
    log.rows.push_back(r);
  }
  std::stringstream ss;
  trajectory::write(ss, log);
  const auto back = trajectory::read(ss);
  EXPECT_EQ(back.meta.N, 64);
  EXPECT_EQ(back.meta.R, 1.5);
  EXPECT_EQ(back.meta.config_hash, 0x1234abcdULL);
  EXPECT_EQ(back.meta.status, "finished");
  ASSERT_EQ(back.rows.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(back.rows[i].t, log.rows[i].t);
    EXPECT_EQ(back.rows[i].E, log.rows[i].E);
    EXPECT_EQ(back.rows[i].mode_amps[3], log.rows[i].mode_amps[3]);
    EXPECT_EQ(std::isnan(back.rows[i].H), i != 1);
  }
  EXPECT_EQ(trajectory::column_names().front(), "step");
}

TEST(Errors, KindsAreNamed) {
  const Error e(ErrorKind::RecenterFail, "shift too large");
  EXPECT_EQ(e.kind(), ErrorKind::RecenterFail);
  EXPECT_NE(std::string(e.what()).find("shift too large"), std::string::npos);
  EXPECT_STRNE(to_string(ErrorKind::StepRejected), to_string(ErrorKind::EnergyBalanceFail));
}
