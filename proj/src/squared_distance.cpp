#include "msrelax/squared_distance.hpp"

#include <fftw3.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "msrelax/elliptic.hpp"
#include "msrelax/error.hpp"
#include "msrelax/spectral.hpp"

namespace msrelax::potential {
namespace {

constexpr double kPi = std::numbers::pi;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double box_half_edge(const geometry::RadialCurve& a, double embed_factor) {
  if (a.domain.is_torus()) return a.domain.L;
  return embed_factor * a.R;
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

GaussRule gauss_rule(int n) {
  gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n));
  GaussRule g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(0.0, 1.0, static_cast<std::size_t>(i), &g.x[i], &g.w[i], t);
  gsl_integration_glfixed_table_free(t);
  return g;
}

// Deposits the signed band between rho_b and rho_a (both about `center`,
// sampled at n uniform angles) into the G x G cells of [-L, L)^2 and returns H.
HResult band_h(const std::vector<double>& rho_a, const std::vector<double>& rho_b, const geometry::Vec2& center,
               double L, const HOptions& options) {
  const int G = options.grid;
  const int n = static_cast<int>(rho_a.size());
  const double h = 2.0 * L / G;
  const double dphi = 2.0 * kPi / n;
  const GaussRule gl = gauss_rule(options.radial_points);

  HResult out;
  out.L = L;
  std::vector<double> grid(static_cast<std::size_t>(G) * G, 0.0);
  double band = 0.0;
  for (int s = 0; s < n; ++s) {
    const double r1 = rho_b[s];
    const double r2 = rho_a[s];
    band = std::max(band, std::abs(r2 - r1));
    if (r1 == r2) continue;
    const double phi = dphi * s;
    const double c = std::cos(phi);
    const double sn = std::sin(phi);
    for (std::size_t q = 0; q < gl.x.size(); ++q) {
      const double r = r1 + (r2 - r1) * gl.x[q];
      const double mass = (r2 - r1) * gl.w[q] * r * dphi;
      double x = center.x() + r * c;
      double y = center.y() + r * sn;
      x -= 2.0 * L * std::floor((x + L) / (2.0 * L));
      y -= 2.0 * L * std::floor((y + L) / (2.0 * L));
      const int i = std::clamp(static_cast<int>((x + L) / h), 0, G - 1);
      const int j = std::clamp(static_cast<int>((y + L) / h), 0, G - 1);
      grid[static_cast<std::size_t>(i) * G + j] += mass;
      out.mass += mass;
    }
  }
  out.band_cells = band / h;
  out.grid_too_coarse = out.band_cells < 4.0;

  const int gh = G / 2 + 1;
  double* in = fftw_alloc_real(static_cast<std::size_t>(G) * G);
  fftw_complex* spec = fftw_alloc_complex(static_cast<std::size_t>(G) * gh);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_2d(G, G, in, spec, FFTW_ESTIMATE);
  }
  std::copy(grid.begin(), grid.end(), in);
  fftw_execute(plan);
  const double kscale = kPi / L;
  double sum = 0.0;
  for (int p = 0; p < G; ++p) {
    const int kp = p <= G / 2 ? p : p - G;
    for (int q = 0; q < gh; ++q) {
      if (p == 0 && q == 0) continue;
      const std::size_t idx = static_cast<std::size_t>(p) * gh + q;
      const double power = spec[idx][0] * spec[idx][0] + spec[idx][1] * spec[idx][1];
      const double k2 = kscale * kscale * (static_cast<double>(kp) * kp + static_cast<double>(q) * q);
      const double mult = (q == 0 || q == G / 2) ? 1.0 : 2.0;
      sum += mult * power / k2;
    }
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(spec);
  }
  out.H = sum / (4.0 * L * L);
  return out;
}

int angular_samples(double rmax, double L, const HOptions& options) {
  const double h = 2.0 * L / options.grid;
  const int wanted = static_cast<int>(std::ceil(options.samples_per_cell * 2.0 * kPi * rmax / h));
  return next_pow2(std::max(1024, wanted));
}

void check_options(const HOptions& options) {
  if (options.grid < 8 || options.grid % 2 != 0) throw Error(ErrorKind::InvalidArgument, "H grid must be even and >= 8");
  if (options.samples_per_cell < 1 || options.radial_points < 1)
    throw Error(ErrorKind::InvalidArgument, "H sampling densities must be positive");
}

}  // namespace

HResult squared_distance(const geometry::RadialCurve& a, const geometry::RadialCurve& b, const HOptions& options) {
  check_options(options);
  const double L = box_half_edge(a, options.embed_factor);
  double rmax = 0.0;
  for (double r : spectral::synthesize(a.rho_hat, a.node_count())) rmax = std::max(rmax, r);
  const int n = angular_samples(1.5 * rmax, L, options);
  const auto rho_a = spectral::synthesize(a.rho_hat, n);
  std::vector<double> rho_b;
  if ((b.pole - a.pole).norm() == 0.0) {
    rho_b = spectral::synthesize(b.rho_hat, n);
  } else {
    rho_b = geometry::radial_function_about(b, a.pole, spectral::nodes(n));
  }
  return band_h(rho_a, rho_b, a.pole, L, options);
}

HResult squared_distance(const geometry::RadialCurve& curve, const geometry::Vec2& center, const HOptions& options) {
  check_options(options);
  const double L = box_half_edge(curve, options.embed_factor);
  double rmax = 0.0;
  for (double r : spectral::synthesize(curve.rho_hat, curve.node_count())) rmax = std::max(rmax, r);
  const int n = angular_samples(1.5 * rmax, L, options);
  const auto rho_a = spectral::synthesize(curve.rho_hat, n);
  const auto phi = spectral::nodes(n);
  const geometry::Vec2 d = center - curve.pole;
  const double shift = d.norm();
  const double angle = std::atan2(d.y(), d.x());
  std::vector<double> rho_b(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) rho_b[s] = geometry::shifted_disk_radius(curve.R, shift, angle, phi[s]);
  return band_h(rho_a, rho_b, curve.pole, L, options);
}

geometry::RadialCurve disk_like(const geometry::RadialCurve& like, const geometry::Vec2& center) {
  const geometry::Vec2 d = center - like.pole;
  const double shift = d.norm();
  const double angle = std::atan2(d.y(), d.x());
  return geometry::from_function(
      [&](double phi) { return geometry::shifted_disk_radius(like.R, shift, angle, phi); }, like.R, like.modes(),
      like.pole, like.domain);
}

namespace {

// int_0^1 int_0^1 f(s, t) over a triangle-mapped square with a log singularity
// at corner c; the square is split into two triangles with apex c.
template <class F>
double duffy_square(const geometry::Vec2& c, const geometry::Vec2& a, const geometry::Vec2& o,
                    const geometry::Vec2& b, const GaussRule& gl, F&& f) {
  double total = 0.0;
  for (const auto& [v1, v2] : {std::pair{a, o}, std::pair{o, b}}) {
    const geometry::Vec2 e1 = v1 - c;
    const geometry::Vec2 e2 = v2 - v1;
    const double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      // u = tau^2 grades the nodes toward the apex, where f ~ log u.
      const double tau = gl.x[i];
      const double u = tau * tau;
      for (std::size_t j = 0; j < gl.x.size(); ++j) {
        const double v = gl.x[j];
        const geometry::Vec2 x = c + u * (e1 + v * e2);
        total += gl.w[i] * gl.w[j] * 2.0 * tau * u * jac * f(x);
      }
    }
  }
  return total;
}

}  // namespace

double cell_pair_mean_log(int p, int q) {
  // Mean over the difference vector (p + s, q + t), s, t in [-1, 1], with the
  // tent density (1 - |s|)(1 - |t|).
  static const GaussRule gl = gauss_rule(32);
  double total = 0.0;
  for (int sq = -1; sq <= 0; ++sq) {
    for (int tq = -1; tq <= 0; ++tq) {
      auto f = [&](const geometry::Vec2& st) {
        const double s = st.x();
        const double t = st.y();
        const double w = (1.0 - std::abs(s)) * (1.0 - std::abs(t));
        const double r = std::hypot(p + s, q + t);
        return r > 0.0 ? w * std::log(r) : 0.0;
      };
      const geometry::Vec2 lo(sq, tq);
      const geometry::Vec2 corners[4] = {lo, lo + geometry::Vec2(1, 0), lo + geometry::Vec2(1, 1),
                                         lo + geometry::Vec2(0, 1)};
      int singular = -1;
      for (int c = 0; c < 4; ++c)
        if (corners[c].x() == -p && corners[c].y() == -q) singular = c;
      if (singular >= 0) {
        const geometry::Vec2& c = corners[singular];
        const geometry::Vec2& a = corners[(singular + 1) % 4];
        const geometry::Vec2& o = corners[(singular + 2) % 4];
        const geometry::Vec2& b = corners[(singular + 3) % 4];
        total += duffy_square(c, a, o, b, gl, f);
      } else {
        for (std::size_t i = 0; i < gl.x.size(); ++i)
          for (std::size_t j = 0; j < gl.x.size(); ++j)
            total += gl.w[i] * gl.w[j] * f(lo + geometry::Vec2(gl.x[i], gl.x[j]));
      }
    }
  }
  return total;
}

double squared_distance_direct(const geometry::RadialCurve& a, const geometry::RadialCurve& b,
                               const DirectOptions& options) {
  const int G = options.grid;
  const int S = options.subsamples;
  const int B = options.subcells;
  if (G < 4 || S < 1 || B < 1 || S % B != 0) throw Error(ErrorKind::InvalidArgument, "bad direct-sum options");
  const double L = box_half_edge(a, options.embed_factor);
  const elliptic::LatticeKernel lattice(L, 16);

  // Square box enclosing both sets.
  geometry::Vec2 lo(std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
  geometry::Vec2 hi = -lo;
  for (const auto* c : {&a, &b}) {
    const int m = 16 * c->node_count();
    const auto rho = spectral::synthesize(c->rho_hat, m);
    const auto phi = spectral::nodes(m);
    for (int j = 0; j < m; ++j) {
      const geometry::Vec2 x = c->pole + rho[j] * geometry::Vec2(std::cos(phi[j]), std::sin(phi[j]));
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
    }
  }
  const geometry::Vec2 mid = 0.5 * (lo + hi);
  const double side = 1.02 * std::max(hi.x() - lo.x(), hi.y() - lo.y());
  const double h = side / G;
  const double hs = h / B;
  const double sub = h / S;
  const int per = S / B;
  const geometry::Vec2 origin = mid - geometry::Vec2(0.5 * side, 0.5 * side);

  auto inside = [](const geometry::RadialCurve& c, const geometry::Vec2& x) {
    const geometry::Vec2 d = x - c.pole;
    const double r = d.norm();
    if (r == 0.0) return true;
    return r < spectral::evaluate(c.rho_hat, std::atan2(d.y(), d.x()));
  };
  auto near_boundary = [&](const geometry::Vec2& x) {
    for (const auto* c : {&a, &b}) {
      const geometry::Vec2 d = x - c->pole;
      const double r = spectral::evaluate(c->rho_hat, std::atan2(d.y(), d.x()));
      if (std::abs(d.norm() - r) <= 1.5 * h) return true;
    }
    return false;
  };

  // Cells crossing the band, each with B x B sub-cell masses from S x S
  // point-membership samples.
  struct Cell {
    int i = 0;
    int j = 0;
    double m = 0.0;
    geometry::Vec2 centroid = geometry::Vec2::Zero();
    std::vector<double> sub;
  };
  std::vector<Cell> cells;
  for (int i = 0; i < G; ++i) {
    for (int j = 0; j < G; ++j) {
      if (!near_boundary(origin + geometry::Vec2((i + 0.5) * h, (j + 0.5) * h))) continue;
      Cell cell;
      cell.i = i;
      cell.j = j;
      cell.sub.assign(static_cast<std::size_t>(B) * B, 0.0);
      geometry::Vec2 moment = geometry::Vec2::Zero();
      for (int u = 0; u < S; ++u) {
        for (int v = 0; v < S; ++v) {
          const geometry::Vec2 x = origin + geometry::Vec2(i * h + (u + 0.5) * sub, j * h + (v + 0.5) * sub);
          const int f = static_cast<int>(inside(a, x)) - static_cast<int>(inside(b, x));
          if (f == 0) continue;
          cell.sub[static_cast<std::size_t>(u / per) * B + v / per] += f * sub * sub;
          cell.m += f * sub * sub;
          moment += f * sub * sub * x;
        }
      }
      bool any = false;
      for (double s : cell.sub) any = any || s != 0.0;
      if (!any) continue;
      cell.centroid = cell.m != 0.0 ? geometry::Vec2(moment / cell.m)
                                    : origin + geometry::Vec2((i + 0.5) * h, (j + 0.5) * h);
      cells.push_back(std::move(cell));
    }
  }
  if (cells.empty()) return 0.0;

  // Zero net mass, as the H^{-1} norm on the torus requires.
  double net = 0.0;
  double abs_total = 0.0;
  for (const Cell& c : cells)
    for (double s : c.sub) {
      net += s;
      abs_total += std::abs(s);
    }
  for (Cell& c : cells) {
    c.m = 0.0;
    for (double& s : c.sub) {
      s -= net * std::abs(s) / abs_total;
      c.m += s;
    }
  }

  auto smooth_part = [&](const elliptic::cplx& d) {
    if (std::abs(d) < 1.5 * L) return elliptic::lambda_smooth(lattice, d);
    return elliptic::lambda(lattice, d) - std::log(std::abs(d));
  };
  // Sub-cell pair averages of log|x - y| by offset, exact for small offsets.
  constexpr int kNear = 2;  // cell offsets treated at sub-cell resolution
  constexpr int kExact = 4;  // sub-cell offsets integrated exactly
  const int span = (kNear + 1) * B;
  std::vector<double> sub_log(static_cast<std::size_t>(span) * span);
  for (int p = 0; p < span; ++p) {
    for (int q = 0; q < span; ++q) {
      sub_log[static_cast<std::size_t>(p) * span + q] =
          (p <= kExact && q <= kExact) ? std::log(hs) + cell_pair_mean_log(p, q) : std::log(hs * std::hypot(p, q));
    }
  }
  const double smooth_shift = (hs * hs / 12.0) * (-kPi / (2.0 * L * L));

  double sum = 0.0;
  for (const Cell& ci : cells) {
    for (const Cell& cj : cells) {
      const int di = cj.i - ci.i;
      const int dj = cj.j - ci.j;
      if (std::abs(di) > kNear || std::abs(dj) > kNear) {
        const geometry::Vec2 d = cj.centroid - ci.centroid;
        const elliptic::cplx z(d.x(), d.y());
        sum += ci.m * cj.m * (std::log(std::abs(z)) + smooth_part(z));
        continue;
      }
      const double smooth = smooth_part(elliptic::cplx(di * h, dj * h)) + smooth_shift;
      for (int ua = 0; ua < B; ++ua) {
        for (int va = 0; va < B; ++va) {
          const double ma = ci.sub[static_cast<std::size_t>(ua) * B + va];
          if (ma == 0.0) continue;
          for (int ub = 0; ub < B; ++ub) {
            for (int vb = 0; vb < B; ++vb) {
              const double mb = cj.sub[static_cast<std::size_t>(ub) * B + vb];
              if (mb == 0.0) continue;
              const int p = std::abs(di * B + ub - ua);
              const int q = std::abs(dj * B + vb - va);
              sum += ma * mb * (sub_log[static_cast<std::size_t>(p) * span + q] + smooth);
            }
          }
        }
      }
    }
  }
  return -sum / (2.0 * kPi);
}

}  // namespace msrelax::potential
