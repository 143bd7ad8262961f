#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

#include "msrelax/spectral.hpp"

namespace msrelax::geometry {

using Vec2 = Eigen::Vector2d;

enum class DomainKind { Plane, Torus };

struct Domain {
  DomainKind kind = DomainKind::Plane;
  double L = 0.0;  // half edge length of the torus cell [-L, L)^2; unused on the plane

  static Domain plane() { return {}; }
  static Domain torus(double half_edge) { return {DomainKind::Torus, half_edge}; }
  bool is_torus() const { return kind == DomainKind::Torus; }
};

// Interface state: Gamma = { pole + rho(phi) (cos phi, sin phi) }.
// rho is band-limited to N modes (N a power of two, N >= 16) and sampled on
// M = 2N nodes.
struct RadialCurve {
  double R = 1.0;
  spectral::RealSeries rho_hat;
  Vec2 pole = Vec2::Zero();
  Domain domain;

  int modes() const { return rho_hat.size(); }
  int node_count() const { return 2 * modes(); }

  // Throws InvalidArgument / NonPositiveRadius when a type invariant fails.
  void validate() const;

  // max(|c_{N-1}|, |c_{N-2}|) / max_{k>=1} |c_k|; small for resolved curves.
  double resolution_ratio() const;
};

RadialCurve circle(double R, int n_modes, Vec2 pole = Vec2::Zero(), Domain domain = {});

// Samples rho on 2N nodes and keeps the N-mode interpolant.
RadialCurve from_function(const std::function<double(double)>& rho, double R, int n_modes,
                          Vec2 pole = Vec2::Zero(), Domain domain = {});

// rho(phi) = a cos(phi) + sqrt(r^2 - a^2 sin^2(phi)): a disk of radius r whose
// centre sits at distance a along the direction `angle` from the pole.
double shifted_disk_radius(double r, double a, double angle, double phi);

// Radial function of the curve about another centre, evaluated at the given
// angles by Newton iteration on the ray/curve intersection. Throws RecenterFail
// if a ray misses or the iteration does not converge.
std::vector<double> radial_function_about(const RadialCurve& curve, const Vec2& center,
                                          const std::vector<double>& theta);

// Adjusts the zero mode so the enclosed area equals pi R^2 exactly.
RadialCurve project_area(RadialCurve curve);

enum class ResolutionPolicy { Abort, Warn, Ignore };

struct CacheOptions {
  double unresolved_tol = 1e-8;
  ResolutionPolicy policy = ResolutionPolicy::Abort;
};

struct GeometryCache {
  int M = 0;
  double R = 1.0;
  Vec2 pole = Vec2::Zero();
  Domain domain;
  spectral::RealSeries rho_hat;

  std::vector<double> phi;
  std::vector<double> rho;
  std::vector<double> rho_dev;  // rho - R, synthesized without cancellation
  std::vector<double> rho_phi;
  std::vector<double> rho_phiphi;
  std::vector<double> ell;
  std::vector<double> kappa;
  std::vector<double> omega;  // localized angle, tan(omega) = rho_phi / rho
  std::vector<Vec2> position;
  std::vector<Vec2> tangent;
  std::vector<Vec2> normal;  // outward for the enclosed region
  bool resolution_warning = false;

  double weight() const;  // trapezoid weight 2 pi / M
};

GeometryCache build_cache(const RadialCurve& curve, const CacheOptions& options = {});

double perimeter(const GeometryCache& cache);
double enclosed_area(const GeometryCache& cache);

// L(Gamma) - 2 pi R with R the cache's length scale, evaluated without the
// cancellation of subtracting two O(R) numbers.
double energy_gap(const GeometryCache& cache);

// L(Gamma) - 2 sqrt(pi |Omega|): deficit against the equal-area circle. Equals
// energy_gap when the area is pi R^2 but is insensitive to rounding of the zero mode.
double isoperimetric_deficit(const GeometryCache& cache);

double mean_curvature(const GeometryCache& cache);  // 2 pi / L(Gamma) for simple curves

Vec2 barycenter_bulk(const GeometryCache& cache);
Vec2 barycenter_boundary(const GeometryCache& cache);

// |(c - p) - L/(3|Omega|) (c_boundary - p)|, the residual of the proportionality
// between the bulk and the arc-length boundary barycenter.
double barycenter_equivalence_residual(const GeometryCache& cache);

// (1/(3|Omega|)) * int (x - p) ((x - p) . n) ds; equals c - p for every
// region star-shaped about p (divergence theorem).
Vec2 cone_weighted_barycenter_offset(const GeometryCache& cache);

struct AdmissibilityTolerances {
  double barycenter = 1e-6;  // relative to R
  double area = 1e-4;        // relative to pi R^2
};

struct AdmissibilityReport {
  double annulus = 0.0;     // sup |rho - R| / R
  double slope = 0.0;       // sup |rho_phi| / R
  double barycenter = 0.0;  // |c - pole| / R
  double area = 0.0;        // |(1/2) int rho^2 - pi R^2| / (pi R^2)
  bool annulus_ok = false;
  bool slope_ok = false;
  bool barycenter_ok = false;
  bool area_ok = false;

  bool passed() const { return annulus_ok && slope_ok && barycenter_ok && area_ok; }
};

AdmissibilityReport admissibility_report(const RadialCurve& curve, double delta = 0.05,
                                         const AdmissibilityTolerances& tol = {});

struct BonnesenReport {
  Vec2 center = Vec2::Zero();
  double R_out = 0.0;
  double R_in = 0.0;
  double lhs = 0.0;  // pi^2 (R_out - R_in)^2
  double rhs = 0.0;  // L^2 - (2 pi R_area)^2
  int iterations = 0;
};

// Approximates the minimal annulus containing the curve by a Nelder-Mead search
// over the annulus centre, started at the bulk barycenter. The optimized
// annulus only upper-bounds the minimal one, so lhs <= rhs is a monitor.
BonnesenReport bonnesen_monitor(const GeometryCache& cache);

}  // namespace msrelax::geometry
