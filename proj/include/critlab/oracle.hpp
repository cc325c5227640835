#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include "critlab/boundary.hpp"
#include "critlab/mesh.hpp"

namespace critlab {

/// One Fourier mode of a harmonic function on a disk or annulus:
/// (A r^k + B r^-k) cos k theta + (C r^k + D r^-k) sin k theta.
struct HarmonicMode {
  int k = 1;
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
};

/// u = A0 + B0 ln r + sum of modes. B0 and all B, D vanish on a disk.
struct HarmonicRepresentation {
  DomainKind kind = DomainKind::Disk;
  double inner_radius = 0.0;
  double outer_radius = 1.0;
  double A0 = 0.0;
  double B0 = 0.0;
  std::vector<HarmonicMode> modes;

  bool is_constant() const;
  const HarmonicMode* mode(int k) const;
};

HarmonicRepresentation disk_harmonic(double radius, const BoundaryProfile& p);
/// Harmonic function equal to H on r = a and to psi on r = b.
HarmonicRepresentation annulus_harmonic(double a, double b, double H, const BoundaryProfile& p);

struct HarmonicEvaluation {
  double value = 0.0;
  Eigen::Vector2d gradient;
};

/// Series evaluation on the closed domain; PointOutsideDomain otherwise.
HarmonicEvaluation eval_harmonic(const HarmonicRepresentation& rep, const Point& p);

/// Coefficients of z^s f'(z) in increasing degree, where f is the analytic
/// function with u = Re f and s clears the negative powers.
struct DerivativePolynomial {
  std::vector<std::complex<double>> coeffs;
  int shift = 0;
};
DerivativePolynomial derivative_polynomial(const HarmonicRepresentation& rep);

/// f'(z) itself (no shift).
std::complex<double> eval_derivative(const HarmonicRepresentation& rep, std::complex<double> z);

struct PolynomialRoot {
  std::complex<double> z;
  int multiplicity = 1;
};

/// Roots of sum coeffs[j] z^j via companion-matrix eigenvalues and one Newton
/// polish; roots closer than cluster_tol are merged into one with summed
/// multiplicity. Exact zero low-order coefficients yield a root at 0.
std::vector<PolynomialRoot> polynomial_roots(std::span<const std::complex<double>> coeffs, double cluster_tol = 1e-8);

enum class RootLocation { Interior, BoundaryCritical, Exterior };
std::string_view to_string(RootLocation loc);

struct OracleCriticalPoint {
  Point location;
  int multiplicity = 1;
  RootLocation where = RootLocation::Interior;
};

struct OracleOptions {
  double cluster_tol = 1e-8;
  double boundary_band = 1e-8;
};

/// Every root of z^s f'(z), classified against the closed domain.
std::vector<OracleCriticalPoint> oracle_roots(const HarmonicRepresentation& rep, const OracleOptions& opts = {});

/// Interior and boundary-critical roots only. Throws ConstantField for a constant rep.
std::vector<OracleCriticalPoint> oracle_critical_points(const HarmonicRepresentation& rep,
                                                        const OracleOptions& opts = {});

/// Zeros of f' inside the domain counted by contour sampling: winding of f'
/// along the outer circle minus along the inner circle, both counterclockwise.
int argument_principle_count(const HarmonicRepresentation& rep, int samples_per_loop = 0);

}  // namespace critlab
