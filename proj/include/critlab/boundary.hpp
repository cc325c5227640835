#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "critlab/mesh.hpp"

namespace critlab {

/// Trigonometric polynomial psi(theta) = c0 + sum_k (c_k cos k theta + s_k sin k theta).
/// sin_coeffs[0] is s_1.
struct BoundaryProfile {
  std::vector<double> cos_coeffs{0.0};
  std::vector<double> sin_coeffs;

  /// Highest harmonic index K.
  int degree() const;
  double cos_coeff(int k) const;
  double sin_coeff(int k) const;
  /// d^order psi / d theta^order.
  double derivative(double theta, int order) const;
  bool is_constant() const;
  BoundaryProfile shifted(double constant) const;
  BoundaryProfile rotated(double alpha) const;  // psi(theta - alpha)
};

double eval_profile(const BoundaryProfile& p, double theta);

struct Extremum {
  double theta = 0.0;
  double value = 0.0;
  bool global = false;
};

struct BoundaryExtremaSummary {
  std::vector<Extremum> local_maxima;
  std::vector<Extremum> local_minima;
  int n_local_max = 0;
  int n_local_min = 0;
  int n_global_max = 0;
  int n_global_min = 0;
  bool all_extrema_global = false;
  double z_min = 0.0;
  double z_max = 0.0;
  double tol_value = 0.0;
};

/// Locates every critical point of psi on the circle. tol_value defaults to
/// 1e-9 * (max - min). Throws DegenerateProfile for constant profiles and for
/// profiles with a degenerate critical point (psi' = psi'' = 0).
BoundaryExtremaSummary count_extrema(const BoundaryProfile& p, std::optional<double> tol_value = std::nullopt);

enum class ScenarioKind { SimplyConnected, AnnulusPsiGeH, AnnulusPsiLeH, AnnulusHBetween };

std::string_view to_string(ScenarioKind kind);

struct ScenarioClass {
  ScenarioKind kind = ScenarioKind::SimplyConnected;
  std::optional<double> H;
};

/// H must be present exactly for annular domains. Throws DegenerateClass when
/// H lies within summary.tol_value of min psi or max psi.
ScenarioClass classify_scenario(DomainKind domain, const BoundaryExtremaSummary& summary, std::optional<double> H);

}  // namespace critlab
