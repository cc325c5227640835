#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "critlab/boundary.hpp"
#include "critlab/mesh.hpp"

namespace critlab {

enum class CoefficientFamily { Laplace, MinimalSurface, CustomFlux };

std::string_view to_string(CoefficientFamily family);

struct FluxEvaluation {
  Eigen::Vector2d flux;
  Eigen::Matrix2d jacobian;  // a_ij(p) = dF_i/dp_j
};

/// Quasilinear coefficients a_ij(grad u) given through a flux F with
/// dF/dp = a. The non-divergence operator sum a_ij u_ij is then div F(grad u).
class CoefficientField {
 public:
  using FluxFunction = std::function<FluxEvaluation(const Eigen::Vector2d&)>;

  static CoefficientField laplace();
  static CoefficientField minimal_surface();
  static CoefficientField custom(std::string name, FluxFunction flux);

  CoefficientFamily family() const noexcept { return family_; }
  const std::string& name() const noexcept { return name_; }
  FluxEvaluation evaluate(const Eigen::Vector2d& p) const;
  Eigen::Matrix2d coefficients(const Eigen::Vector2d& p) const { return evaluate(p).jacobian; }

 private:
  CoefficientField(CoefficientFamily family, std::string name, FluxFunction flux)
      : family_(family), name_(std::move(name)), flux_(std::move(flux)) {}

  CoefficientFamily family_;
  std::string name_;
  FluxFunction flux_;
};

struct EllipticityReport {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double ratio = 1.0;  // lambda_max / lambda_min
};

/// Extreme eigenvalues of a_ij over the samples. Throws EllipticityFailure
/// naming the first sample where a_ij is non-symmetric or not positive definite.
EllipticityReport ellipticity_check(const CoefficientField& coeff, std::span<const Eigen::Vector2d> gradient_samples);

struct DirichletData {
  BoundaryProfile outer_profile;
  std::optional<double> inner_constant;
};

struct NewtonOptions {
  double tol = 1e-10;  // relative to max(1, initial residual)
  int max_iter = 50;
  double min_step = 1.0 / 1048576.0;  // 2^-20
};

struct NewtonReport {
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
};

/// Continuous piecewise-linear field on a mesh.
class DiscreteSolution {
 public:
  DiscreteSolution(std::shared_ptr<const MeshedDomain> mesh, std::vector<double> nodal_values,
                   NewtonReport report = {});

  /// Nodal interpolation of an arbitrary function.
  static DiscreteSolution interpolate(std::shared_ptr<const MeshedDomain> mesh,
                                      const std::function<double(const Point&)>& f);

  const MeshedDomain& domain() const noexcept { return *mesh_; }
  const std::shared_ptr<const MeshedDomain>& domain_ptr() const noexcept { return mesh_; }
  std::span<const double> nodal_values() const noexcept { return values_; }
  double value(int v) const { return values_[v]; }
  const Eigen::Vector2d& gradient(int t) const { return gradients_[t]; }
  const NewtonReport& newton_report() const noexcept { return report_; }

  /// Linear interpolation inside the containing triangle; nullopt outside the mesh.
  std::optional<double> value_at(const Point& p) const;
  double min_value() const noexcept { return min_; }
  double max_value() const noexcept { return max_; }

  /// Problem the field was computed for, if any.
  const std::optional<CoefficientField>& coefficient() const noexcept { return coeff_; }
  const std::optional<DirichletData>& data() const noexcept { return data_; }
  DiscreteSolution with_problem(CoefficientField coeff, DirichletData data) const;

 private:
  std::shared_ptr<const MeshedDomain> mesh_;
  std::vector<double> values_;
  std::vector<Eigen::Vector2d> gradients_;
  NewtonReport report_;
  double min_ = 0.0;
  double max_ = 0.0;
  std::optional<CoefficientField> coeff_;
  std::optional<DirichletData> data_;
};

/// Prescribed value at a boundary vertex.
double boundary_value(const MeshedDomain& mesh, const DirichletData& data, int v);

DiscreteSolution solve(std::shared_ptr<const MeshedDomain> mesh, const CoefficientField& coeff,
                       const DirichletData& data, const NewtonOptions& opts = {});

/// Euclidean norm of the assembled nonlinear residual; boundary rows are u - g.
double residual_norm(const DiscreteSolution& sol);
double residual_norm(const MeshedDomain& mesh, const CoefficientField& coeff, const DirichletData& data,
                     std::span<const double> nodal_values);

}  // namespace critlab
