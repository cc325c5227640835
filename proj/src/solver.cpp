#include "critlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "critlab/error.hpp"

namespace critlab {

namespace {

using BasisGradients = Eigen::Matrix<double, 2, 3>;

BasisGradients basis_gradients(const MeshedDomain& mesh, int t) {
  const auto& tri = mesh.triangles()[t];
  const Point& a = mesh.vertices()[tri[0]];
  const Point& b = mesh.vertices()[tri[1]];
  const Point& c = mesh.vertices()[tri[2]];
  const double two_area = 2.0 * mesh.signed_area(t);
  BasisGradients g;
  g.col(0) << (b.y() - c.y()) / two_area, (c.x() - b.x()) / two_area;
  g.col(1) << (c.y() - a.y()) / two_area, (a.x() - c.x()) / two_area;
  g.col(2) << (a.y() - b.y()) / two_area, (b.x() - a.x()) / two_area;
  return g;
}

Eigen::Vector2d element_gradient(const MeshedDomain& mesh, const BasisGradients& g, int t,
                                 std::span<const double> u) {
  const auto& tri = mesh.triangles()[t];
  return g.col(0) * u[tri[0]] + g.col(1) * u[tri[1]] + g.col(2) * u[tri[2]];
}

// Eigenvalues of a symmetric 2x2 matrix, ascending.
std::pair<double, double> sym_eigenvalues(const Eigen::Matrix2d& a) {
  const double m = 0.5 * (a(0, 0) + a(1, 1));
  const double d = std::hypot(0.5 * (a(0, 0) - a(1, 1)), a(0, 1));
  return {m - d, m + d};
}

std::string describe(const Eigen::Vector2d& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p.x() << ", " << p.y() << ")";
  return os.str();
}

std::pair<double, double> checked_eigenvalues(const Eigen::Matrix2d& a, const Eigen::Vector2d& p) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (!a.allFinite() || std::abs(a(0, 1) - a(1, 0)) > 1e-12 * std::max(scale, 1e-300)) {
    throw Error(ErrorCode::EllipticityFailure, "a_ij not symmetric at gradient " + describe(p));
  }
  const auto ev = sym_eigenvalues(a);
  if (!(ev.first > 0.0)) {
    throw Error(ErrorCode::EllipticityFailure, "a_ij not positive definite at gradient " + describe(p));
  }
  return ev;
}

class Assembler {
 public:
  Assembler(const MeshedDomain& mesh, const CoefficientField& coeff, const DirichletData& data)
      : mesh_(mesh), coeff_(coeff), data_(data) {
    const int nt = mesh.num_triangles();
    grads_.reserve(nt);
    area_.reserve(nt);
    for (int t = 0; t < nt; ++t) {
      grads_.push_back(basis_gradients(mesh, t));
      area_.push_back(mesh.signed_area(t));
    }
    dof_.assign(mesh.num_vertices(), -1);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      if (!mesh.is_boundary(v)) dof_[v] = num_dofs_++;
    }
  }

  int num_dofs() const { return num_dofs_; }
  int dof(int v) const { return dof_[v]; }

  Eigen::VectorXd residual(std::span<const double> u) const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(mesh_.num_vertices());
    for (int t = 0; t < mesh_.num_triangles(); ++t) {
      const Eigen::Vector2d p = element_gradient(mesh_, grads_[t], t, u);
      const FluxEvaluation f = coeff_.evaluate(p);
      const auto& tri = mesh_.triangles()[t];
      for (int i = 0; i < 3; ++i) {
        if (dof_[tri[i]] >= 0) r[tri[i]] += area_[t] * grads_[t].col(i).dot(f.flux);
      }
    }
    for (int v = 0; v < mesh_.num_vertices(); ++v) {
      if (dof_[v] < 0) r[v] = u[v] - boundary_value(mesh_, data_, v);
    }
    return r;
  }

  Eigen::SparseMatrix<double> jacobian(std::span<const double> u) const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * static_cast<std::size_t>(mesh_.num_triangles()));
    for (int t = 0; t < mesh_.num_triangles(); ++t) {
      const Eigen::Vector2d p = element_gradient(mesh_, grads_[t], t, u);
      const Eigen::Matrix2d a = coeff_.evaluate(p).jacobian;
      checked_eigenvalues(a, p);
      const Eigen::Matrix3d ke = area_[t] * grads_[t].transpose() * a * grads_[t];
      const auto& tri = mesh_.triangles()[t];
      for (int i = 0; i < 3; ++i) {
        const int di = dof_[tri[i]];
        if (di < 0) continue;
        for (int j = 0; j < 3; ++j) {
          const int dj = dof_[tri[j]];
          if (dj >= 0) trip.emplace_back(di, dj, ke(i, j));
        }
      }
    }
    Eigen::SparseMatrix<double> j(num_dofs_, num_dofs_);
    j.setFromTriplets(trip.begin(), trip.end());
    return j;
  }

 private:
  const MeshedDomain& mesh_;
  const CoefficientField& coeff_;
  const DirichletData& data_;
  std::vector<BasisGradients> grads_;
  std::vector<double> area_;
  std::vector<int> dof_;
  int num_dofs_ = 0;
};

double interior_norm(const Eigen::VectorXd& r) { return r.norm(); }

void validate_topology(const MeshedDomain& mesh, const DirichletData& data) {
  const bool annulus = mesh.kind() == DomainKind::Annulus;
  if (annulus != data.inner_constant.has_value()) {
    throw Error(ErrorCode::InvalidArgument, annulus ? "annular domain requires an inner constant"
                                                    : "inner constant given for a simply connected domain");
  }
}

// Newton iteration with step halving. Updates u in place.
NewtonReport newton(const MeshedDomain& mesh, const CoefficientField& coeff, const DirichletData& data,
                    std::vector<double>& u, const NewtonOptions& opts) {
  Assembler asmb(mesh, coeff, data);
  NewtonReport report;
  Eigen::VectorXd r = asmb.residual(u);
  double rnorm = interior_norm(r);
  report.history.push_back(rnorm);
  const double target = opts.tol * std::max(1.0, rnorm);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  while (rnorm > target) {
    if (report.iterations >= opts.max_iter) {
      throw ConvergenceError("Newton did not converge in " + std::to_string(opts.max_iter) + " iterations",
                             report.history);
    }
    const Eigen::SparseMatrix<double> jac = asmb.jacobian(u);
    Eigen::VectorXd rhs(asmb.num_dofs());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      if (asmb.dof(v) >= 0) rhs[asmb.dof(v)] = -r[v];
    }
    ldlt.compute(jac);
    if (ldlt.info() != Eigen::Success) {
      throw ConvergenceError("sparse factorization of the Jacobian failed", report.history);
    }
    const Eigen::VectorXd delta = ldlt.solve(rhs);

    double step = 1.0;
    std::vector<double> trial(u.size());
    for (;;) {
      trial = u;
      for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (asmb.dof(v) >= 0) trial[v] += step * delta[asmb.dof(v)];
      }
      const Eigen::VectorXd rt = asmb.residual(trial);
      const double tn = interior_norm(rt);
      if (tn < rnorm) {
        u.swap(trial);
        r = rt;
        rnorm = tn;
        break;
      }
      step *= 0.5;
      if (step < opts.min_step) {
        throw ConvergenceError("line search stalled below the minimum step", report.history);
      }
    }
    ++report.iterations;
    report.history.push_back(rnorm);
  }
  report.residual = rnorm;
  return report;
}

}  // namespace

std::string_view to_string(CoefficientFamily family) {
  switch (family) {
    case CoefficientFamily::Laplace: return "LAPLACE";
    case CoefficientFamily::MinimalSurface: return "MINIMAL_SURFACE";
    case CoefficientFamily::CustomFlux: return "CUSTOM_FLUX";
  }
  return "UNKNOWN";
}

CoefficientField CoefficientField::laplace() {
  return CoefficientField(CoefficientFamily::Laplace, "laplace", [](const Eigen::Vector2d& p) {
    return FluxEvaluation{p, Eigen::Matrix2d::Identity()};
  });
}

CoefficientField CoefficientField::minimal_surface() {
  return CoefficientField(CoefficientFamily::MinimalSurface, "minimal_surface", [](const Eigen::Vector2d& p) {
    const double w = 1.0 + p.squaredNorm();
    const double s = 1.0 / std::sqrt(w);
    return FluxEvaluation{s * p, s * (Eigen::Matrix2d::Identity() - p * p.transpose() / w)};
  });
}

CoefficientField CoefficientField::custom(std::string name, FluxFunction flux) {
  if (!flux) throw Error(ErrorCode::InvalidArgument, "custom coefficient field needs a flux function");
  return CoefficientField(CoefficientFamily::CustomFlux, std::move(name), std::move(flux));
}

FluxEvaluation CoefficientField::evaluate(const Eigen::Vector2d& p) const { return flux_(p); }

EllipticityReport ellipticity_check(const CoefficientField& coeff, std::span<const Eigen::Vector2d> samples) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "ellipticity check needs at least one sample");
  EllipticityReport rep{std::numeric_limits<double>::infinity(), 0.0, 1.0};
  for (const auto& p : samples) {
    const auto ev = checked_eigenvalues(coeff.coefficients(p), p);
    rep.lambda_min = std::min(rep.lambda_min, ev.first);
    rep.lambda_max = std::max(rep.lambda_max, ev.second);
  }
  rep.ratio = rep.lambda_max / rep.lambda_min;
  return rep;
}

double boundary_value(const MeshedDomain& mesh, const DirichletData& data, int v) {
  const int loop = mesh.loop_of(v);
  if (loop < 0) throw Error(ErrorCode::InvalidArgument, "vertex is not on the boundary");
  if (mesh.boundary_loops()[loop].tag == LoopTag::Inner) return data.inner_constant.value_or(0.0);
  return eval_profile(data.outer_profile, mesh.boundary_param(v));
}

DiscreteSolution::DiscreteSolution(std::shared_ptr<const MeshedDomain> mesh, std::vector<double> nodal_values,
                                   NewtonReport report)
    : mesh_(std::move(mesh)), values_(std::move(nodal_values)), report_(std::move(report)) {
  if (!mesh_) throw Error(ErrorCode::InvalidArgument, "solution needs a mesh");
  if (static_cast<int>(values_.size()) != mesh_->num_vertices()) {
    throw Error(ErrorCode::InvalidArgument, "nodal value count does not match the mesh");
  }
  gradients_.reserve(mesh_->num_triangles());
  for (int t = 0; t < mesh_->num_triangles(); ++t) {
    gradients_.push_back(element_gradient(*mesh_, basis_gradients(*mesh_, t), t, values_));
  }
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  min_ = *lo;
  max_ = *hi;
}

DiscreteSolution DiscreteSolution::interpolate(std::shared_ptr<const MeshedDomain> mesh,
                                               const std::function<double(const Point&)>& f) {
  std::vector<double> values;
  values.reserve(mesh->num_vertices());
  for (const auto& p : mesh->vertices()) values.push_back(f(p));
  return DiscreteSolution(std::move(mesh), std::move(values));
}

DiscreteSolution DiscreteSolution::with_problem(CoefficientField coeff, DirichletData data) const {
  DiscreteSolution out = *this;
  out.coeff_ = std::move(coeff);
  out.data_ = std::move(data);
  return out;
}

std::optional<double> DiscreteSolution::value_at(const Point& p) const {
  const int t = mesh_->locate(p);
  if (t < 0) return std::nullopt;
  const int v0 = mesh_->triangles()[t][0];
  return values_[v0] + gradients_[t].dot(p - mesh_->vertices()[v0]);
}

DiscreteSolution solve(std::shared_ptr<const MeshedDomain> mesh, const CoefficientField& coeff,
                       const DirichletData& data, const NewtonOptions& opts) {
  validate_topology(*mesh, data);
  std::vector<double> u(mesh->num_vertices(), 0.0);
  double bmin = std::numeric_limits<double>::infinity();
  double bmax = -bmin;
  for (int v = 0; v < mesh->num_vertices(); ++v) {
    if (!mesh->is_boundary(v)) continue;
    u[v] = boundary_value(*mesh, data, v);
    bmin = std::min(bmin, u[v]);
    bmax = std::max(bmax, u[v]);
  }

  NewtonReport report;
  if (coeff.family() != CoefficientFamily::Laplace) {
    // Harmonic lift as the starting iterate for the nonlinear families.
    newton(*mesh, CoefficientField::laplace(), data, u, opts);
  }
  report = newton(*mesh, coeff, data, u, opts);

  const double slack = 1e-8 * std::max(bmax - bmin, std::numeric_limits<double>::min());
  for (int v = 0; v < mesh->num_vertices(); ++v) {
    if (u[v] < bmin - slack || u[v] > bmax + slack) {
      throw Error(ErrorCode::IntegrityFailure, "discrete maximum principle violated at vertex " + std::to_string(v));
    }
  }
  return DiscreteSolution(std::move(mesh), std::move(u), std::move(report)).with_problem(coeff, data);
}

double residual_norm(const MeshedDomain& mesh, const CoefficientField& coeff, const DirichletData& data,
                     std::span<const double> nodal_values) {
  validate_topology(mesh, data);
  if (static_cast<int>(nodal_values.size()) != mesh.num_vertices()) {
    throw Error(ErrorCode::InvalidArgument, "nodal value count does not match the mesh");
  }
  return Assembler(mesh, coeff, data).residual(nodal_values).norm();
}

double residual_norm(const DiscreteSolution& sol) {
  if (!sol.coefficient() || !sol.data()) {
    throw Error(ErrorCode::InvalidArgument, "solution carries no boundary value problem");
  }
  return residual_norm(sol.domain(), *sol.coefficient(), *sol.data(), sol.nodal_values());
}

}  // namespace critlab
