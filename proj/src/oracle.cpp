#include "critlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "critlab/error.hpp"

namespace critlab {

namespace {

using cd = std::complex<double>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cd horner(std::span<const cd> c, cd z) {
  cd acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

cd horner_derivative(std::span<const cd> c, cd z) {
  cd acc = 0.0;
  for (std::size_t j = c.size(); j-- > 1;) acc = acc * z + static_cast<double>(j) * c[j];
  return acc;
}

// Analytic coefficients of one mode: alpha z^k + beta z^-k.
std::pair<cd, cd> analytic_pair(const HarmonicMode& m) { return {cd(m.A, -m.C), cd(m.B, m.D)}; }

// Exponent -> coefficient of f'(z), stored with an offset so index 0 is the lowest exponent.
struct Laurent {
  int lowest = 0;
  std::vector<cd> coeffs;
};

Laurent derivative_laurent(const HarmonicRepresentation& rep) {
  int kmax = 0;
  for (const auto& m : rep.modes) kmax = std::max(kmax, m.k);
  Laurent out;
  out.lowest = -kmax - 1;
  out.coeffs.assign(2 * kmax + 1, 0.0);  // exponents -kmax-1 .. kmax-1
  auto at = [&](int e) -> cd& { return out.coeffs[e - out.lowest]; };
  if (rep.B0 != 0.0) at(-1) += rep.B0;
  for (const auto& m : rep.modes) {
    const auto [alpha, beta] = analytic_pair(m);
    at(m.k - 1) += static_cast<double>(m.k) * alpha;
    at(-m.k - 1) -= static_cast<double>(m.k) * beta;
  }
  return out;
}

double wrap_pi(double d) {
  while (d > std::numbers::pi) d -= kTwoPi;
  while (d <= -std::numbers::pi) d += kTwoPi;
  return d;
}

int winding_on_circle(const HarmonicRepresentation& rep, double r, int samples) {
  double scale = std::abs(rep.B0) / r;
  for (const auto& m : rep.modes) {
    scale += m.k * (std::hypot(m.A, m.C) * std::pow(r, m.k - 1) + std::hypot(m.B, m.D) * std::pow(r, -m.k - 1));
  }
  for (int attempt = 0; attempt < 6; ++attempt, samples *= 2) {
    double total = 0.0;
    bool coarse = false;
    double prev = 0.0;
    for (int i = 0; i <= samples; ++i) {
      const cd z = std::polar(r, kTwoPi * (i % samples) / samples);
      const cd w = eval_derivative(rep, z);
      if (std::abs(w) < 1e-14 * std::max(scale, 1.0)) {
        throw Error(ErrorCode::LoopThroughZero, "f' vanishes on the contour r=" + std::to_string(r));
      }
      const double ang = std::arg(w);
      if (i > 0) {
        const double d = wrap_pi(ang - prev);
        if (std::abs(d) > 0.5 * std::numbers::pi) coarse = true;
        total += d;
      }
      prev = ang;
    }
    if (!coarse) return static_cast<int>(std::lround(total / kTwoPi));
  }
  throw Error(ErrorCode::LoopThroughZero, "contour sampling could not resolve the winding at r=" + std::to_string(r));
}

}  // namespace

bool HarmonicRepresentation::is_constant() const {
  if (B0 != 0.0) return false;
  return std::all_of(modes.begin(), modes.end(),
                     [](const HarmonicMode& m) { return m.A == 0.0 && m.B == 0.0 && m.C == 0.0 && m.D == 0.0; });
}

const HarmonicMode* HarmonicRepresentation::mode(int k) const {
  for (const auto& m : modes) {
    if (m.k == k) return &m;
  }
  return nullptr;
}

HarmonicRepresentation disk_harmonic(double radius, const BoundaryProfile& p) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "disk radius must be positive");
  HarmonicRepresentation rep;
  rep.kind = DomainKind::Disk;
  rep.outer_radius = radius;
  rep.A0 = p.cos_coeff(0);
  for (int k = 1; k <= p.degree(); ++k) {
    const double rk = std::pow(radius, k);
    rep.modes.push_back({k, p.cos_coeff(k) / rk, 0.0, p.sin_coeff(k) / rk, 0.0});
  }
  return rep;
}

HarmonicRepresentation annulus_harmonic(double a, double b, double H, const BoundaryProfile& p) {
  if (!(a > 0.0) || !(a < b)) throw Error(ErrorCode::InvalidArgument, "annulus requires 0 < a < b");
  HarmonicRepresentation rep;
  rep.kind = DomainKind::Annulus;
  rep.inner_radius = a;
  rep.outer_radius = b;
  rep.B0 = (p.cos_coeff(0) - H) / std::log(b / a);
  rep.A0 = H - rep.B0 * std::log(a);
  for (int k = 1; k <= p.degree(); ++k) {
    const double a2k = std::pow(a, 2 * k);
    const double det = std::pow(b, k) - a2k / std::pow(b, k);
    const double A = p.cos_coeff(k) / det;
    const double C = p.sin_coeff(k) / det;
    rep.modes.push_back({k, A, -A * a2k, C, -C * a2k});
  }
  return rep;
}

HarmonicEvaluation eval_harmonic(const HarmonicRepresentation& rep, const Point& p) {
  const double r = p.norm();
  const double slack = 1e-12 * rep.outer_radius;
  if (r > rep.outer_radius + slack || (rep.kind == DomainKind::Annulus && r < rep.inner_radius - slack)) {
    throw Error(ErrorCode::PointOutsideDomain, "point lies outside the domain of the harmonic representation");
  }
  const cd z(p.x(), p.y());
  HarmonicEvaluation out;
  double value = rep.A0;
  if (rep.B0 != 0.0) value += rep.B0 * std::log(r);
  for (const auto& m : rep.modes) {
    const auto [alpha, beta] = analytic_pair(m);
    const cd zk = std::pow(z, m.k);
    value += (alpha * zk).real();
    if (beta != 0.0) value += (beta / zk).real();
  }
  out.value = value;
  const cd d = eval_derivative(rep, z);
  out.gradient = Eigen::Vector2d(d.real(), -d.imag());
  return out;
}

cd eval_derivative(const HarmonicRepresentation& rep, cd z) {
  cd acc = 0.0;
  if (rep.B0 != 0.0) acc += rep.B0 / z;
  for (const auto& m : rep.modes) {
    const auto [alpha, beta] = analytic_pair(m);
    if (alpha != 0.0) acc += static_cast<double>(m.k) * alpha * std::pow(z, m.k - 1);
    if (beta != 0.0) acc -= static_cast<double>(m.k) * beta * std::pow(z, -m.k - 1);
  }
  return acc;
}

DerivativePolynomial derivative_polynomial(const HarmonicRepresentation& rep) {
  const Laurent l = derivative_laurent(rep);
  DerivativePolynomial out;
  std::size_t first = 0;
  while (first < l.coeffs.size() && l.coeffs[first] == 0.0) ++first;
  if (first == l.coeffs.size()) return out;
  const int lowest_nonzero = l.lowest + static_cast<int>(first);
  out.shift = std::max(0, -lowest_nonzero);
  // Coefficient of z^j in z^shift f'(z) comes from exponent j - shift.
  const int top = l.lowest + static_cast<int>(l.coeffs.size()) - 1 + out.shift;
  out.coeffs.assign(top + 1, 0.0);
  for (std::size_t i = 0; i < l.coeffs.size(); ++i) {
    const int j = l.lowest + static_cast<int>(i) + out.shift;
    if (j >= 0) out.coeffs[j] = l.coeffs[i];
  }
  while (!out.coeffs.empty() && out.coeffs.back() == 0.0) out.coeffs.pop_back();
  return out;
}

std::vector<PolynomialRoot> polynomial_roots(std::span<const cd> coeffs, double cluster_tol) {
  double cmax = 0.0;
  for (const auto& c : coeffs) cmax = std::max(cmax, std::abs(c));
  if (cmax == 0.0) throw Error(ErrorCode::InvalidArgument, "zero polynomial has no isolated roots");
  const double negligible = 1e-14 * cmax;
  std::size_t lo = 0;
  std::size_t hi = coeffs.size();
  while (hi > 0 && std::abs(coeffs[hi - 1]) <= negligible) --hi;
  while (lo < hi && std::abs(coeffs[lo]) <= negligible) ++lo;

  std::vector<cd> raw(lo, cd(0.0));  // roots at the origin
  const std::span<const cd> core = coeffs.subspan(lo, hi - lo);
  const int n = static_cast<int>(core.size()) - 1;
  if (n >= 1) {
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -core[i] / core[n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "companion eigenvalue solve failed");
    for (int i = 0; i < n; ++i) {
      cd z = es.eigenvalues()[i];
      const cd dp = horner_derivative(coeffs, z);
      if (std::abs(dp) > 0.0) {
        const cd polished = z - horner(coeffs, z) / dp;
        if (std::abs(horner(coeffs, polished)) < std::abs(horner(coeffs, z))) z = polished;
      }
      raw.push_back(z);
    }
  }

  // Single-linkage clustering; the representative is the cluster mean.
  const std::size_t m = raw.size();
  std::vector<int> label(m, -1);
  int next = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (label[i] >= 0) continue;
    label[i] = next;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < m; ++b) {
        if (label[b] < 0 && std::abs(raw[a] - raw[b]) <= cluster_tol) {
          label[b] = next;
          stack.push_back(b);
        }
      }
    }
    ++next;
  }
  std::vector<PolynomialRoot> out(next, PolynomialRoot{cd(0.0), 0});
  for (std::size_t i = 0; i < m; ++i) {
    out[label[i]].z += raw[i];
    ++out[label[i]].multiplicity;
  }
  for (auto& r : out) r.z /= static_cast<double>(r.multiplicity);
  for (std::size_t i = 0; i < m; ++i) {
    if (raw[i] == cd(0.0)) out[label[i]].z = 0.0;  // keep the exact origin
  }
  std::sort(out.begin(), out.end(), [](const PolynomialRoot& a, const PolynomialRoot& b) {
    if (std::abs(a.z) != std::abs(b.z)) return std::abs(a.z) < std::abs(b.z);
    return std::arg(a.z) < std::arg(b.z);
  });
  return out;
}

std::string_view to_string(RootLocation loc) {
  switch (loc) {
    case RootLocation::Interior: return "INTERIOR";
    case RootLocation::BoundaryCritical: return "BOUNDARY_CRITICAL";
    case RootLocation::Exterior: return "EXTERIOR";
  }
  return "UNKNOWN";
}

std::vector<OracleCriticalPoint> oracle_roots(const HarmonicRepresentation& rep, const OracleOptions& opts) {
  if (rep.is_constant()) throw Error(ErrorCode::ConstantField, "constant harmonic representation");
  const DerivativePolynomial poly = derivative_polynomial(rep);
  std::vector<OracleCriticalPoint> out;
  for (const auto& root : polynomial_roots(poly.coeffs, opts.cluster_tol)) {
    const double r = std::abs(root.z);
    OracleCriticalPoint cp{Point(root.z.real(), root.z.imag()), root.multiplicity, RootLocation::Exterior};
    const bool near_outer = std::abs(r - rep.outer_radius) <= opts.boundary_band;
    const bool near_inner = rep.kind == DomainKind::Annulus && std::abs(r - rep.inner_radius) <= opts.boundary_band;
    if (near_outer || near_inner) {
      cp.where = RootLocation::BoundaryCritical;
    } else if (r < rep.outer_radius && (rep.kind == DomainKind::Disk || r > rep.inner_radius)) {
      cp.where = RootLocation::Interior;
    }
    out.push_back(cp);
  }
  return out;
}

std::vector<OracleCriticalPoint> oracle_critical_points(const HarmonicRepresentation& rep, const OracleOptions& opts) {
  std::vector<OracleCriticalPoint> all = oracle_roots(rep, opts);
  std::erase_if(all, [](const OracleCriticalPoint& cp) { return cp.where == RootLocation::Exterior; });
  return all;
}

int argument_principle_count(const HarmonicRepresentation& rep, int samples_per_loop) {
  if (rep.is_constant()) throw Error(ErrorCode::ConstantField, "constant harmonic representation");
  int kmax = 0;
  for (const auto& m : rep.modes) kmax = std::max(kmax, m.k);
  const int samples = samples_per_loop > 0 ? samples_per_loop : 1024 * (kmax + 2);
  int count = winding_on_circle(rep, rep.outer_radius, samples);
  if (rep.kind == DomainKind::Annulus) count -= winding_on_circle(rep, rep.inner_radius, samples);
  return count;
}

}  // namespace critlab
