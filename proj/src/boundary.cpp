#include "critlab/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "critlab/error.hpp"

namespace critlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Sum over k of k^order * (|c_k| + |s_k|); bounds |psi^(order)|.
double derivative_scale(const BoundaryProfile& p, int order) {
  double s = 0.0;
  for (int k = 1; k <= p.degree(); ++k) s += std::pow(k, order) * (std::abs(p.cos_coeff(k)) + std::abs(p.sin_coeff(k)));
  return s;
}

double bisect_root(const BoundaryProfile& p, double lo, double hi) {
  double flo = p.derivative(lo, 1);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = p.derivative(mid, 1);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double wrap_angle(double theta) {
  theta = std::fmod(theta, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
  if (theta >= kTwoPi) theta = 0.0;
  return theta;
}

}  // namespace

int BoundaryProfile::degree() const {
  int k = static_cast<int>(std::max(cos_coeffs.empty() ? 0 : cos_coeffs.size() - 1, sin_coeffs.size()));
  while (k > 0 && cos_coeff(k) == 0.0 && sin_coeff(k) == 0.0) --k;
  return k;
}

double BoundaryProfile::cos_coeff(int k) const {
  return k >= 0 && k < static_cast<int>(cos_coeffs.size()) ? cos_coeffs[k] : 0.0;
}

double BoundaryProfile::sin_coeff(int k) const {
  return k >= 1 && k <= static_cast<int>(sin_coeffs.size()) ? sin_coeffs[k - 1] : 0.0;
}

double BoundaryProfile::derivative(double theta, int order) const {
  double sum = order == 0 ? cos_coeff(0) : 0.0;
  const int K = degree();
  for (int k = 1; k <= K; ++k) {
    const double c = cos_coeff(k);
    const double s = sin_coeff(k);
    if (c == 0.0 && s == 0.0) continue;
    // d^n/dθ^n cos(kθ) = k^n cos(kθ + nπ/2); likewise for sin.
    const double phase = k * theta + order * std::numbers::pi / 2.0;
    sum += std::pow(k, order) * (c * std::cos(phase) + s * std::sin(phase));
  }
  return sum;
}

bool BoundaryProfile::is_constant() const { return degree() == 0; }

BoundaryProfile BoundaryProfile::shifted(double constant) const {
  BoundaryProfile out = *this;
  if (out.cos_coeffs.empty()) out.cos_coeffs.push_back(0.0);
  out.cos_coeffs[0] += constant;
  return out;
}

BoundaryProfile BoundaryProfile::rotated(double alpha) const {
  const int K = degree();
  BoundaryProfile out;
  out.cos_coeffs.assign(K + 1, 0.0);
  out.sin_coeffs.assign(K, 0.0);
  out.cos_coeffs[0] = cos_coeff(0);
  for (int k = 1; k <= K; ++k) {
    const double c = cos_coeff(k);
    const double s = sin_coeff(k);
    const double ca = std::cos(k * alpha);
    const double sa = std::sin(k * alpha);
    // c cos(k(θ-α)) + s sin(k(θ-α)) expanded in cos kθ, sin kθ.
    out.cos_coeffs[k] = c * ca - s * sa;
    out.sin_coeffs[k - 1] = c * sa + s * ca;
  }
  return out;
}

double eval_profile(const BoundaryProfile& p, double theta) { return p.derivative(theta, 0); }

BoundaryExtremaSummary count_extrema(const BoundaryProfile& p, std::optional<double> tol_value) {
  if (p.is_constant()) throw Error(ErrorCode::DegenerateProfile, "constant boundary profile has no isolated extrema");
  const int K = p.degree();
  const int samples = 4096 * (K + 1);
  const double step = kTwoPi / samples;
  const double d1_scale = derivative_scale(p, 1);
  const double d2_scale = derivative_scale(p, 2);

  std::vector<double> d(samples);
  for (int i = 0; i < samples; ++i) d[i] = p.derivative(i * step, 1);

  // Touching zeros of psi' without a sign change are degenerate critical points.
  for (int i = 0; i < samples; ++i) {
    const double prev = d[(i + samples - 1) % samples];
    const double cur = d[i];
    const double next = d[(i + 1) % samples];
    const bool local_min_abs = std::abs(cur) <= std::abs(prev) && std::abs(cur) <= std::abs(next);
    if (!local_min_abs || (prev > 0.0) != (next > 0.0)) continue;
    double lo = (i - 1) * step;
    double hi = (i + 1) * step;
    for (int it = 0; it < 100; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (std::abs(p.derivative(m1, 1)) < std::abs(p.derivative(m2, 1))) hi = m2; else lo = m1;
    }
    if (std::abs(p.derivative(0.5 * (lo + hi), 1)) <= 1e-9 * d1_scale) {
      throw Error(ErrorCode::DegenerateProfile, "profile has a degenerate critical point near theta=" +
                                                    std::to_string(wrap_angle(0.5 * (lo + hi))));
    }
  }

  BoundaryExtremaSummary out;
  for (int i = 0; i < samples; ++i) {
    const int j = (i + 1) % samples;
    const bool pos_i = d[i] > 0.0;
    const bool pos_j = d[j] > 0.0;
    if (pos_i == pos_j) continue;
    const double lo = i * step;
    const double theta = wrap_angle(bisect_root(p, lo, lo + step));
    if (std::abs(p.derivative(theta, 2)) <= 1e-9 * d2_scale) {
      throw Error(ErrorCode::DegenerateProfile, "profile has a degenerate critical point at theta=" + std::to_string(theta));
    }
    Extremum e{theta, eval_profile(p, theta), false};
    (pos_i ? out.local_maxima : out.local_minima).push_back(e);
  }
  auto by_theta = [](const Extremum& a, const Extremum& b) { return a.theta < b.theta; };
  std::sort(out.local_maxima.begin(), out.local_maxima.end(), by_theta);
  std::sort(out.local_minima.begin(), out.local_minima.end(), by_theta);

  out.z_max = -std::numeric_limits<double>::infinity();
  out.z_min = std::numeric_limits<double>::infinity();
  for (const auto& e : out.local_maxima) out.z_max = std::max(out.z_max, e.value);
  for (const auto& e : out.local_minima) out.z_min = std::min(out.z_min, e.value);
  out.tol_value = tol_value.value_or(1e-9 * (out.z_max - out.z_min));
  for (auto& e : out.local_maxima) {
    e.global = e.value >= out.z_max - out.tol_value;
    out.n_global_max += e.global;
  }
  for (auto& e : out.local_minima) {
    e.global = e.value <= out.z_min + out.tol_value;
    out.n_global_min += e.global;
  }
  out.n_local_max = static_cast<int>(out.local_maxima.size());
  out.n_local_min = static_cast<int>(out.local_minima.size());
  out.all_extrema_global = out.n_global_max == out.n_local_max && out.n_global_min == out.n_local_min;
  return out;
}

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::SimplyConnected: return "SIMPLY_CONNECTED";
    case ScenarioKind::AnnulusPsiGeH: return "ANNULUS_PSI_GE_H";
    case ScenarioKind::AnnulusPsiLeH: return "ANNULUS_PSI_LE_H";
    case ScenarioKind::AnnulusHBetween: return "ANNULUS_H_BETWEEN";
  }
  return "UNKNOWN";
}

ScenarioClass classify_scenario(DomainKind domain, const BoundaryExtremaSummary& summary, std::optional<double> H) {
  if (domain == DomainKind::Disk) {
    if (H) throw Error(ErrorCode::InvalidArgument, "inner constant H given for a simply connected domain");
    return {ScenarioKind::SimplyConnected, std::nullopt};
  }
  if (!H) throw Error(ErrorCode::InvalidArgument, "annular domain requires the inner constant H");
  const double tol = summary.tol_value;
  if (std::abs(*H - summary.z_min) <= tol || std::abs(*H - summary.z_max) <= tol) {
    throw Error(ErrorCode::DegenerateClass, "H=" + std::to_string(*H) + " coincides with an extremal value of psi");
  }
  if (summary.z_min > *H) return {ScenarioKind::AnnulusPsiGeH, H};
  if (summary.z_max < *H) return {ScenarioKind::AnnulusPsiLeH, H};
  return {ScenarioKind::AnnulusHBetween, H};
}

}  // namespace critlab
