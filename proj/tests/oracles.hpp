#pragma once

// Closed forms used as ground truth by the tests. Written out by hand so the
// checks do not go through the library's own series or root finder.

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <vector>

#include "critlab/mesh.hpp"
#include "critlab/solver.hpp"

namespace oracle {

using critlab::Point;

inline constexpr double kPi = std::numbers::pi;

// Re z^n = r^n cos n theta.
inline double re_power(const Point& p, int n) {
  return std::real(std::pow(std::complex<double>(p.x(), p.y()), n));
}

// Harmonic on a <= r <= b with u = H on r = a and u = c0 + c2 cos 2theta on r = b.
struct AnnulusCos2 {
  double a, b, H, c0, c2;

  double B0() const { return (c0 - H) / std::log(b / a); }
  double A2() const { return c2 * b * b / (std::pow(b, 4) - std::pow(a, 4)); }
  double B2() const { return -A2() * std::pow(a, 4); }

  double operator()(const Point& p) const {
    const double r = p.norm();
    const double th = std::atan2(p.y(), p.x());
    return H + B0() * std::log(r / a) + (A2() * r * r + B2() / (r * r)) * std::cos(2.0 * th);
  }

  // Critical points solve z^4 + c z^2 + a^4 = 0 with c = B0 / (2 A2) (H = 0
  // is not required, the log term is the only radial part). Quadratic in z^2.
  std::vector<double> root_moduli() const {
    const double c = B0() / (2.0 * A2());
    const double disc = c * c - 4.0 * std::pow(a, 4);
    std::vector<double> out;
    if (disc >= 0.0) {
      for (double w : {(-c + std::sqrt(disc)) / 2.0, (-c - std::sqrt(disc)) / 2.0}) out.push_back(std::sqrt(std::abs(w)));
    } else {
      out.push_back(std::pow(a, 1.0));  // complex pair, |w| = a^2
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

// Extremum counts of a trig polynomial by brute force: sample psi on a fine
// grid and count strict discrete local maxima and minima.
struct BruteExtrema {
  int n_max = 0;
  int n_min = 0;
  double top = 0.0;
  double bottom = 0.0;
  std::vector<double> max_values;
  std::vector<double> min_values;
};

template <class F>
BruteExtrema brute_extrema(F psi, int samples = 200000) {
  std::vector<double> v(samples);
  for (int i = 0; i < samples; ++i) v[i] = psi(2.0 * kPi * i / samples);
  BruteExtrema e;
  e.top = *std::max_element(v.begin(), v.end());
  e.bottom = *std::min_element(v.begin(), v.end());
  for (int i = 0; i < samples; ++i) {
    const double l = v[(i + samples - 1) % samples];
    const double r = v[(i + 1) % samples];
    if (v[i] > l && v[i] >= r) {
      ++e.n_max;
      e.max_values.push_back(v[i]);
    }
    if (v[i] < l && v[i] <= r) {
      ++e.n_min;
      e.min_values.push_back(v[i]);
    }
  }
  return e;
}

inline double max_vertex_error(const critlab::DiscreteSolution& sol, const auto& exact) {
  double err = 0.0;
  const auto& verts = sol.domain().vertices();
  for (int v = 0; v < static_cast<int>(verts.size()); ++v) err = std::max(err, std::abs(sol.value(v) - exact(verts[v])));
  return err;
}

}  // namespace oracle
