/* Copyright 2026 The fogsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Test-only reference computations. Nothing here calls into the soft-response
// code it is used to check.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace fogsim::oracle {

inline constexpr double kC = 299'792'458.0;

/// Adaptive Gauss-Kronrod (7/15) with an absolute error target.
class AdaptiveGaussKronrod {
 public:
  explicit AdaptiveGaussKronrod(double abs_tol, int max_depth = 60) : abs_tol_(abs_tol), max_depth_(max_depth) {}

  template <typename F>
  double integrate(const F& f, double a, double b) const {
    return refine(f, a, b, abs_tol_, 0);
  }

 private:
  static constexpr std::array<double, 8> kNodes = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.0};
  static constexpr std::array<double, 8> kKronrod = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  // Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
  static constexpr std::array<double, 4> kGauss = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  template <typename F>
  double refine(const F& f, double a, double b, double tol, int depth) const {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(mid);
    double kronrod = kKronrod[7] * fc;
    double gauss = kGauss[3] * fc;
    for (int i = 0; i < 7; ++i) {
      const double dx = half * kNodes[i];
      const double pair = f(mid - dx) + f(mid + dx);
      kronrod += kKronrod[i] * pair;
      if (i % 2 == 1) gauss += kGauss[i / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    if (std::abs(kronrod - gauss) <= tol || depth >= max_depth_) return kronrod;
    return refine(f, a, mid, tol / 2, depth + 1) + refine(f, mid, b, tol / 2, depth + 1);
  }

  double abs_tol_;
  int max_depth_;
};

struct Optics {
  double tau_h = 20e-9;
  double r1 = 0.9;
  double r2 = 1.0;
};

inline double ramp(double d, const Optics& o) {
  if (d <= o.r1) return 0.0;
  if (d >= o.r2) return 1.0;
  return (d - o.r1) / (o.r2 - o.r1);
}

/// Soft-target integral at r, evaluated over slant range d = r - ct/2 instead
/// of time. The smooth magnitude exp(-2 alpha r) / r^2 is factored out so the
/// remaining integral is O(1 m) and an absolute tolerance is meaningful.
inline double soft_integral(double r, double alpha, const Optics& o = {}, double abs_tol = 1e-10) {
  const double c_tau = kC * o.tau_h;
  const double lo = std::max(o.r1, r - c_tau);
  if (!(r > lo)) return 0.0;
  const auto normalized = [&](double d) {
    const double s = std::sin(std::numbers::pi * (r - d) / c_tau);
    const double q = r / d;
    return s * s * std::exp(-2.0 * alpha * (d - r)) * q * q * ramp(d, o);
  };
  const double j = AdaptiveGaussKronrod(abs_tol).integrate(normalized, lo, r);
  return (2.0 / kC) * std::exp(-2.0 * alpha * r) / (r * r) * j;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace fogsim::oracle
