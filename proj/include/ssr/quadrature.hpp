#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ssr {

class quadrature_error : public std::runtime_error {
 public:
  explicit quadrature_error(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t panels = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
std::pair<double, double> gauss_kronrod_15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double f_center = f(center);
  double kronrod = kKronrodWeights[7] * f_center;
  double gauss = kGaussWeights[3] * f_center;
  for (int i = 0; i < 7; ++i) {
    const double offset = half * kKronrodNodes[i];
    const double pair_sum = f(center - offset) + f(center + offset);
    kronrod += kKronrodWeights[i] * pair_sum;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair_sum;
  }
  kronrod *= half;
  gauss *= half;
  return {kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b] to an
/// absolute tolerance. The |K15 - G7| difference is used as a (conservative)
/// panel error bound; panels are bisected until each meets its share of the
/// tolerance. Deterministic for a given integrand and interval.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                    std::size_t max_panels = 4096) {
  struct Segment {
    double a, b, tol;
  };
  std::vector<Segment> pending{{a, b, abs_tol}};
  QuadratureResult result;
  while (!pending.empty()) {
    const Segment seg = pending.back();
    pending.pop_back();
    const auto [value, err] = detail::gauss_kronrod_15(f, seg.a, seg.b);
    ++result.panels;
    if (result.panels > max_panels) return result;  // converged stays false

    const double width = seg.b - seg.a;
    const bool indivisible =
        width <= 16.0 * std::numeric_limits<double>::epsilon() *
                     std::max({std::abs(seg.a), std::abs(seg.b), 1.0});
    if (err <= seg.tol || indivisible) {
      result.value += value;
      result.error_estimate += err;
    } else {
      const double mid = seg.a + 0.5 * width;
      pending.push_back({mid, seg.b, 0.5 * seg.tol});
      pending.push_back({seg.a, mid, 0.5 * seg.tol});
    }
  }
  result.converged = result.error_estimate <= abs_tol;
  return result;
}

/// As integrate_adaptive, but non-convergence is reported as an exception
/// rather than a flag.
template <class F>
double integrate_or_throw(F&& f, double a, double b, double abs_tol,
                          const std::string& context,
                          std::size_t max_panels = 4096) {
  const QuadratureResult res =
      integrate_adaptive(std::forward<F>(f), a, b, abs_tol, max_panels);
  if (!res.converged) {
    throw quadrature_error(context + ": quadrature did not reach tolerance " +
                           std::to_string(abs_tol) + " (error estimate " +
                           std::to_string(res.error_estimate) + ", " +
                           std::to_string(res.panels) + " panels)");
  }
  return res.value;
}

}  // namespace ssr
