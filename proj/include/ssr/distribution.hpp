#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "ssr/model.hpp"
#include "ssr/rng.hpp"

namespace ssr {

/// Density f(x) = lambda^2/(1+lambda) * (1 + lambda x^2 / 2) * e^(-lambda x)
/// for x >= 0; zero for x < 0. f(0) = lambda^2/(1+lambda) is finite.
inline double pdf(const EgdModel& model, double x) {
  if (x < 0.0) return 0.0;
  const double l = model.lambda();
  return l * l / (1.0 + l) * (1.0 + 0.5 * l * x * x) * std::exp(-l * x);
}

/// log f(x), evaluated without forming the product:
/// 2 log lambda - log(1+lambda) + log1p(lambda x^2 / 2) - lambda x.
inline double log_pdf(const EgdModel& model, double x) {
  if (x <= 0.0) {
    if (x == 0.0) {
      const double l = model.lambda();
      return 2.0 * std::log(l) - std::log1p(l);  // continuity at the boundary
    }
    return -std::numeric_limits<double>::infinity();
  }
  const double l = model.lambda();
  return 2.0 * std::log(l) - std::log1p(l) + std::log1p(0.5 * l * x * x) - l * x;
}

/// Survival S(x) = (lambda(x(lambda x + 2) + 2) + 2) e^(-lambda x) / (2(1+lambda)).
/// Computed directly so the upper tail keeps full relative precision.
inline double survival(const EgdModel& model, double x) {
  if (x <= 0.0) return 1.0;
  const double l = model.lambda();
  const double poly = l * (x * (l * x + 2.0) + 2.0) + 2.0;
  return poly * std::exp(-l * x) / (2.0 * (1.0 + l));
}

/// CDF F(x) = 1 - S(x); zero for x <= 0.
inline double cdf(const EgdModel& model, double x) {
  if (x <= 0.0) return 0.0;
  return 1.0 - survival(model, x);
}

/// Mixture mean (lambda + 3) / (lambda (1 + lambda)).
inline double mean(const EgdModel& model) {
  const double l = model.lambda();
  return (l + 3.0) / (l * (1.0 + l));
}

/// Inverse CDF. Brackets the root by doubling, bisects, then polishes with
/// Newton steps, stopping once |F(x) - p| <= 1e-12. The residual is formed as
/// (1-p) - S(x) so precision survives in both tails.
inline double quantile(const EgdModel& model, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("quantile: p must lie in (0, 1), got " +
                            std::to_string(p));
  }
  constexpr double tol = 1e-12;
  const double q = 1.0 - p;

  double lo = 0.0;
  double hi = mean(model);
  while (survival(model, hi) > q) {
    lo = hi;
    hi *= 2.0;
  }

  // Bisection until the bracket is tight, then Newton.
  for (int i = 0; i < 200 && (hi - lo) > 1e-9 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (survival(model, mid) > q ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 50; ++i) {
    const double residual = q - survival(model, x);  // = F(x) - p
    if (std::abs(residual) <= tol) return x;
    const double density = pdf(model, x);
    double next = x - residual / density;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    (survival(model, next) > q ? lo : hi) = next;
    x = next;
  }
  return x;
}

/// One draw tagged with the mixture component that produced it.
struct ComponentDraw {
  double value;
  bool exponential;  // true: Exponential(lambda) branch, false: Gamma(3, lambda)
};

/// Exact mixture sampling: with probability lambda/(1+lambda) draw
/// Exponential(lambda) by inverse CDF, otherwise Gamma(3, lambda) as the sum
/// of three independent Exponential(lambda) draws.
template <class Generator>
ComponentDraw draw_component(const EgdModel& model, Generator& gen) {
  const double l = model.lambda();
  if (uniform_unit(gen) < model.mixture_weight()) {
    return {exponential_draw(gen, l), true};
  }
  const double value =
      exponential_draw(gen, l) + exponential_draw(gen, l) + exponential_draw(gen, l);
  return {value, false};
}

/// One strictly positive draw. An exact zero (possible only when the
/// underlying uniform hits 1 in every factor) is resampled so that Sample
/// invariants hold.
template <class Generator>
double draw(const EgdModel& model, Generator& gen) {
  for (;;) {
    const double value = draw_component(model, gen).value;
    if (value > 0.0) return value;
  }
}

/// n independent draws as a Sample.
template <class Generator>
Sample draw_sample(const EgdModel& model, std::size_t n, Generator& gen,
                   std::string label = "") {
  if (n == 0) throw std::invalid_argument("draw_sample: n must be >= 1");
  std::vector<double> values;
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) values.push_back(draw(model, gen));
  return Sample(std::move(values), std::move(label));
}

}  // namespace ssr
