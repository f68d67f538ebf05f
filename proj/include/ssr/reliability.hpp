#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "ssr/distribution.hpp"
#include "ssr/model.hpp"
#include "ssr/quadrature.hpp"

namespace ssr {

/// Rates of the strength variable X ~ EGD(3, lambda1) and the stress variable
/// Y ~ EGD(3, lambda2).
struct ParamPair {
  Rate lambda1;  // strength
  Rate lambda2;  // stress
};

/// Partial derivatives of R = P(X > Y) with respect to (lambda1, lambda2).
/// R is strictly decreasing in lambda1 and increasing in lambda2, so d1 < 0
/// and d2 > 0 everywhere.
struct RGradient {
  double d1;
  double d2;
};

namespace detail {

// R(l1, l2) = 1 - sum of monomial terms
//   c * l1^a * l2^b / ((1+l1) * (1+l2)^e * (l1+l2)^r),
// obtained by integrating f_X * F_Y term by term. The bracketed sum is
// P(X <= Y), which keeps every term positive and the expression stable.
struct ReliabilityTerm {
  double coeff;
  int a;  // power of lambda1
  int b;  // power of lambda2
  int e;  // power of (1 + lambda2); (1 + lambda1) always enters once
  int r;  // power of (lambda1 + lambda2)
};

inline constexpr std::array<ReliabilityTerm, 7> kComplementTerms = {{
    {1.0, 2, 2, 1, 3},
    {1.0, 3, 1, 1, 3},
    {1.0, 3, 0, 1, 3},
    {1.0, 2, 1, 1, 2},
    {1.0, 2, 0, 0, 1},
    {6.0, 3, 2, 1, 5},
    {3.0, 3, 1, 1, 4},
}};

inline double pow_i(double base, int exponent) {
  double result = 1.0;
  for (int i = 0; i < exponent; ++i) result *= base;
  return result;
}

inline double term_value(const ReliabilityTerm& t, double l1, double l2) {
  return t.coeff * pow_i(l1, t.a) * pow_i(l2, t.b) /
         ((1.0 + l1) * pow_i(1.0 + l2, t.e) * pow_i(l1 + l2, t.r));
}

}  // namespace detail

/// Closed-form stress-strength reliability R = P(X > Y).
inline double r_closed_form(const ParamPair& params) {
  const double l1 = params.lambda1.value();
  const double l2 = params.lambda2.value();
  double complement = 0.0;
  for (const auto& t : detail::kComplementTerms) {
    complement += detail::term_value(t, l1, l2);
  }
  return 1.0 - complement;
}

/// Independent check of r_closed_form: adaptive quadrature of
/// f_X(x) * F_Y(x) over (0, upper) with absolute tolerance 1e-12, where upper
/// is extended until the analytic strength tail drops below 1e-14 (the
/// truncated mass is bounded by S_X(upper) since F_Y <= 1).
inline double r_numeric_oracle(const ParamPair& params) {
  const EgdModel strength(params.lambda1);
  const EgdModel stress(params.lambda2);
  double upper = 40.0 / std::min(params.lambda1.value(), params.lambda2.value());
  while (survival(strength, upper) > 1e-14) upper *= 2.0;
  return integrate_or_throw(
      [&](double x) { return pdf(strength, x) * cdf(stress, x); }, 0.0, upper,
      1e-12, "r_numeric_oracle");
}

/// Exact gradient of r_closed_form via logarithmic differentiation of each
/// monomial term: d/dl (c * l1^a ...) = term * (a/l1 - 1/(1+l1) - r/(l1+l2)),
/// and symmetrically in lambda2. No transcription of a printed formula is
/// involved, so the only error source is floating-point rounding.
inline RGradient r_gradient(const ParamPair& params) {
  const double l1 = params.lambda1.value();
  const double l2 = params.lambda2.value();
  const double s = l1 + l2;
  double d1 = 0.0;
  double d2 = 0.0;
  for (const auto& t : detail::kComplementTerms) {
    const double value = detail::term_value(t, l1, l2);
    d1 -= value * (t.a / l1 - 1.0 / (1.0 + l1) - t.r / s);
    const double b_over_l2 = t.b == 0 ? 0.0 : t.b / l2;
    d2 -= value * (b_over_l2 - t.e / (1.0 + l2) - t.r / s);
  }
  return {d1, d2};
}

}  // namespace ssr
