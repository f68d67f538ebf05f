#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "ssr/distribution.hpp"
#include "ssr/model.hpp"
#include "ssr/normal.hpp"
#include "ssr/quadrature.hpp"
#include "ssr/reliability.hpp"

namespace ssr {

/// One-sample log-likelihood
///   2n log l - n log(1+l) - l * sum(x) + sum(log(1 + l x^2 / 2)).
inline double log_likelihood(Rate lambda, const Sample& data) {
  const double l = lambda.value();
  const double n = static_cast<double>(data.size());
  double value = 2.0 * n * std::log(l) - n * std::log1p(l) - l * data.sum();
  for (double x : data.values()) value += std::log1p(0.5 * l * x * x);
  return value;
}

/// d/dl of log_likelihood:
///   2n/l - n/(1+l) - sum(x) + sum(x^2 / (2 + l x^2)).
inline double score(Rate lambda, const Sample& data) {
  const double l = lambda.value();
  const double n = static_cast<double>(data.size());
  double value = 2.0 * n / l - n / (1.0 + l) - data.sum();
  for (double x : data.values()) value += x * x / (2.0 + l * x * x);
  return value;
}

/// -d^2/dl^2 of log_likelihood:
///   2n/l^2 - n/(1+l)^2 + sum(x^4 / (2 + l x^2)^2).
/// Strictly positive for every lambda and sample (2/l^2 > 1/(1+l)^2 and each
/// summand is positive), so the log-likelihood is strictly concave.
inline double neg_hessian(Rate lambda, const Sample& data) {
  const double l = lambda.value();
  const double n = static_cast<double>(data.size());
  double value = 2.0 * n / (l * l) - n / ((1.0 + l) * (1.0 + l));
  for (double x : data.values()) {
    const double denom = 2.0 + l * x * x;
    value += x * x * x * x / (denom * denom);
  }
  return value;
}

/// Method-of-moments starting value: the positive root of
///   mean * l^2 + (mean - 1) * l - 3 = 0,
/// which inverts mean = (l + 3) / (l (1 + l)).
inline double moment_initializer(const Sample& data) {
  const double xb = data.mean();
  return (-(xb - 1.0) + std::sqrt((xb - 1.0) * (xb - 1.0) + 12.0 * xb)) /
         (2.0 * xb);
}

/// Raised when the Newton iteration fails to converge; carries the last
/// iterate and diagnostics.
class fit_error : public std::runtime_error {
 public:
  fit_error(const std::string& what, double last_lambda, double last_score,
            int iterations)
      : std::runtime_error(what),
        last_lambda_(last_lambda),
        last_score_(last_score),
        iterations_(iterations) {}

  double last_lambda() const noexcept { return last_lambda_; }
  double last_score() const noexcept { return last_score_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_lambda_;
  double last_score_;
  int iterations_;
};

struct FitOptions {
  int max_iterations = 100;
  double score_tolerance = 1e-10;  // scaled by max(1, n)
  double step_tolerance = 1e-12;   // relative to the current lambda
  std::optional<double> initializer;  // default: method of moments
};

struct FitResult {
  Rate lambda_hat;
  double loglik;
  double score_at_mle;
  double observed_info;  // -d^2 logL / dl^2 at lambda_hat
  double std_err;        // 1 / sqrt(observed_info)
  int iterations;
  bool converged;
  std::size_t n;
};

/// Maximum-likelihood fit by damped Newton ascent. Steps that would leave
/// (0, inf) or decrease the log-likelihood are halved (at most 30 times);
/// convergence when |score| <= score_tolerance * max(1, n) or the step falls
/// below step_tolerance * lambda.
inline FitResult fit_mle(const Sample& data, const FitOptions& options = {}) {
  if (data.size() < 2) {
    throw std::invalid_argument("fit_mle: need at least 2 observations, got " +
                                std::to_string(data.size()));
  }
  const double n = static_cast<double>(data.size());
  const double score_tol = options.score_tolerance * std::max(1.0, n);

  double lambda = options.initializer.value_or(moment_initializer(data));
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("fit_mle: initializer must be positive");
  }
  double loglik = log_likelihood(Rate(lambda), data);

  int iteration = 0;
  bool converged = false;
  double current_score = score(Rate(lambda), data);
  while (iteration < options.max_iterations) {
    if (std::abs(current_score) <= score_tol) {
      converged = true;
      break;
    }
    ++iteration;
    const double step = current_score / neg_hessian(Rate(lambda), data);

    double factor = 1.0;
    double candidate = lambda + step;
    double candidate_loglik = -std::numeric_limits<double>::infinity();
    for (int halving = 0; halving <= 30; ++halving) {
      candidate = lambda + factor * step;
      if (candidate > 0.0) {
        candidate_loglik = log_likelihood(Rate(candidate), data);
        if (candidate_loglik >= loglik) break;
      }
      factor *= 0.5;
    }
    const bool tiny_step =
        std::abs(candidate - lambda) <= options.step_tolerance * lambda;
    lambda = candidate;
    loglik = candidate_loglik;
    current_score = score(Rate(lambda), data);
    if (tiny_step) {
      converged = true;
      break;
    }
  }
  if (!converged && std::abs(current_score) <= score_tol) converged = true;

  if (!converged) {
    const std::string label =
        data.label().empty() ? std::string("sample") : data.label();
    throw fit_error("fit_mle(" + label + "): no convergence after " +
                        std::to_string(iteration) + " iterations (lambda=" +
                        std::to_string(lambda) + ", score=" +
                        std::to_string(current_score) + ")",
                    lambda, current_score, iteration);
  }

  const double info = neg_hessian(Rate(lambda), data);
  return FitResult{Rate(lambda),
                   loglik,
                   current_score,
                   info,
                   1.0 / std::sqrt(info),
                   iteration,
                   true,
                   data.size()};
}

/// Reliability estimate with delta-method asymptotic variance. Endpoints are
/// deliberately not clipped to [0, 1].
struct ReliabilityEstimate {
  double r_hat;
  double avar;
  double ci_low;
  double ci_high;
  double level;
};

/// Combines two independent fits: R_hat = R(l1_hat, l2_hat) by MLE
/// invariance, avar = d1^2 V(l1_hat) + d2^2 V(l2_hat) with V = 1/observed
/// information (the samples are independent, so the cross term vanishes),
/// and CI = R_hat +/- z * sqrt(avar).
inline ReliabilityEstimate estimate_from_fits(const FitResult& strength_fit,
                                              const FitResult& stress_fit,
                                              double level = 0.95) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::domain_error("estimate_from_fits: level must lie in (0, 1)");
  }
  const ParamPair params{strength_fit.lambda_hat, stress_fit.lambda_hat};
  const double r_hat = r_closed_form(params);
  const RGradient grad = r_gradient(params);
  const double avar = grad.d1 * grad.d1 / strength_fit.observed_info +
                      grad.d2 * grad.d2 / stress_fit.observed_info;
  const double z = normal_two_sided_z(level);
  const double half_width = z * std::sqrt(avar);
  return ReliabilityEstimate{r_hat, avar, r_hat - half_width,
                             r_hat + half_width, level};
}

/// Fits both samples independently and combines them. Fit failures propagate
/// as fit_error carrying the failing sample's label.
inline ReliabilityEstimate estimate_r(const Sample& strength,
                                      const Sample& stress,
                                      double level = 0.95) {
  const FitResult strength_fit = fit_mle(strength);
  const FitResult stress_fit = fit_mle(stress);
  return estimate_from_fits(strength_fit, stress_fit, level);
}

/// Fisher information for a sample of size n:
///   n * E[2/l^2 - 1/(1+l)^2 + X^4/(2 + l X^2)^2],
/// with the expectation over X computed by adaptive quadrature against the
/// density (absolute tolerance 1e-10). Provided as a cross-check on the
/// observed information used for variance estimates.
inline double expected_information(Rate lambda, int n) {
  if (n < 1) throw std::invalid_argument("expected_information: n must be >= 1");
  const double l = lambda.value();
  const EgdModel model(lambda);
  double upper = 40.0 / l;
  while (survival(model, upper) > 1e-14 * std::min(1.0, l * l)) upper *= 2.0;
  const double expectation = integrate_or_throw(
      [&](double x) {
        const double denom = 2.0 + l * x * x;
        return x * x * x * x / (denom * denom) * pdf(model, x);
      },
      0.0, upper, 1e-10, "expected_information");
  const double constant = 2.0 / (l * l) - 1.0 / ((1.0 + l) * (1.0 + l));
  return static_cast<double>(n) * (constant + expectation);
}

}  // namespace ssr
