#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ssr/distribution.hpp"
#include "ssr/model.hpp"

namespace ssr {

struct TestResult {
  double statistic;
  double p_value;
};

struct GofResult {
  double ks_stat;
  double ks_p;
  double cvm_stat;
  double cvm_p;
  std::size_t n;
};

/// Sorted probability-integral transform F(x_(1)) <= ... <= F(x_(n)).
/// Both test statistics depend on the data only through these values, which
/// is what makes them invariant under monotone rescaling of data and model.
inline std::vector<double> probability_integral_transform(const Sample& data,
                                                          const EgdModel& model) {
  std::vector<double> pit;
  pit.reserve(data.size());
  for (double x : data.values()) pit.push_back(cdf(model, x));
  std::sort(pit.begin(), pit.end());
  return pit;
}

/// D_n = max_i max(i/n - u_(i), u_(i) - (i-1)/n).
inline double ks_statistic(std::span<const double> pit_sorted) {
  const double n = static_cast<double>(pit_sorted.size());
  double stat = 0.0;
  for (std::size_t i = 0; i < pit_sorted.size(); ++i) {
    const double upper = (static_cast<double>(i) + 1.0) / n - pit_sorted[i];
    const double lower = pit_sorted[i] - static_cast<double>(i) / n;
    stat = std::max({stat, upper, lower});
  }
  return stat;
}

/// W^2 = 1/(12n) + sum_i (u_(i) - (2i-1)/(2n))^2.
inline double cvm_statistic(std::span<const double> pit_sorted) {
  const double n = static_cast<double>(pit_sorted.size());
  double stat = 1.0 / (12.0 * n);
  for (std::size_t i = 0; i < pit_sorted.size(); ++i) {
    const double target = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * n);
    const double diff = pit_sorted[i] - target;
    stat += diff * diff;
  }
  return stat;
}

/// Limiting Kolmogorov survival function Q(z) = 2 sum_k (-1)^(k-1) e^(-2 k^2 z^2),
/// with the Jacobi-theta form of the CDF used for small z where the
/// alternating series converges slowly. Terms are truncated below 1e-12.
inline double kolmogorov_asymptotic_sf(double z) {
  if (z <= 0.0) return 1.0;
  if (z < 1.18) {
    // K(z) = sqrt(2 pi)/z * sum_{k odd} exp(-k^2 pi^2 / (8 z^2))
    const double t = std::exp(-1.2337005501361697 / (z * z));  // pi^2/8
    double sum = 0.0;
    double power = t;  // t^((2k-1)^2) for k = 1, 2, ...
    for (int k = 1; k < 40; ++k) {
      sum += power;
      if (power < 1e-12 * sum) break;
      power = std::pow(t, static_cast<double>((2 * k + 1) * (2 * k + 1)));
    }
    const double cdf = 2.5066282746310005024 / z * sum;  // sqrt(2 pi)
    return 1.0 - cdf;
  }
  double sf = 0.0;
  double sign = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double term = std::exp(-2.0 * k * k * z * z);
    sf += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::max(0.0, 2.0 * sf);
}

/// Exact finite-sample CDF P(D_n < d) by the Marsaglia-Tsang-Wang
/// matrix-power method, without the 7-digit right-tail shortcut.
inline double kolmogorov_exact_cdf(std::size_t n, double d) {
  if (d <= 1.0 / (2.0 * static_cast<double>(n))) return 0.0;
  if (d >= 1.0) return 1.0;

  const double nd = static_cast<double>(n) * d;
  const int k = static_cast<int>(nd) + 1;
  const int m = 2 * k - 1;
  const double h = k - nd;

  std::vector<double> H(static_cast<std::size_t>(m) * m, 0.0);
  auto at = [m](std::vector<double>& mat, int i, int j) -> double& {
    return mat[static_cast<std::size_t>(i) * m + j];
  };
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i - j + 1 >= 0) at(H, i, j) = 1.0;
    }
  }
  for (int i = 0; i < m; ++i) {
    at(H, i, 0) -= std::pow(h, i + 1);
    at(H, m - 1, i) -= std::pow(h, m - i);
  }
  at(H, m - 1, 0) += (2.0 * h - 1.0 > 0.0 ? std::pow(2.0 * h - 1.0, m) : 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int g = 1; g <= i - j + 1; ++g) at(H, i, j) /= g;
    }
  }

  // Q = H^n with power-of-ten scaling to keep entries representable.
  auto multiply = [m](const std::vector<double>& A, const std::vector<double>& B) {
    std::vector<double> C(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) {
      for (int g = 0; g < m; ++g) {
        const double a = A[static_cast<std::size_t>(i) * m + g];
        if (a == 0.0) continue;
        for (int j = 0; j < m; ++j) {
          C[static_cast<std::size_t>(i) * m + j] +=
              a * B[static_cast<std::size_t>(g) * m + j];
        }
      }
    }
    return C;
  };

  std::vector<double> Q(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) Q[static_cast<std::size_t>(i) * m + i] = 1.0;
  int exponent = 0;
  int base_exponent = 0;
  std::vector<double> base = H;
  std::size_t remaining = n;
  while (remaining > 0) {
    if (remaining & 1u) {
      Q = multiply(Q, base);
      exponent += base_exponent;
      if (Q[static_cast<std::size_t>(k - 1) * m + (k - 1)] > 1e140) {
        for (auto& v : Q) v *= 1e-140;
        exponent += 140;
      }
    }
    remaining >>= 1;
    if (remaining == 0) break;
    base = multiply(base, base);
    base_exponent *= 2;
    if (base[static_cast<std::size_t>(k - 1) * m + (k - 1)] > 1e140) {
      for (auto& v : base) v *= 1e-140;
      base_exponent += 140;
    }
  }

  double s = Q[static_cast<std::size_t>(k - 1) * m + (k - 1)];
  for (std::size_t i = 1; i <= n; ++i) {
    s = s * static_cast<double>(i) / static_cast<double>(n);
    if (s < 1e-140) {
      s *= 1e140;
      exponent -= 140;
    }
  }
  return std::clamp(s * std::pow(10.0, exponent), 0.0, 1.0);
}

/// Largest n for which the exact Kolmogorov distribution is used; beyond it
/// the limiting distribution at sqrt(n) * d is accurate and much cheaper.
inline constexpr std::size_t kExactKolmogorovMaxN = 100;

inline double ks_p_value(std::size_t n, double d) {
  if (n <= kExactKolmogorovMaxN) return 1.0 - kolmogorov_exact_cdf(n, d);
  return kolmogorov_asymptotic_sf(std::sqrt(static_cast<double>(n)) * d);
}

/// Limiting CDF of W^2 (Anderson-Darling 1952):
///   V(x) = 1/(pi sqrt(x)) * sum_j binom(2j, j)/4^j * sqrt(4j+1)
///          * exp(-(4j+1)^2/(16x)) * K_{1/4}((4j+1)^2/(16x)).
/// Terms are truncated below 1e-12; the exponential factors decay fast enough
/// that a handful of terms suffice over the whole practical range.
inline double cvm_asymptotic_cdf(double x) {
  if (x <= 0.0) return 0.0;
  constexpr double pi = 3.14159265358979323846;
  double sum = 0.0;
  double coeff = 1.0;  // binom(2j, j) / 4^j
  for (int j = 0; j < 64; ++j) {
    const double arg = (4.0 * j + 1.0) * (4.0 * j + 1.0) / (16.0 * x);
    if (arg > 350.0) break;  // exp(-arg) * K(arg) ~ e^(-2 arg) underflows
    const double term = coeff * std::sqrt(4.0 * j + 1.0) * std::exp(-arg) *
                        std::cyl_bessel_k(0.25, arg);
    sum += term;
    if (j > 3 && term < 1e-12) break;
    coeff *= (2.0 * j + 1.0) / (2.0 * (j + 1.0));
  }
  return std::clamp(sum / (pi * std::sqrt(x)), 0.0, 1.0);
}

inline double cvm_p_value(double w2) {
  return std::clamp(1.0 - cvm_asymptotic_cdf(w2), 0.0, 1.0);
}

/// Kolmogorov-Smirnov test of data against a fully specified model. With a
/// fitted lambda plugged in the p-value is approximate (conservative).
inline TestResult ks_test(const Sample& data, const EgdModel& model) {
  const std::vector<double> pit = probability_integral_transform(data, model);
  const double stat = ks_statistic(pit);
  return {stat, ks_p_value(data.size(), stat)};
}

/// Cramer-von Mises test; same estimated-parameter caveat as ks_test.
inline TestResult cvm_test(const Sample& data, const EgdModel& model) {
  const std::vector<double> pit = probability_integral_transform(data, model);
  const double stat = cvm_statistic(pit);
  return {stat, cvm_p_value(stat)};
}

inline GofResult gof_test(const Sample& data, const EgdModel& model) {
  const std::vector<double> pit = probability_integral_transform(data, model);
  const double ks = ks_statistic(pit);
  const double cvm = cvm_statistic(pit);
  return {ks, ks_p_value(data.size(), ks), cvm, cvm_p_value(cvm), data.size()};
}

}  // namespace ssr
