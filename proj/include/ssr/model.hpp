#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ssr {

/// Largest accepted rate. Beyond ~1e6 the e^(-lambda*x) factor underflows for
/// any x of practical size, so larger rates are rejected at construction.
inline constexpr double kMaxRate = 1e6;

/// A strictly positive, finite rate parameter.
class Rate {
 public:
  explicit Rate(double value) : value_(value) {
    if (!std::isfinite(value) || value <= 0.0 || value > kMaxRate) {
      throw std::invalid_argument("Rate: value must lie in (0, " +
                                  std::to_string(kMaxRate) + "], got " +
                                  std::to_string(value));
    }
  }

  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Exponential-Gamma(3, lambda) lifetime model: the mixture of an
/// Exponential(lambda) and a Gamma(3, lambda) component, with the exponential
/// component carrying weight lambda / (1 + lambda).
class EgdModel {
 public:
  explicit EgdModel(Rate lambda) : lambda_(lambda) {}
  explicit EgdModel(double lambda) : lambda_(Rate(lambda)) {}

  double lambda() const noexcept { return lambda_.value(); }
  Rate rate() const noexcept { return lambda_; }

  double mixture_weight() const noexcept {
    const double l = lambda_.value();
    return l / (1.0 + l);
  }

 private:
  Rate lambda_;
};

/// An observed sample of strictly positive, finite values with a free-text
/// label ("strength", "stress", a file name) used in diagnostics.
class Sample {
 public:
  explicit Sample(std::vector<double> values, std::string label = "")
      : values_(std::move(values)), label_(std::move(label)) {
    if (values_.empty()) {
      throw std::invalid_argument("Sample" + describe() + ": no observations");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]) || values_[i] <= 0.0) {
        throw std::invalid_argument("Sample" + describe() + ": value #" +
                                    std::to_string(i + 1) +
                                    " must be a positive finite number, got " +
                                    std::to_string(values_[i]));
      }
    }
    for (double v : values_) sum_ += v;
  }

  const std::vector<double>& values() const noexcept { return values_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return values_.size(); }
  double sum() const noexcept { return sum_; }
  double mean() const noexcept { return sum_ / static_cast<double>(values_.size()); }

 private:
  std::string describe() const {
    return label_.empty() ? std::string() : " (" + label_ + ")";
  }

  std::vector<double> values_;
  std::string label_;
  double sum_ = 0.0;
};

}  // namespace ssr
