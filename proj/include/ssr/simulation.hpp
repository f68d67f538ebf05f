#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ssr/distribution.hpp"
#include "ssr/format.hpp"
#include "ssr/inference.hpp"
#include "ssr/model.hpp"
#include "ssr/reliability.hpp"
#include "ssr/rng.hpp"

namespace ssr {

/// Configuration of one Monte Carlo study: for each (n, m) cell, draw
/// `replications` strength/stress sample pairs, fit both rates, and estimate
/// reliability with a two-sided CI at `level`.
struct SimulationSpec {
  Rate lambda1;
  Rate lambda2;
  std::vector<std::pair<int, int>> sizes;
  int replications = 1000;
  double level = 0.95;
  std::uint64_t master_seed = 0;

  void validate() const {
    if (replications < 1) {
      throw std::invalid_argument("SimulationSpec: replications must be >= 1");
    }
    if (!(level > 0.0 && level < 1.0)) {
      throw std::invalid_argument("SimulationSpec: level must lie in (0, 1)");
    }
    if (sizes.empty()) {
      throw std::invalid_argument("SimulationSpec: at least one (n, m) size");
    }
    for (const auto& [n, m] : sizes) {
      if (n < 2 || m < 2) {
        throw std::invalid_argument(
            "SimulationSpec: sample sizes must be >= 2, got (" +
            std::to_string(n) + ", " + std::to_string(m) + ")");
      }
    }
  }
};

/// Aggregates for one (n, m) cell. The se_* fields are Monte Carlo standard
/// errors (replication standard deviation / sqrt(successes)) of the matching
/// mean and MSE columns; bias shares the mean's standard error.
struct SimulationRow {
  int n = 0;
  int m = 0;
  double mean_l1 = 0.0, bias_l1 = 0.0, mse_l1 = 0.0;
  double mean_l2 = 0.0, bias_l2 = 0.0, mse_l2 = 0.0;
  double se_mean_l1 = 0.0, se_mse_l1 = 0.0;
  double se_mean_l2 = 0.0, se_mse_l2 = 0.0;
  double r_ci_low = 0.0;   // average of per-replication unclipped CI endpoints
  double r_ci_high = 0.0;
  int failures = 0;
  bool unreliable = false;  // failures reached 10% of replications
};

struct SimulationTable {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double true_r = 0.0;
  int replications = 0;
  double level = 0.95;
  std::uint64_t master_seed = 0;
  std::vector<SimulationRow> rows;
};

namespace detail {

/// Neumaier-compensated accumulator; reduction order is fixed by replication
/// index, so aggregates are identical for every thread count.
struct CompensatedSum {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double value) {
    const double t = sum + value;
    if (std::abs(sum) >= std::abs(value)) {
      compensation += (sum - t) + value;
    } else {
      compensation += (value - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + compensation; }
};

struct Replication {
  bool ok = false;
  double l1 = 0.0;
  double l2 = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

inline Replication run_replication(const SimulationSpec& spec, int n, int m,
                                   int rep) {
  const std::uint64_t seed = derive_seed(
      {spec.master_seed, std::bit_cast<std::uint64_t>(spec.lambda1.value()),
       std::bit_cast<std::uint64_t>(spec.lambda2.value()),
       static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(m),
       static_cast<std::uint64_t>(rep)});
  Xoshiro256PlusPlus gen(seed);

  const EgdModel strength_model(spec.lambda1);
  const EgdModel stress_model(spec.lambda2);
  const Sample strength = draw_sample(strength_model, n, gen, "strength");
  const Sample stress = draw_sample(stress_model, m, gen, "stress");

  auto fit_with_retry = [](const Sample& sample) {
    try {
      return fit_mle(sample);
    } catch (const fit_error&) {
      FitOptions retry;
      retry.initializer = 1.5 * moment_initializer(sample);
      return fit_mle(sample, retry);  // second failure propagates
    }
  };

  Replication out;
  try {
    const FitResult fit1 = fit_with_retry(strength);
    const FitResult fit2 = fit_with_retry(stress);
    const ReliabilityEstimate est = estimate_from_fits(fit1, fit2, spec.level);
    out.ok = true;
    out.l1 = fit1.lambda_hat.value();
    out.l2 = fit2.lambda_hat.value();
    out.ci_low = est.ci_low;
    out.ci_high = est.ci_high;
  } catch (const fit_error&) {
    out.ok = false;
  }
  return out;
}

}  // namespace detail

/// Runs one (n, m) cell. Replications are independent substreams keyed by
/// (master_seed, cell, replication); failed fits are retried once with a
/// perturbed initializer, then counted and excluded from the aggregates.
inline SimulationRow run_cell(const SimulationSpec& spec, int n, int m,
                              unsigned threads = 1) {
  spec.validate();
  if (n < 2 || m < 2) {
    throw std::invalid_argument("run_cell: sample sizes must be >= 2");
  }
  const int reps = spec.replications;
  std::vector<detail::Replication> outcomes(static_cast<std::size_t>(reps));

  const unsigned worker_count =
      std::min<unsigned>(std::max(threads, 1u), static_cast<unsigned>(reps));
  if (worker_count <= 1) {
    for (int rep = 0; rep < reps; ++rep) {
      outcomes[rep] = detail::run_replication(spec, n, m, rep);
    }
  } else {
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    const int chunk = (reps + static_cast<int>(worker_count) - 1) /
                      static_cast<int>(worker_count);
    for (unsigned w = 0; w < worker_count; ++w) {
      const int begin = static_cast<int>(w) * chunk;
      const int end = std::min(reps, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back([&, begin, end] {
        for (int rep = begin; rep < end; ++rep) {
          outcomes[rep] = detail::run_replication(spec, n, m, rep);
        }
      });
    }
    for (auto& worker : workers) worker.join();
  }

  const double true1 = spec.lambda1.value();
  const double true2 = spec.lambda2.value();

  detail::CompensatedSum sum_l1, sum_l2, sum_sq1, sum_sq2, sum_lo, sum_hi;
  int successes = 0;
  for (const auto& rep : outcomes) {
    if (!rep.ok) continue;
    ++successes;
    sum_l1.add(rep.l1);
    sum_l2.add(rep.l2);
    const double dev1 = rep.l1 - true1;
    const double dev2 = rep.l2 - true2;
    sum_sq1.add(dev1 * dev1);
    sum_sq2.add(dev2 * dev2);
    sum_lo.add(rep.ci_low);
    sum_hi.add(rep.ci_high);
  }

  SimulationRow row;
  row.n = n;
  row.m = m;
  row.failures = reps - successes;
  row.unreliable = row.failures * 10 >= reps;
  if (successes == 0) {
    row.unreliable = true;
    return row;
  }

  const double count = static_cast<double>(successes);
  row.mean_l1 = sum_l1.value() / count;
  row.mean_l2 = sum_l2.value() / count;
  row.bias_l1 = row.mean_l1 - true1;
  row.bias_l2 = row.mean_l2 - true2;
  row.mse_l1 = sum_sq1.value() / count;
  row.mse_l2 = sum_sq2.value() / count;
  row.r_ci_low = sum_lo.value() / count;
  row.r_ci_high = sum_hi.value() / count;

  // Second pass for replication variances (Monte Carlo standard errors).
  detail::CompensatedSum var_l1, var_l2, var_mse1, var_mse2;
  for (const auto& rep : outcomes) {
    if (!rep.ok) continue;
    const double c1 = rep.l1 - row.mean_l1;
    const double c2 = rep.l2 - row.mean_l2;
    var_l1.add(c1 * c1);
    var_l2.add(c2 * c2);
    const double d1 = rep.l1 - true1;
    const double d2 = rep.l2 - true2;
    const double sq1 = d1 * d1 - row.mse_l1;
    const double sq2 = d2 * d2 - row.mse_l2;
    var_mse1.add(sq1 * sq1);
    var_mse2.add(sq2 * sq2);
  }
  row.se_mean_l1 = std::sqrt(var_l1.value() / count) / std::sqrt(count);
  row.se_mean_l2 = std::sqrt(var_l2.value() / count) / std::sqrt(count);
  row.se_mse_l1 = std::sqrt(var_mse1.value() / count) / std::sqrt(count);
  row.se_mse_l2 = std::sqrt(var_mse2.value() / count) / std::sqrt(count);
  return row;
}

/// Runs every (n, m) cell of the spec.
inline SimulationTable run_table(const SimulationSpec& spec,
                                 unsigned threads = 1) {
  spec.validate();
  SimulationTable table;
  table.lambda1 = spec.lambda1.value();
  table.lambda2 = spec.lambda2.value();
  table.true_r = r_closed_form({spec.lambda1, spec.lambda2});
  table.replications = spec.replications;
  table.level = spec.level;
  table.master_seed = spec.master_seed;
  table.rows.reserve(spec.sizes.size());
  for (const auto& [n, m] : spec.sizes) {
    table.rows.push_back(run_cell(spec, n, m, threads));
  }
  return table;
}

/// The (n, m) grid shared by the three reference tables.
inline const std::vector<std::pair<int, int>>& study_sizes() {
  static const std::vector<std::pair<int, int>> sizes = {
      {10, 10}, {15, 15}, {25, 25}, {30, 30}, {50, 50}, {75, 75}};
  return sizes;
}

/// The three (lambda1, lambda2) pairs of the reference study, with true
/// reliability 0.8391, 0.6405 and 0.2551 respectively.
inline const std::array<std::pair<double, double>, 3>& study_parameter_pairs() {
  static const std::array<std::pair<double, double>, 3> pairs = {
      {{0.5, 1.5}, {1.0, 1.5}, {1.0, 0.5}}};
  return pairs;
}

/// Runs all 18 cells of the reference study (three tables x six sizes).
inline std::array<SimulationTable, 3> run_tables(std::uint64_t master_seed,
                                                 int replications = 1000,
                                                 unsigned threads = 1) {
  std::array<SimulationTable, 3> tables;
  std::size_t index = 0;
  for (const auto& [l1, l2] : study_parameter_pairs()) {
    SimulationSpec spec{Rate(l1), Rate(l2), study_sizes(), replications, 0.95,
                        master_seed};
    tables[index++] = run_table(spec, threads);
  }
  return tables;
}

inline constexpr const char* kCsvHeader =
    "n,m,mean_l1,bias_l1,mse_l1,mean_l2,bias_l2,mse_l2,r_ci_low,r_ci_high,"
    "failures";

/// Machine-readable rendering; doubles use shortest round-trip form, so equal
/// results give byte-identical output.
inline std::string to_csv(const SimulationTable& table) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& row : table.rows) {
    out += std::to_string(row.n);
    out += ',';
    out += std::to_string(row.m);
    for (double v : {row.mean_l1, row.bias_l1, row.mse_l1, row.mean_l2,
                     row.bias_l2, row.mse_l2, row.r_ci_low, row.r_ci_high}) {
      out += ',';
      out += to_shortest(v);
    }
    out += ',';
    out += std::to_string(row.failures);
    out += '\n';
  }
  return out;
}

}  // namespace ssr
