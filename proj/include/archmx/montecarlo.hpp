#pragma once

#include "archmx/anova.hpp"
#include "archmx/dgp.hpp"
#include "archmx/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace archmx::mc {

struct StudyConfig {
  dgp::Scenario scenario = dgp::Scenario::Test2Cov;
  int model_id = 1;
  std::size_t n = 1000;
  double rho = 0.0;
  dgp::Shock shock = dgp::Shock::normal();
  bool standardize_shocks = false;
  std::size_t replications = 200;
  std::uint64_t master_seed = 1;
  std::vector<double> c_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  double q = 0.05;
  double level = 0.05;
  std::optional<std::size_t> k_n;
  /// Shared bandwidth for every covariate; rule of thumb when absent.
  std::optional<double> bandwidth;
  /// "kernel" or "spline" (spline only for test scenarios with d <= 2).
  std::string method = "kernel";
  std::size_t burnin = dgp::kDefaultBurnin;
  /// Worker cap; falls back to ARCHMX_THREADS, then hardware concurrency.
  std::optional<std::size_t> threads;
};

/// Throws InvalidArgument on an unusable configuration.
void validate(const StudyConfig& cfg);

/// Flagged when the config exceeds desk scale (n > 5000 or R > 500).
bool is_long_running(const StudyConfig& cfg);

struct RejectionRow {
  double c = 0.0;
  double rate = 0.0;
  double mc_stderr = 0.0;
  std::size_t valid = 0;
  std::size_t failures = 0;
};

struct SelectionCounts {
  std::size_t cs = 0;
  std::size_t is = 0;
  std::size_t ce = 0;
  std::size_t ie = 0;
};

struct SelectionMetrics {
  double mean_cs = 0.0;
  double mean_is = 0.0;
  double mean_ce = 0.0;
  double mean_ie = 0.0;
  std::vector<double> per_covariate_freq;
  std::size_t valid = 0;
  std::size_t failures = 0;
};

/// Set arithmetic of selected vs active over covariates 0..d-1.
SelectionCounts selection_metrics(const std::vector<std::size_t>& selected, const std::vector<std::size_t>& active,
                                  std::size_t d);

/// Rejection rate of the designated covariate's test at each c.
std::vector<RejectionRow> run_rejection_study(const StudyConfig& cfg);

SelectionMetrics run_selection_study(const StudyConfig& cfg);

/// Seed of replication `rep` at grid point `cell`.
std::uint64_t replication_seed(std::uint64_t master, std::size_t rep, std::size_t cell = 0);

/// Effective worker count for a requested cap.
std::size_t worker_count(std::optional<std::size_t> requested);

/// Runs task(i) for i in [0, count) on up to `workers` threads. A throwing task
/// leaves its slot empty and does not affect the others; results stay in index order.
template <typename T>
std::vector<std::optional<T>> parallel_map(std::size_t count, std::size_t workers,
                                           const std::function<T(std::size_t)>& task);

/// Estimator used by a study config.
EstimatorChoice estimator_for(const StudyConfig& cfg, std::size_t d);

}  // namespace archmx::mc

#include "archmx/montecarlo_impl.hpp"
