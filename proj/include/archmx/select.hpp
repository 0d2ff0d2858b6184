#pragma once

#include "archmx/anova.hpp"
#include "archmx/core.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace archmx {

struct SelectionResult {
  std::vector<double> p_values;     // covariate order
  std::vector<std::size_t> order;   // indices sorting p_values ascending (stable)
  std::vector<double> cutoffs;      // cutoff for the l-th smallest p-value
  std::size_t k = 0;                // number of rejections
  std::vector<std::size_t> selected;  // ascending covariate indices
  std::vector<double> adjusted;     // BY-adjusted p-values, covariate order
  double q = 0.05;
};

/// Harmonic number H_d = sum_{l=1}^d 1/l.
double harmonic(std::size_t d) noexcept;

/// Benjamini-Yekutieli step-up: k = max{l : p_(l) <= (l/d) q / H_d}.
SelectionResult by_fdr_select(std::span<const double> p_values, double q = 0.05);

/// Selects {l : p_l <= alpha / d}.
SelectionResult bonferroni_select(std::span<const double> p_values, double alpha = 0.05);

/// Step-up BY adjustment min(1, min_{j >= l} (d H_d / j) p_(j)), mapped back to covariate order.
std::vector<double> by_adjusted_pvalues(std::span<const double> p_values);

struct SelectionRun {
  SelectionResult selection;
  std::vector<TestResult> tests;
};

/// Tests every covariate against its own null fit, then applies the BY rule.
SelectionRun select_variables(const ReturnSeries& series, const CovariatePanel& panel, std::size_t p, double q = 0.05,
                              const EstimatorChoice& estimator = KernelEstimator{},
                              std::optional<std::size_t> k_n = std::nullopt);

}  // namespace archmx
