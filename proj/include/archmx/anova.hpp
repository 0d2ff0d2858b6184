#pragma once

#include "archmx/core.hpp"
#include "archmx/estimate.hpp"
#include "archmx/kernel.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace archmx {

/// Rank windows over one covariate. Window t (0-based rank) covers ranks
/// [start(t), start(t) + k): centred on t in the interior, clipped to the
/// first or last k ranks at the edges.
class WindowSet {
 public:
  WindowSet(std::vector<std::size_t> ordering, std::size_t k);

  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] std::size_t size() const noexcept { return ordering_.size(); }
  /// ordering[r] is the original index of the observation with rank r.
  [[nodiscard]] const std::vector<std::size_t>& ordering() const noexcept { return ordering_; }
  [[nodiscard]] std::size_t start(std::size_t rank) const noexcept;
  /// Ranks belonging to window `rank`.
  [[nodiscard]] std::vector<std::size_t> members(std::size_t rank) const;

  /// values permuted into rank order.
  [[nodiscard]] std::vector<double> rank_order(std::span<const double> values) const;

 private:
  std::vector<std::size_t> ordering_;
  std::size_t k_;
};

/// Ranks the covariate (ties by original index) and builds windows of size k.
WindowSet build_windows(std::span<const double> covariate, std::size_t k);

struct AnovaParts {
  double t_n = 0.0;
  double mst = 0.0;
  double mse = 0.0;
};

/// MST - MSE over the windows. `ranked_residuals` must already be in rank order.
AnovaParts anova_statistic(std::span<const double> ranked_residuals, const WindowSet& ws);

inline constexpr std::size_t kDefaultOracleCap = 4096;

/// V'AV with the window-expanded residual vector V and the dense matrix A built
/// entry by entry. Throws MemoryGuard when n*k exceeds `max_expanded`.
double quadratic_form_oracle(std::span<const double> ranked_residuals, const WindowSet& ws,
                             std::size_t max_expanded = kDefaultOracleCap);

/// Difference-based variance estimate sum (v_t - v_{t-1})^2 / (2(n-1)) on time-ordered residuals.
double rice_variance(std::span<const double> residuals);

/// Nearest odd integer to 3 n^{1/5}, clamped to [5, n/10].
std::size_t choose_kn(std::size_t n_eff);

/// Variance of sqrt(n/k) T_n under the null at fixed k: 2(2k-1) / (3(k-1)) tau^2.
double null_variance_fixed_k(std::size_t k, double tau);

struct TestResult {
  std::size_t covariate = 0;
  double t_n = 0.0;
  double mst = 0.0;
  double mse = 0.0;
  std::size_t k_n = 0;
  double tau_hat = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  std::size_t n_eff = 0;
  std::vector<double> alpha_hat;
  std::vector<double> bandwidth;  // empty for spline fits
  std::vector<std::string> warnings;
};

/// z = sqrt(n/k) T / sqrt(4 tau^2 / 3).
double standardize(double t_n, std::size_t n_eff, std::size_t k, double tau);

/// Upper-tail p-value 1 - Phi(z).
double upper_p_value(double z);

/// Kernel fit with optional bandwidth override, or spline QMLE fit.
struct KernelEstimator {
  std::optional<KernelConfig> config;
};
using EstimatorChoice = std::variant<KernelEstimator, SplineConfig>;

/// Residuals of a null fit, tested against the covariate it excluded. Pairs v_t with X_{l,t-1}.
TestResult test_residuals(std::span<const double> residuals, std::span<const double> covariate_lagged,
                          std::size_t covariate, std::optional<std::size_t> k_n = std::nullopt);

/// Fits the null model without covariate `l` (0-based) and tests it.
TestResult test_covariate(const ReturnSeries& series, const CovariatePanel& panel, std::size_t l, std::size_t p,
                          const EstimatorChoice& estimator = KernelEstimator{},
                          std::optional<std::size_t> k_n = std::nullopt);

}  // namespace archmx
