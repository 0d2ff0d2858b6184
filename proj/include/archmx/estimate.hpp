#pragma once

#include "archmx/bspline.hpp"
#include "archmx/core.hpp"
#include "archmx/kernel.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace archmx {

/// Tensor-product spline settings for the QMLE estimator.
struct SplineConfig {
  int order = 4;
  /// Interior knots per dimension; a single entry applies to every dimension.
  std::vector<std::size_t> internal_knots{3};
  /// Largest covariate dimension the QMLE fit accepts.
  std::size_t max_dim = 2;
};

/// Kernel partially-linear fit. With `exclude` set, that panel column is dropped
/// before smoothing (the null model for testing it). When `cfg` is absent the
/// rule-of-thumb bandwidth is used; otherwise its bandwidth vector has one entry
/// per panel column (the excluded one is ignored) or a single shared entry.
FittedModel fit_partially_linear(const ReturnSeries& series, const CovariatePanel& panel, std::size_t p,
                                 const std::optional<KernelConfig>& cfg = std::nullopt,
                                 std::optional<std::size_t> exclude = std::nullopt);

/// B-spline QMLE fit, minimising (1/N) sum eps_t^2 / sigma_t^2 + ln sigma_t^2 with alpha >= 0.
FittedModel fit_bspline_qmle(const ReturnSeries& series, const CovariatePanel& panel, std::size_t p,
                             const SplineConfig& cfg = {}, std::optional<std::size_t> exclude = std::nullopt);

/// Evaluates m-hat at x; x has one entry per covariate the fit used.
double predict_m(const FittedModel& fit, std::span<const double> x);

namespace detail {

/// Box-constrained QMLE over beta = (alpha_1..alpha_p, theta). Rows of `design` are
/// (eps^2 lags, basis values); `response` is eps_t^2. The first `p` coordinates are kept >= 0.
struct QmleResult {
  Eigen::VectorXd beta;
  double start_objective = 0.0;
  double objective = 0.0;
  int iterations = 0;
};

double qmle_objective(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, const Eigen::VectorXd& beta);

QmleResult minimize_qmle(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, std::size_t p,
                         Eigen::VectorXd start, int max_iter = 500);

}  // namespace detail

}  // namespace archmx
