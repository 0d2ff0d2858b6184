#include "archmx/anova.hpp"

#include "archmx/error.hpp"
#include "archmx/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace archmx {

WindowSet::WindowSet(std::vector<std::size_t> ordering, std::size_t k) : ordering_(std::move(ordering)), k_(k) {
  if (k_ % 2 == 0) throw Error(ErrorCode::EvenWindow, "window size " + std::to_string(k_) + " is even");
  if (k_ < 3) throw Error(ErrorCode::InvalidArgument, "window size must be at least 3");
  if (k_ > ordering_.size()) {
    throw Error(ErrorCode::WindowTooLarge, "window size " + std::to_string(k_) + " exceeds " +
                                               std::to_string(ordering_.size()) + " observations");
  }
}

std::size_t WindowSet::start(std::size_t rank) const noexcept {
  const std::size_t half = (k_ - 1) / 2;
  const std::size_t lo = rank > half ? rank - half : 0;
  return std::min(lo, ordering_.size() - k_);
}

std::vector<std::size_t> WindowSet::members(std::size_t rank) const {
  std::vector<std::size_t> out(k_);
  std::iota(out.begin(), out.end(), start(rank));
  return out;
}

std::vector<double> WindowSet::rank_order(std::span<const double> values) const {
  if (values.size() != ordering_.size()) throw Error(ErrorCode::LengthMismatch, "values vs window set length");
  std::vector<double> out(values.size());
  for (std::size_t r = 0; r < ordering_.size(); ++r) out[r] = values[ordering_[r]];
  return out;
}

WindowSet build_windows(std::span<const double> covariate, std::size_t k) {
  std::vector<std::size_t> order(covariate.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return covariate[a] < covariate[b]; });
  return WindowSet(std::move(order), k);
}

AnovaParts anova_statistic(std::span<const double> ranked_residuals, const WindowSet& ws) {
  const std::size_t n = ws.size();
  if (ranked_residuals.size() != n) throw Error(ErrorCode::LengthMismatch, "residuals vs window set length");
  const std::size_t k = ws.k();
  const auto kd = static_cast<double>(k);
  const auto nd = static_cast<double>(n);

  std::vector<double> window_mean(n);
  double grand = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t s0 = ws.start(t);
    double s = 0.0;
    for (std::size_t s_idx = s0; s_idx < s0 + k; ++s_idx) s += ranked_residuals[s_idx];
    window_mean[t] = s / kd;
    grand += s;
  }
  grand /= nd * kd;

  double between = 0.0;
  double within = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    between += (window_mean[t] - grand) * (window_mean[t] - grand);
    const std::size_t s0 = ws.start(t);
    for (std::size_t s_idx = s0; s_idx < s0 + k; ++s_idx) {
      const double dev = ranked_residuals[s_idx] - window_mean[t];
      within += dev * dev;
    }
  }
  AnovaParts out;
  out.mst = kd / (nd - 1.0) * between;
  out.mse = within / (nd * (kd - 1.0));
  out.t_n = out.mst - out.mse;
  return out;
}

double quadratic_form_oracle(std::span<const double> ranked_residuals, const WindowSet& ws, std::size_t max_expanded) {
  const std::size_t n = ws.size();
  if (ranked_residuals.size() != n) throw Error(ErrorCode::LengthMismatch, "residuals vs window set length");
  const std::size_t k = ws.k();
  const std::size_t len = n * k;
  if (len > max_expanded) {
    throw Error(ErrorCode::MemoryGuard, "expanded length " + std::to_string(len) + " above cap " +
                                            std::to_string(max_expanded));
  }
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  const double block = (nd * kd - 1.0) / (nd * (nd - 1.0) * kd * (kd - 1.0));
  const double all = 1.0 / (nd * (nd - 1.0) * kd);
  const double diag = 1.0 / (nd * (kd - 1.0));

  const auto len_i = static_cast<Eigen::Index>(len);
  Eigen::VectorXd v(len_i);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t s0 = ws.start(t);
    for (std::size_t j = 0; j < k; ++j) v(static_cast<Eigen::Index>(t * k + j)) = ranked_residuals[s0 + j];
  }
  const auto k_i = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(len_i, len_i, -all);
  for (Eigen::Index b = 0; b < len_i; b += k_i) a.block(b, b, k_i, k_i).array() += block;
  a.diagonal().array() -= diag;
  return v.dot(a * v);
}

double rice_variance(std::span<const double> residuals) {
  if (residuals.size() < 2) throw Error(ErrorCode::TooShort, "need at least two residuals");
  double ss = 0.0;
  for (std::size_t t = 1; t < residuals.size(); ++t) {
    const double d = residuals[t] - residuals[t - 1];
    ss += d * d;
  }
  return ss / (2.0 * static_cast<double>(residuals.size() - 1));
}

std::size_t choose_kn(std::size_t n_eff) {
  if (n_eff < 50) throw Error(ErrorCode::TooShort, "window rule needs at least 50 observations");
  const double target = 3.0 * std::pow(static_cast<double>(n_eff), 0.2);
  auto k = static_cast<std::size_t>(2.0 * std::round((target - 1.0) / 2.0) + 1.0);
  std::size_t upper = n_eff / 10;
  if (upper % 2 == 0) --upper;
  upper = std::max<std::size_t>(upper, 5);
  return std::clamp<std::size_t>(k, 5, upper);
}

double null_variance_fixed_k(std::size_t k, double tau) {
  const auto kd = static_cast<double>(k);
  return 2.0 * (2.0 * kd - 1.0) / (3.0 * (kd - 1.0)) * tau * tau;
}

double standardize(double t_n, std::size_t n_eff, std::size_t k, double tau) {
  return std::sqrt(static_cast<double>(n_eff) / static_cast<double>(k)) * t_n / std::sqrt(4.0 * tau * tau / 3.0);
}

double upper_p_value(double z) { return std::clamp(1.0 - normal_cdf(z), 0.0, 1.0); }

TestResult test_residuals(std::span<const double> residuals, std::span<const double> covariate_lagged,
                          std::size_t covariate, std::optional<std::size_t> k_n) {
  if (residuals.size() != covariate_lagged.size()) {
    throw Error(ErrorCode::LengthMismatch, "residuals and covariate differ in length");
  }
  const std::size_t n_eff = residuals.size();
  const std::size_t k = k_n ? *k_n : choose_kn(n_eff);
  const WindowSet ws = build_windows(covariate_lagged, k);
  const auto ranked = ws.rank_order(residuals);
  const AnovaParts parts = anova_statistic(ranked, ws);
  const double tau = rice_variance(residuals);
  if (!(tau > 0.0)) throw Error(ErrorCode::DegenerateResiduals, "residual variance estimate is zero");

  TestResult r;
  r.covariate = covariate;
  r.t_n = parts.t_n;
  r.mst = parts.mst;
  r.mse = parts.mse;
  r.k_n = k;
  r.tau_hat = tau;
  r.n_eff = n_eff;
  r.z = standardize(parts.t_n, n_eff, k, tau);
  r.p_value = upper_p_value(r.z);
  return r;
}

TestResult test_covariate(const ReturnSeries& series, const CovariatePanel& panel, std::size_t l, std::size_t p,
                          const EstimatorChoice& estimator, std::optional<std::size_t> k_n) {
  if (l >= panel.dim()) {
    throw Error(ErrorCode::IndexOutOfRange, "covariate " + std::to_string(l) + " outside panel of dimension " +
                                                std::to_string(panel.dim()));
  }
  FittedModel fit = std::holds_alternative<KernelEstimator>(estimator)
                        ? fit_partially_linear(series, panel, p, std::get<KernelEstimator>(estimator).config, l)
                        : fit_bspline_qmle(series, panel, p, std::get<SplineConfig>(estimator), l);
  const Eigen::MatrixXd lagged = lagged_design(panel.matrix(), p);
  const Eigen::VectorXd col = lagged.col(static_cast<Eigen::Index>(l));
  TestResult r = test_residuals(fit.residuals, std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
                                l, k_n);
  r.alpha_hat = fit.alpha_hat;
  if (const auto* km = std::get_if<KernelMethod>(&fit.method)) {
    r.bandwidth.assign(km->bandwidth.data(), km->bandwidth.data() + km->bandwidth.size());
  }
  r.warnings = std::move(fit.warnings);
  return r;
}

}  // namespace archmx
