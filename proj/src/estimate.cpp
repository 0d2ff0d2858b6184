#include "archmx/estimate.hpp"

#include "archmx/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace archmx {

namespace {

constexpr double kVarianceFloor = 1e-8;

std::vector<std::size_t> used_columns(std::size_t d, std::optional<std::size_t> exclude) {
  if (exclude && *exclude >= d) {
    throw Error(ErrorCode::IndexOutOfRange, "excluded covariate " + std::to_string(*exclude) +
                                                " outside 0.." + std::to_string(d - 1));
  }
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < d; ++j) {
    if (!exclude || j != *exclude) cols.push_back(j);
  }
  return cols;
}

// Lagged design rows X_{t-1}, t = p..n-1, restricted to `cols`.
Eigen::MatrixXd design_points(const CovariatePanel& panel, std::size_t p, const std::vector<std::size_t>& cols) {
  const Eigen::MatrixXd lagged = lagged_design(panel.matrix(), p);
  Eigen::MatrixXd out(lagged.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = lagged.col(static_cast<Eigen::Index>(cols[k]));
  }
  return out;
}

// Columns: eps_t^2 for t = p..n-1, then eps_{t-1}^2 .. eps_{t-p}^2.
Eigen::MatrixXd response_and_lags(const ReturnSeries& series, std::size_t p) {
  const auto sq = series.squared();
  const std::size_t n = sq.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n - p), static_cast<Eigen::Index>(p + 1));
  for (std::size_t t = p; t < n; ++t) {
    const auto r = static_cast<Eigen::Index>(t - p);
    out(r, 0) = sq[t];
    for (std::size_t j = 1; j <= p; ++j) out(r, static_cast<Eigen::Index>(j)) = sq[t - j];
  }
  return out;
}

KernelConfig resolve_bandwidth(const std::optional<KernelConfig>& cfg, const Eigen::MatrixXd& points,
                               std::size_t full_dim, const std::vector<std::size_t>& cols) {
  if (!cfg) return select_bandwidth(points);
  KernelConfig out;
  out.kernel = cfg->kernel;
  out.bandwidth.resize(static_cast<Eigen::Index>(cols.size()));
  const auto given = static_cast<std::size_t>(cfg->bandwidth.size());
  for (std::size_t k = 0; k < cols.size(); ++k) {
    double h = 0.0;
    if (given == 1) {
      h = cfg->bandwidth(0);
    } else if (given == full_dim) {
      h = cfg->bandwidth(static_cast<Eigen::Index>(cols[k]));
    } else if (given == cols.size()) {
      h = cfg->bandwidth(static_cast<Eigen::Index>(k));
    } else {
      throw Error(ErrorCode::DimensionMismatch, "bandwidth vector has " + std::to_string(given) + " entries");
    }
    out.bandwidth(static_cast<Eigen::Index>(k)) = h;
  }
  validate(out, cols.size());
  return out;
}

class KernelVolatility final : public VolatilityFunction {
 public:
  KernelVolatility(Eigen::MatrixXd points, KernelConfig cfg, Eigen::VectorXd adjusted)
      : points_(std::move(points)), cfg_(std::move(cfg)), adjusted_(std::move(adjusted)) {}

  [[nodiscard]] std::size_t dim() const noexcept override { return static_cast<std::size_t>(points_.cols()); }

  [[nodiscard]] double operator()(std::span<const double> x) const override {
    if (x.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "m-hat query dimension");
    return kernel_weights_at(points_, cfg_, x).dot(adjusted_);
  }

 private:
  Eigen::MatrixXd points_;
  KernelConfig cfg_;
  Eigen::VectorXd adjusted_;
};

class SplineVolatility final : public VolatilityFunction {
 public:
  SplineVolatility(std::optional<bspline::TensorBasis> basis, std::vector<double> lo, std::vector<double> hi,
                   Eigen::VectorXd theta)
      : basis_(std::move(basis)), lo_(std::move(lo)), hi_(std::move(hi)), theta_(std::move(theta)) {}

  [[nodiscard]] std::size_t dim() const noexcept override { return lo_.size(); }

  [[nodiscard]] double operator()(std::span<const double> x) const override {
    if (x.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "m-hat query dimension");
    if (!basis_) return theta_(0);
    std::vector<double> u(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) u[k] = (x[k] - lo_[k]) / (hi_[k] - lo_[k]);
    const auto b = basis_->evaluate(u);
    return Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size())).dot(theta_);
  }

 private:
  std::optional<bspline::TensorBasis> basis_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  Eigen::VectorXd theta_;
};

}  // namespace

FittedModel fit_partially_linear(const ReturnSeries& series, const CovariatePanel& panel, std::size_t p,
                                 const std::optional<KernelConfig>& cfg, std::optional<std::size_t> exclude) {
  validate_inputs(series, panel, p);
  const auto cols = used_columns(panel.dim(), exclude);
  Eigen::MatrixXd points = design_points(panel, p, cols);
  const KernelConfig kcfg = resolve_bandwidth(cfg, points, panel.dim(), cols);

  const Eigen::MatrixXd raw = response_and_lags(series, p);
  const Eigen::MatrixXd smooth = kernel_smooth(points, kcfg, raw);
  const Eigen::MatrixXd centred = raw - smooth;
  const Eigen::VectorXd y_tilde = centred.col(0);
  const Eigen::MatrixXd x_tilde = centred.rightCols(static_cast<Eigen::Index>(p));

  const Eigen::MatrixXd gram = x_tilde.transpose() * x_tilde;
  const Eigen::VectorXd rhs = x_tilde.transpose() * y_tilde;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  // scale against the uncentred lags: a constant series centres to round-off, not to exact zeros
  const double scale = std::max(eig.eigenvalues().maxCoeff(),
                                raw.rightCols(static_cast<Eigen::Index>(p)).colwise().squaredNorm().maxCoeff());
  if (!(scale > 0.0) || eig.eigenvalues().minCoeff() <= 1e-12 * scale) {
    throw Error(ErrorCode::SingularNormalEquations, "kernel-centred lag matrix is rank deficient");
  }
  Eigen::VectorXd alpha = gram.ldlt().solve(rhs);

  FittedModel fit;
  fit.p = p;
  for (Eigen::Index j = 0; j < alpha.size(); ++j) {
    if (alpha(j) < 0.0) {
      fit.warnings.push_back("alpha_" + std::to_string(j + 1) + " estimate " + std::to_string(alpha(j)) +
                             " clamped to 0");
      alpha(j) = 0.0;
    }
  }

  // m-hat at training points is W (eps^2 - sum alpha_j eps^2_{.-j}); residuals per the null model.
  const Eigen::VectorXd adjusted = raw.col(0) - raw.rightCols(static_cast<Eigen::Index>(p)) * alpha;
  const Eigen::VectorXd m_train = smooth.col(0) - smooth.rightCols(static_cast<Eigen::Index>(p)) * alpha;
  const Eigen::VectorXd resid = adjusted - m_train;

  fit.alpha_hat.assign(alpha.data(), alpha.data() + alpha.size());
  fit.residuals.assign(resid.data(), resid.data() + resid.size());
  fit.method = KernelMethod{kcfg.bandwidth, kcfg.kernel};
  fit.excluded = exclude;
  fit.covariates_used = cols;
  fit.m_hat = std::make_shared<KernelVolatility>(std::move(points), kcfg, adjusted);
  return fit;
}

namespace detail {

double qmle_objective(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd s = (design * beta).cwiseMax(kVarianceFloor);
  double f = 0.0;
  for (Eigen::Index t = 0; t < s.size(); ++t) f += response(t) / s(t) + std::log(s(t));
  return f / static_cast<double>(s.size());
}

QmleResult minimize_qmle(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, std::size_t p,
                         Eigen::VectorXd start, int max_iter) {
  const auto np = static_cast<Eigen::Index>(p);
  const auto k = design.cols();
  const auto n = static_cast<double>(design.rows());
  for (Eigen::Index j = 0; j < np; ++j) start(j) = std::max(start(j), 0.0);

  QmleResult out;
  out.beta = start;
  out.start_objective = qmle_objective(design, response, start);
  double f = out.start_objective;

  Eigen::VectorXd beta = start;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd s = (design * beta).cwiseMax(kVarianceFloor);
    const Eigen::VectorXd inv_s = s.cwiseInverse();
    const Eigen::VectorXd score = inv_s - response.cwiseProduct(inv_s.cwiseAbs2());
    const Eigen::VectorXd grad = design.transpose() * score / n;
    // Fisher information of the Gaussian quasi-likelihood
    const Eigen::MatrixXd info = design.transpose() * inv_s.cwiseAbs2().asDiagonal() * design / n;

    std::vector<Eigen::Index> free;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j < np && beta(j) <= 0.0 && grad(j) > 0.0) continue;
      free.push_back(j);
    }
    const auto nf = static_cast<Eigen::Index>(free.size());
    if (nf == 0) break;
    Eigen::MatrixXd hf(nf, nf);
    Eigen::VectorXd gf(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
      gf(a) = grad(free[static_cast<std::size_t>(a)]);
      for (Eigen::Index b = 0; b < nf; ++b) hf(a, b) = info(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
    }
    hf.diagonal().array() += 1e-10 * (hf.diagonal().maxCoeff() + 1e-300);
    const Eigen::VectorXd df = -hf.ldlt().solve(gf);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(k);
    for (Eigen::Index a = 0; a < nf; ++a) dir(free[static_cast<std::size_t>(a)]) = df(a);
    if (!dir.allFinite()) break;

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial;
    double f_trial = f;
    for (int halving = 0; halving < 60; ++halving) {
      trial = beta + step * dir;
      for (Eigen::Index j = 0; j < np; ++j) trial(j) = std::max(trial(j), 0.0);
      f_trial = qmle_objective(design, response, trial);
      if (std::isfinite(f_trial) && f_trial <= f + 1e-4 * grad.dot(trial - beta)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    out.iterations = it + 1;
    if (!accepted) break;
    const double decrease = f - f_trial;
    beta = trial;
    f = f_trial;
    if (decrease <= 1e-13 * (1.0 + std::abs(f))) break;
  }
  out.beta = beta;
  out.objective = f;
  return out;
}

}  // namespace detail

FittedModel fit_bspline_qmle(const ReturnSeries& series, const CovariatePanel& panel, std::size_t p,
                             const SplineConfig& cfg, std::optional<std::size_t> exclude) {
  validate_inputs(series, panel, p);
  const auto cols = used_columns(panel.dim(), exclude);
  if (cols.size() > cfg.max_dim) {
    throw Error(ErrorCode::DimensionTooHigh, std::to_string(cols.size()) + " covariates exceed the spline limit of " +
                                                 std::to_string(cfg.max_dim));
  }
  if (cfg.internal_knots.empty() || (cfg.internal_knots.size() != 1 && cfg.internal_knots.size() != cols.size())) {
    throw Error(ErrorCode::DimensionMismatch, "internal knot counts do not match the covariate dimension");
  }
  const Eigen::MatrixXd points = design_points(panel, p, cols);
  const Eigen::MatrixXd raw = response_and_lags(series, p);
  const auto n_eff = points.rows();

  // rescale to [0,1] and place knots at quantiles
  std::vector<double> lo(cols.size());
  std::vector<double> hi(cols.size());
  Eigen::MatrixXd unit(n_eff, static_cast<Eigen::Index>(cols.size()));
  std::vector<bspline::Basis> factors;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    lo[k] = points.col(kk).minCoeff();
    hi[k] = points.col(kk).maxCoeff();
    if (!(hi[k] > lo[k])) throw Error(ErrorCode::DegenerateColumn, panel.names()[cols[k]]);
    unit.col(kk) = (points.col(kk).array() - lo[k]) / (hi[k] - lo[k]);
    const std::size_t nk = cfg.internal_knots.size() == 1 ? cfg.internal_knots[0] : cfg.internal_knots[k];
    std::vector<double> u(unit.col(kk).data(), unit.col(kk).data() + n_eff);
    factors.push_back(bspline::Basis::from_quantiles(u, nk, cfg.order));
  }
  std::optional<bspline::TensorBasis> basis;
  if (!factors.empty()) basis.emplace(factors);
  const auto kb = static_cast<Eigen::Index>(basis ? basis->size() : 1);
  if (5 * kb >= n_eff) {
    throw Error(ErrorCode::InvalidArgument, "basis size " + std::to_string(kb) + " too large for " +
                                                std::to_string(n_eff) + " observations");
  }

  const auto np = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd design(n_eff, np + kb);
  design.leftCols(np) = raw.rightCols(np);
  std::vector<double> u(cols.size());
  for (Eigen::Index t = 0; t < n_eff; ++t) {
    if (!basis) {
      design(t, np) = 1.0;
      continue;
    }
    for (std::size_t k = 0; k < cols.size(); ++k) u[k] = unit(t, static_cast<Eigen::Index>(k));
    const auto b = basis->evaluate(u);
    for (Eigen::Index j = 0; j < kb; ++j) design(t, np + j) = b[static_cast<std::size_t>(j)];
  }
  const Eigen::VectorXd response = raw.col(0);
  const Eigen::MatrixXd bmat = design.rightCols(kb);
  const Eigen::MatrixXd lags = design.leftCols(np);
  const double level = response.mean();

  // ridge LS for theta given alpha, shifted so every start has positive variance
  const Eigen::MatrixXd btb = bmat.transpose() * bmat;
  const double ridge = 1e-6 * btb.trace() / static_cast<double>(kb);
  const Eigen::LDLT<Eigen::MatrixXd> btb_solver(btb + ridge * Eigen::MatrixXd::Identity(kb, kb));
  const auto theta_for = [&](const Eigen::VectorXd& alpha) {
    Eigen::VectorXd theta = btb_solver.solve(bmat.transpose() * (response - lags * alpha));
    const double floor = 0.1 * level;
    const double lowest = (bmat * theta).minCoeff();
    // basis functions sum to one, so a constant shift of theta shifts m uniformly
    if (lowest < floor) theta.array() += floor - lowest;
    return theta;
  };

  std::vector<Eigen::VectorXd> alpha_starts;
  for (const double a : {0.05, 0.2, 0.4}) alpha_starts.push_back(Eigen::VectorXd::Constant(np, a / static_cast<double>(p)));
  {
    const Eigen::VectorXd joint = design.colPivHouseholderQr().solve(response);
    alpha_starts.push_back(joint.head(np).cwiseMax(0.0));
  }
  alpha_starts.push_back(Eigen::VectorXd::Zero(np));

  std::optional<detail::QmleResult> best;
  for (const auto& a0 : alpha_starts) {
    Eigen::VectorXd start(np + kb);
    start.head(np) = a0;
    start.tail(kb) = theta_for(a0);
    auto res = detail::minimize_qmle(design, response, p, start);
    if (!std::isfinite(res.objective)) continue;
    if (!best || res.objective < best->objective) best = std::move(res);
  }
  if (!best) throw Error(ErrorCode::OptimizerDiverged, "no QMLE start reached a finite objective");

  const Eigen::VectorXd alpha = best->beta.head(np);
  const Eigen::VectorXd theta = best->beta.tail(kb);
  const Eigen::VectorXd resid = response - design * best->beta;

  FittedModel fit;
  fit.p = p;
  fit.alpha_hat.assign(alpha.data(), alpha.data() + alpha.size());
  fit.residuals.assign(resid.data(), resid.data() + resid.size());
  SplineMethod method;
  method.order = cfg.order;
  for (const auto& f : factors) method.knots.push_back(f.knots());
  fit.method = std::move(method);
  fit.excluded = exclude;
  fit.covariates_used = cols;
  fit.objective = best->objective;
  fit.m_hat = std::make_shared<SplineVolatility>(std::move(basis), std::move(lo), std::move(hi), theta);
  return fit;
}

double predict_m(const FittedModel& fit, std::span<const double> x) {
  if (!fit.m_hat) throw Error(ErrorCode::InvalidArgument, "fitted model has no volatility function");
  if (x.size() != fit.m_hat->dim()) {
    throw Error(ErrorCode::DimensionMismatch, "fit uses " + std::to_string(fit.m_hat->dim()) +
                                                  " covariates, query has " + std::to_string(x.size()));
  }
  return (*fit.m_hat)(x);
}

}  // namespace archmx
