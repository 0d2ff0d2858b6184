#include "archmx/dgp.hpp"

#include "archmx/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace archmx::dgp {

namespace {

constexpr double kPi = std::numbers::pi;

double sq(double v) { return v * v; }
double sin2(double x) { return sq(std::sin(kPi * x / 2.0)); }

// Sums f(x_i) over the 0-based indices in `idx`.
template <typename F>
double sum_over(std::span<const double> x, std::initializer_list<std::size_t> idx, F f) {
  double s = 0.0;
  for (const auto i : idx) s += f(x[i]);
  return s;
}

double m_test2(int id, double c, std::span<const double> x) {
  switch (id) {
    case 1:
    case 3: return 0.2 + 0.5 * sq(x[0] - 2.5) + 2.0 * c * sq(x[1] - 2.5);
    case 2:
    case 4: return 0.2 + 0.5 * sq(x[0] + 2.0 * c * x[1] - 10.0);
    case 5: return 0.2 + sin2(x[0]) + 10.0 * c * sin2(x[1]);
    case 6: return 0.2 + 10.0 * c * sq(std::sin(x[0] / 2.0 + kPi * c * x[1] / 2.0));
    case 7: return 0.2 + 0.25 * x[0] + c * x[1];
    case 8: return 0.2 + c * x[0] * x[1];
    default: break;
  }
  throw Error(ErrorCode::InvalidArgument, "model id " + std::to_string(id));
}

double m_test5(int id, double c, std::span<const double> x) {
  const auto others = {std::size_t{0}, std::size_t{1}, std::size_t{3}, std::size_t{4}};
  switch (id) {
    case 1:
    case 3:
      return 0.2 + 0.5 * sum_over(x, others, [](double v) { return sq(v - 2.5); }) +
             5.0 * c * sq(x[2] - 2.5);
    case 2:
    case 4: return 0.2 + 0.5 * sq(x[0] + x[1] + 5.0 * c * x[2] + x[3] + x[4] - 25.0);
    case 5:
      // Squared sines, as in the 2-covariate Model 5; unsquared sines make m negative
      // on most of the covariate law.
      return 0.2 + sum_over(x, others, sin2) + 10.0 * c * sin2(x[2]);
    case 6:
      return 0.2 + sin2(x[0]) * sin2(x[1]) + 10.0 * c * sin2(x[2]) * sin2(x[3]) + sin2(x[4]);
    case 7: return 0.2 + 0.25 * sum_over(x, others, [](double v) { return v; }) + 8.0 * c * x[2];
    case 8: return 0.2 + c * x[2] * sum_over(x, others, [](double v) { return v; });
    default: break;
  }
  throw Error(ErrorCode::InvalidArgument, "model id " + std::to_string(id));
}

double m_select5(int id, std::span<const double> x) {
  const auto act = {std::size_t{0}, std::size_t{2}, std::size_t{3}};
  const auto ident = [](double v) { return v; };
  switch (id) {
    case 1:
    case 3: return 2.0 * sum_over(x, act, [](double v) { return sq(v - 2.5); });
    case 2:
    case 4: return 0.5 * sq(2.0 * sum_over(x, act, ident) - 15.0);
    case 5: return 8.0 * sum_over(x, act, sin2);
    case 6: return 10.0 * sin2(x[0]) * sin2(x[2]) + 10.0 * sin2(x[3]);
    case 7: return 8.0 * sum_over(x, act, ident);
    case 8: return x[2] * (x[0] + x[3]);
    default: break;
  }
  throw Error(ErrorCode::InvalidArgument, "model id " + std::to_string(id));
}

double m_select10(int id, std::span<const double> x) {
  const auto act = {std::size_t{0}, std::size_t{2}, std::size_t{3}, std::size_t{4}, std::size_t{8}};
  const auto ident = [](double v) { return v; };
  switch (id) {
    case 1:
    case 3: return 2.0 * sum_over(x, act, [](double v) { return sq(v - 2.5); });
    case 2: return 0.5 * sq(2.0 * sum_over(x, act, ident) - 25.0);
    case 4: return 0.5 * sq(2.0 * sum_over(x, act, ident) - 15.0);
    case 5: return 8.0 * sum_over(x, act, sin2);
    case 6:
      return 10.0 * sin2(x[0]) * sin2(x[2]) + 10.0 * sin2(x[3]) * sin2(x[4]) + 10.0 * sin2(x[8]);
    case 7: return 8.0 * sum_over(x, act, ident);
    case 8: return (x[0] + x[3]) * x[2] + x[4] * x[8];
    default: break;
  }
  throw Error(ErrorCode::InvalidArgument, "model id " + std::to_string(id));
}

}  // namespace

Eigen::MatrixXd CovariateLaw::covariance() const {
  Eigen::MatrixXd cov(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto gap = static_cast<double>(i > j ? i - j : j - i);
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gap == 0.0 ? 1.0 : std::pow(rho, gap);
    }
  }
  return cov;
}

Eigen::MatrixXd sample_covariate_rows(const CovariateLaw& law, std::size_t n, Rng& rng) {
  if (law.d == 0) throw Error(ErrorCode::InvalidArgument, "covariate dimension must be positive");
  if (!(law.rho >= 0.0 && law.rho < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "rho must lie in [0,1)");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(law.covariance());
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::CholeskyFailure, "covariance not positive definite");
  const Eigen::MatrixXd lower = llt.matrixL();
  const auto d = static_cast<Eigen::Index>(law.d);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z(j) = normal(rng);
    out.row(i) = (lower * z).transpose().array() + law.mean;
  }
  return out;
}

CovariatePanel sample_covariates(const CovariateLaw& law, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::EmptyInput, "cannot sample an empty covariate panel");
  Rng rng(seed);
  return CovariatePanel(sample_covariate_rows(law, n, rng));
}

double Shock::variance() const {
  switch (kind) {
    case ShockKind::Normal: return 1.0;
    case ShockKind::Laplace: return 2.0 * scale * scale;
    case ShockKind::StudentT:
    case ShockKind::ScaledT:
      if (!(df > 2.0)) throw Error(ErrorCode::InvalidDf, "df must exceed 2, got " + std::to_string(df));
      return scale * scale * df / (df - 2.0);
  }
  return 1.0;
}

std::string Shock::label() const {
  const auto fmt = [](double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  switch (kind) {
    case ShockKind::Normal: return "normal";
    case ShockKind::Laplace: return "laplace:" + fmt(scale);
    case ShockKind::StudentT: return "t:" + fmt(df);
    case ShockKind::ScaledT: return "scaled-t:" + fmt(df) + ":" + fmt(scale);
  }
  return "normal";
}

Shock parse_shock(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(':', start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  const auto num = [&](std::size_t i, double fallback) {
    if (parts.size() <= i) return fallback;
    try {
      return std::stod(parts[i]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad shock parameter in '" + text + "'");
    }
  };
  Shock s;
  if (parts[0] == "normal") {
    s = Shock::normal();
  } else if (parts[0] == "laplace") {
    s = Shock::laplace(num(1, 0.5));
  } else if (parts[0] == "t") {
    s = Shock::student_t(num(1, 7.0));
  } else if (parts[0] == "scaled-t") {
    s = Shock::scaled_t(num(1, 7.0), num(2, 0.5));
  } else {
    throw Error(ErrorCode::ParseError, "unknown shock '" + text + "'");
  }
  if (s.kind == ShockKind::Laplace && !(s.scale > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "Laplace scale must be positive");
  }
  (void)s.variance();  // rejects df <= 2
  return s;
}

double draw_shock(const Shock& shock, Rng& rng) {
  switch (shock.kind) {
    case ShockKind::Normal: {
      std::normal_distribution<double> normal;
      return normal(rng);
    }
    case ShockKind::Laplace: {
      std::uniform_real_distribution<double> unif(-0.5, 0.5);
      double u = unif(rng);
      while (u == -0.5) u = unif(rng);
      const double mag = -shock.scale * std::log1p(-2.0 * std::abs(u));
      return u < 0.0 ? -mag : mag;
    }
    case ShockKind::StudentT:
    case ShockKind::ScaledT: {
      if (!(shock.df > 2.0)) throw Error(ErrorCode::InvalidDf, "df must exceed 2");
      std::student_t_distribution<double> t(shock.df);
      return shock.scale * t(rng);
    }
  }
  return 0.0;
}

std::vector<double> sample_shocks(const Shock& shock, std::size_t n, std::uint64_t seed, bool standardize) {
  if (n == 0) throw Error(ErrorCode::EmptyInput, "need at least one shock");
  const double sd = std::sqrt(shock.variance());
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& z : out) z = draw_shock(shock, rng);
  if (standardize) {
    for (auto& z : out) z /= sd;
  }
  return out;
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Test2Cov: return "test2";
    case Scenario::Test5Cov: return "test5";
    case Scenario::Select5Cov: return "select5";
    case Scenario::Select10Cov: return "select10";
  }
  return "test2";
}

Scenario parse_scenario(const std::string& text) {
  if (text == "test2" || text == "Test2Cov") return Scenario::Test2Cov;
  if (text == "test5" || text == "Test5Cov") return Scenario::Test5Cov;
  if (text == "select5" || text == "Select5Cov") return Scenario::Select5Cov;
  if (text == "select10" || text == "Select10Cov") return Scenario::Select10Cov;
  throw Error(ErrorCode::ParseError, "unknown scenario '" + text + "'");
}

std::size_t SimModel::dim() const noexcept {
  switch (scenario) {
    case Scenario::Test2Cov: return 2;
    case Scenario::Test5Cov:
    case Scenario::Select5Cov: return 5;
    case Scenario::Select10Cov: return 10;
  }
  return 0;
}

std::vector<double> SimModel::alpha() const {
  switch (model_id) {
    case 1:
    case 2: return {0.3};
    case 3:
    case 4: return {0.3, 0.2};
    default: return {0.4};
  }
}

std::vector<std::size_t> SimModel::active_set() const {
  const bool signal = c != 0.0;
  switch (scenario) {
    case Scenario::Select5Cov: return {0, 2, 3};
    case Scenario::Select10Cov: return {0, 2, 3, 4, 8};
    case Scenario::Test2Cov:
      if (model_id == 6 || model_id == 8) return signal ? std::vector<std::size_t>{0, 1} : std::vector<std::size_t>{};
      return signal ? std::vector<std::size_t>{0, 1} : std::vector<std::size_t>{0};
    case Scenario::Test5Cov:
      if (model_id == 8) return signal ? std::vector<std::size_t>{0, 1, 2, 3, 4} : std::vector<std::size_t>{};
      if (model_id == 6) return signal ? std::vector<std::size_t>{0, 1, 2, 3, 4} : std::vector<std::size_t>{0, 1, 4};
      return signal ? std::vector<std::size_t>{0, 1, 2, 3, 4} : std::vector<std::size_t>{0, 1, 3, 4};
  }
  return {};
}

SimModel make_model(Scenario scenario, int model_id, double c) {
  if (model_id < 1 || model_id > 8) {
    throw Error(ErrorCode::InvalidArgument, "model id must be in 1..8, got " + std::to_string(model_id));
  }
  if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::InvalidArgument, "c must lie in [0,1]");
  return SimModel{scenario, model_id, c};
}

std::size_t designated_covariate(Scenario scenario) {
  switch (scenario) {
    case Scenario::Test2Cov: return 1;
    case Scenario::Test5Cov: return 2;
    default: break;
  }
  throw Error(ErrorCode::InvalidArgument, "rejection studies need a test scenario");
}

double eval_model_m(const SimModel& model, std::span<const double> x, std::span<const double> eps_lags) {
  if (x.size() != model.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "model expects " + std::to_string(model.dim()) +
                                                  " covariates, got " + std::to_string(x.size()));
  }
  double m = 0.0;
  switch (model.scenario) {
    case Scenario::Test2Cov: m = m_test2(model.model_id, model.c, x); break;
    case Scenario::Test5Cov: m = m_test5(model.model_id, model.c, x); break;
    case Scenario::Select5Cov: m = m_select5(model.model_id, x); break;
    case Scenario::Select10Cov: m = m_select10(model.model_id, x); break;
  }
  if (!eps_lags.empty()) {
    const auto alpha = model.alpha();
    if (eps_lags.size() != alpha.size()) {
      throw Error(ErrorCode::DimensionMismatch, "model has " + std::to_string(alpha.size()) + " lags");
    }
    for (std::size_t j = 0; j < alpha.size(); ++j) m += alpha[j] * eps_lags[j] * eps_lags[j];
  }
  return m;
}

ArchMxSpec make_spec(const SimModel& model, const Shock& shock, bool standardize_shocks) {
  return ArchMxSpec{model.alpha(), [model](std::span<const double> x) { return eval_model_m(model, x); },
                    shock, standardize_shocks};
}

void check_spec(const ArchMxSpec& spec, const CovariateLaw& law, std::size_t samples, std::uint64_t seed) {
  if (spec.alpha.empty()) throw Error(ErrorCode::InvalidOrder, "need at least one ARCH lag");
  for (const double a : spec.alpha) {
    if (!(a >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ARCH coefficients must be non-negative");
  }
  (void)spec.shock.variance();
  Rng rng(seed);
  const Eigen::MatrixXd rows = sample_covariate_rows(law, samples, rng);
  std::vector<double> x(law.d);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (std::size_t j = 0; j < law.d; ++j) x[j] = rows(i, static_cast<Eigen::Index>(j));
    if (!(spec.vol_fn(x) > 0.0)) {
      throw Error(ErrorCode::NonPositiveVolatility, "m(x) <= 0 at a sampled covariate vector");
    }
  }
}

SimulatedSeries simulate_arch_mx(const ArchMxSpec& spec, const CovariatePanel& panel, const CovariateLaw& law,
                                 std::uint64_t seed, std::size_t burnin) {
  if (burnin < 100) throw Error(ErrorCode::InvalidArgument, "burn-in must be at least 100");
  if (law.d != panel.dim()) throw Error(ErrorCode::DimensionMismatch, "law and panel dimensions differ");
  if (spec.alpha.empty()) throw Error(ErrorCode::InvalidOrder, "need at least one ARCH lag");
  for (const double a : spec.alpha) {
    if (!(a >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ARCH coefficients must be non-negative");
  }

  std::vector<std::string> warnings;
  const double persistence = std::accumulate(spec.alpha.begin(), spec.alpha.end(), 0.0);
  if (persistence >= 1.0) {
    warnings.push_back("sum of ARCH coefficients is " + std::to_string(persistence) +
                       " >= 1; the squared process has no finite mean");
  }

  Rng shock_rng(derive_seed(seed, {1}));
  Rng burn_rng(derive_seed(seed, {2}));
  const Eigen::MatrixXd burn_rows = sample_covariate_rows(law, burnin, burn_rng);
  const double sd = spec.standardize_shocks ? std::sqrt(spec.shock.variance()) : 1.0;

  const std::size_t p = spec.alpha.size();
  const std::size_t n = panel.rows();
  const std::size_t total = burnin + n;
  const std::vector<double> mean_x(law.d, law.mean);
  const double m_centre = spec.vol_fn(mean_x);
  const double sigma0 = persistence < 1.0 ? m_centre / (1.0 - persistence) : m_centre;

  // eps^2 history, seeded with the presample value sigma0.
  std::vector<double> eps_sq(p + total, sigma0);
  std::vector<double> out;
  out.reserve(n);
  std::vector<double> x(law.d);
  for (std::size_t t = 0; t < total; ++t) {
    // covariate row feeding eps_t is the previous one; the first step reuses burn-in row 0.
    const std::size_t row = t == 0 ? 0 : t - 1;
    for (std::size_t j = 0; j < law.d; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      x[j] = row < burnin ? burn_rows(static_cast<Eigen::Index>(row), jj)
                          : panel.matrix()(static_cast<Eigen::Index>(row - burnin), jj);
    }
    double sigma2 = spec.vol_fn(x);
    for (std::size_t j = 1; j <= p; ++j) sigma2 += spec.alpha[j - 1] * eps_sq[p + t - j];
    if (!(sigma2 > 0.0)) {
      if (!std::isfinite(sigma2)) throw Error(ErrorCode::Overflow, "volatility recursion diverged");
      throw Error(ErrorCode::NonPositiveVolatility, "sigma^2 <= 0 at step " + std::to_string(t));
    }
    const double eps = draw_shock(spec.shock, shock_rng) / sd * std::sqrt(sigma2);
    if (!std::isfinite(eps) || std::abs(eps) > 1e150) {
      throw Error(ErrorCode::Overflow, "|eps_t| exploded at step " + std::to_string(t));
    }
    eps_sq[p + t] = eps * eps;
    if (t >= burnin) out.push_back(eps);
  }
  return SimulatedSeries{ReturnSeries(std::move(out)), std::move(warnings)};
}

Design simulate_design(const SimModel& model, const Shock& shock, std::size_t n, double rho, std::uint64_t seed,
                       bool standardize_shocks, std::size_t burnin) {
  const CovariateLaw law{model.dim(), 2.5, rho};
  CovariatePanel panel = sample_covariates(law, n, derive_seed(seed, {0}));
  const auto spec = make_spec(model, shock, standardize_shocks);
  auto sim = simulate_arch_mx(spec, panel, law, derive_seed(seed, {3}), burnin);
  return Design{std::move(sim.series), std::move(panel)};
}

}  // namespace archmx::dgp
