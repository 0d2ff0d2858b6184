#pragma once

#include "archmx/core.hpp"
#include "archmx/stats.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace archmx::dgp {

/// Multivariate normal law N(mean * 1, Sigma) with Sigma_ij = rho^|i-j|.
struct CovariateLaw {
  std::size_t d = 1;
  double mean = 2.5;
  double rho = 0.0;

  [[nodiscard]] Eigen::MatrixXd covariance() const;
};

CovariatePanel sample_covariates(const CovariateLaw& law, std::size_t n, std::uint64_t seed);

/// Draws n rows into a raw matrix. Used for burn-in covariates, which never form a panel.
Eigen::MatrixXd sample_covariate_rows(const CovariateLaw& law, std::size_t n, Rng& rng);

enum class ShockKind { Normal, Laplace, StudentT, ScaledT };

struct Shock {
  ShockKind kind = ShockKind::Normal;
  double scale = 1.0;  // Laplace b, or the multiplier of ScaledT
  double df = 0.0;     // StudentT / ScaledT degrees of freedom

  static Shock normal() { return {}; }
  static Shock laplace(double b) { return {ShockKind::Laplace, b, 0.0}; }
  static Shock student_t(double df) { return {ShockKind::StudentT, 1.0, df}; }
  static Shock scaled_t(double df, double scale) { return {ShockKind::ScaledT, scale, df}; }

  /// Variance of the raw draw.
  [[nodiscard]] double variance() const;
  [[nodiscard]] std::string label() const;
};

/// Parses "normal", "laplace[:b]", "t[:df]", "scaled-t[:df[:scale]]".
/// Defaults: Laplace b=0.5, t df=7, scaled-t df=7 scale=0.5.
Shock parse_shock(const std::string& text);

/// i.i.d. shocks. With standardize=true the draws are divided by the raw sd.
std::vector<double> sample_shocks(const Shock& shock, std::size_t n, std::uint64_t seed,
                                  bool standardize = false);

/// Single draw; throws InvalidDf for df <= 2.
double draw_shock(const Shock& shock, Rng& rng);

enum class Scenario { Test2Cov, Test5Cov, Select5Cov, Select10Cov };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& text);

/// One row of the simulation model tables.
struct SimModel {
  Scenario scenario = Scenario::Test2Cov;
  int model_id = 1;
  double c = 0.0;

  [[nodiscard]] std::size_t dim() const noexcept;
  [[nodiscard]] std::vector<double> alpha() const;
  /// Truly relevant covariates, 0-based. For test scenarios this depends on c.
  [[nodiscard]] std::vector<std::size_t> active_set() const;
  [[nodiscard]] bool is_selection() const noexcept {
    return scenario == Scenario::Select5Cov || scenario == Scenario::Select10Cov;
  }
};

/// Validates scenario/model/c and returns the model.
SimModel make_model(Scenario scenario, int model_id, double c = 0.0);

/// Covariate the rejection studies test: X2 in the 2-covariate design, X3 in the 5-covariate one (0-based).
std::size_t designated_covariate(Scenario scenario);

/// Table value of m(x). With eps_lags non-empty, the lag terms alpha_j eps^2_{t-j} are added,
/// giving the full conditional variance expression of the table row.
double eval_model_m(const SimModel& model, std::span<const double> x,
                    std::span<const double> eps_lags = {});

struct ArchMxSpec {
  std::vector<double> alpha;
  std::function<double(std::span<const double>)> vol_fn;
  Shock shock;
  bool standardize_shocks = false;
};

ArchMxSpec make_spec(const SimModel& model, const Shock& shock, bool standardize_shocks = false);

/// Checks alpha >= 0 and positivity of vol_fn over `samples` draws from the law.
void check_spec(const ArchMxSpec& spec, const CovariateLaw& law, std::size_t samples = 2000,
                std::uint64_t seed = 0);

inline constexpr std::size_t kDefaultBurnin = 500;

struct SimulatedSeries {
  ReturnSeries series;
  std::vector<std::string> warnings;
};

/// sigma_t^2 = sum_j alpha_j eps_{t-j}^2 + m(X_{t-1}), eps_t = z_t sigma_t.
/// Row t-1 of the panel drives eps_t; burn-in rows are drawn from `law`.
SimulatedSeries simulate_arch_mx(const ArchMxSpec& spec, const CovariatePanel& panel,
                                 const CovariateLaw& law, std::uint64_t seed,
                                 std::size_t burnin = kDefaultBurnin);

struct Design {
  ReturnSeries series;
  CovariatePanel panel;
};

/// Covariates plus series for one replication of a table model.
Design simulate_design(const SimModel& model, const Shock& shock, std::size_t n, double rho,
                       std::uint64_t seed, bool standardize_shocks = false,
                       std::size_t burnin = kDefaultBurnin);

}  // namespace archmx::dgp
