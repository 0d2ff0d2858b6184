#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace archmx {

/// Smallest series length accepted by any estimation or test routine.
inline constexpr std::size_t kMinSeriesLength = 10;

/// Observed return series eps_t. Squaring happens inside the pipeline.
class ReturnSeries {
 public:
  explicit ReturnSeries(std::vector<double> values);

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double operator[](std::size_t t) const noexcept { return values_[t]; }
  [[nodiscard]] std::vector<double> squared() const;

 private:
  std::vector<double> values_;
};

/// n x d matrix of exogenous covariates with unique column names.
class CovariatePanel {
 public:
  CovariatePanel(Eigen::MatrixXd matrix, std::vector<std::string> names);

  /// Names default to X1..Xd.
  explicit CovariatePanel(const Eigen::MatrixXd& matrix);

  [[nodiscard]] std::size_t rows() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.cols()); }
  [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
  [[nodiscard]] Eigen::VectorXd column(std::size_t j) const { return matrix_.col(static_cast<Eigen::Index>(j)); }

  /// Index of a named column, or nullopt.
  [[nodiscard]] std::optional<std::size_t> find(const std::string& name) const;

  static std::vector<std::string> default_names(std::size_t d);

 private:
  Eigen::MatrixXd matrix_;
  std::vector<std::string> names_;
};

/// Checks a (series, panel, lag order) triple. Throws archmx::Error on the first violation.
void validate_inputs(const ReturnSeries& series, const CovariatePanel& panel, std::size_t p);

/// Same check starting from raw data; type construction errors surface here too.
void validate_inputs(std::span<const double> series, const Eigen::MatrixXd& panel,
                     const std::vector<std::string>& names, std::size_t p);

enum class KernelType { Gaussian, Epanechnikov };

struct KernelMethod {
  Eigen::VectorXd bandwidth;
  KernelType kernel = KernelType::Gaussian;
};

struct SplineMethod {
  std::vector<std::vector<double>> knots;  // full clamped knot vector per dimension, on [0,1]
  int order = 4;
};

/// Fitted nonparametric part m-hat; evaluates on the covariates the fit used.
class VolatilityFunction {
 public:
  virtual ~VolatilityFunction() = default;
  [[nodiscard]] virtual std::size_t dim() const noexcept = 0;
  [[nodiscard]] virtual double operator()(std::span<const double> x) const = 0;
};

struct FittedModel {
  std::size_t p = 1;
  std::vector<double> alpha_hat;
  std::shared_ptr<const VolatilityFunction> m_hat;
  /// v-hat_t for t = p..n-1, time order.
  std::vector<double> residuals;
  std::variant<KernelMethod, SplineMethod> method;
  std::optional<std::size_t> excluded;
  /// Panel columns the fit conditioned on, in order.
  std::vector<std::size_t> covariates_used;
  std::vector<std::string> warnings;
  /// QMLE objective at the optimum (spline fits only).
  std::optional<double> objective;
};

}  // namespace archmx
