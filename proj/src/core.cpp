#include "archmx/core.hpp"

#include "archmx/error.hpp"

#include <cmath>
#include <set>

namespace archmx {

ReturnSeries::ReturnSeries(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < kMinSeriesLength) {
    throw Error(ErrorCode::TooShort, "series has " + std::to_string(values_.size()) +
                                         " observations, need at least " +
                                         std::to_string(kMinSeriesLength));
  }
  for (std::size_t t = 0; t < values_.size(); ++t) {
    if (!std::isfinite(values_[t])) {
      throw Error(ErrorCode::NonFiniteData, "series value at t=" + std::to_string(t));
    }
  }
}

std::vector<double> ReturnSeries::squared() const {
  std::vector<double> out(values_.size());
  for (std::size_t t = 0; t < values_.size(); ++t) out[t] = values_[t] * values_[t];
  return out;
}

std::vector<std::string> CovariatePanel::default_names(std::size_t d) {
  std::vector<std::string> names;
  names.reserve(d);
  for (std::size_t j = 0; j < d; ++j) names.push_back("X" + std::to_string(j + 1));
  return names;
}

CovariatePanel::CovariatePanel(const Eigen::MatrixXd& matrix)
    : CovariatePanel(matrix, default_names(static_cast<std::size_t>(matrix.cols()))) {}

CovariatePanel::CovariatePanel(Eigen::MatrixXd matrix, std::vector<std::string> names)
    : matrix_(std::move(matrix)), names_(std::move(names)) {
  if (matrix_.rows() == 0 || matrix_.cols() == 0) {
    throw Error(ErrorCode::EmptyInput, "covariate panel must have at least one row and column");
  }
  if (names_.size() != dim()) {
    throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(dim()) +
                                               " column names, got " + std::to_string(names_.size()));
  }
  std::set<std::string> seen;
  for (const auto& name : names_) {
    if (!seen.insert(name).second) throw Error(ErrorCode::InvalidArgument, "duplicate column name " + name);
  }
  if (!matrix_.allFinite()) throw Error(ErrorCode::NonFiniteData, "covariate panel");
  for (Eigen::Index j = 0; j < matrix_.cols(); ++j) {
    if (matrix_.col(j).maxCoeff() == matrix_.col(j).minCoeff()) {
      throw Error(ErrorCode::DegenerateColumn, names_[static_cast<std::size_t>(j)]);
    }
  }
}

std::optional<std::size_t> CovariatePanel::find(const std::string& name) const {
  for (std::size_t j = 0; j < names_.size(); ++j) {
    if (names_[j] == name) return j;
  }
  return std::nullopt;
}

void validate_inputs(const ReturnSeries& series, const CovariatePanel& panel, std::size_t p) {
  if (series.size() != panel.rows()) {
    throw Error(ErrorCode::LengthMismatch, "series has " + std::to_string(series.size()) +
                                               " rows, panel has " + std::to_string(panel.rows()));
  }
  // p < n/10
  if (p < 1 || 10 * p >= series.size()) {
    throw Error(ErrorCode::InvalidOrder, "lag order p=" + std::to_string(p) +
                                             " must satisfy 1 <= p < n/10");
  }
}

void validate_inputs(std::span<const double> series, const Eigen::MatrixXd& panel,
                     const std::vector<std::string>& names, std::size_t p) {
  const ReturnSeries s(std::vector<double>(series.begin(), series.end()));
  if (s.size() != static_cast<std::size_t>(panel.rows())) {
    throw Error(ErrorCode::LengthMismatch, "series has " + std::to_string(s.size()) +
                                               " rows, panel has " + std::to_string(panel.rows()));
  }
  const CovariatePanel x(panel, names);
  validate_inputs(s, x, p);
}

}  // namespace archmx
