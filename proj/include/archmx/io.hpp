#pragma once

#include "archmx/core.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace archmx::io {

/// Named numeric columns read from a comma-separated file with a header row.
struct NumericFrame {
  std::optional<std::vector<std::string>> dates;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  /// Rows discarded because a used cell was empty or NA.
  std::size_t dropped_rows = 0;

  [[nodiscard]] std::size_t rows() const noexcept { return columns.empty() ? (dates ? dates->size() : 0) : columns.front().size(); }
  [[nodiscard]] const std::vector<double>& column(const std::string& name) const;
};

/// Reads `path`. `date_column` (if given) is kept as strings and must be strictly
/// increasing; `columns` restricts which numeric columns are parsed (all others if empty).
NumericFrame read_numeric_csv(const std::filesystem::path& path, const std::optional<std::string>& date_column,
                              const std::vector<std::string>& columns = {});

/// r_t = log P_t - log P_{t-1} for the named columns. Every column and the dates
/// lose their first row so the frame stays aligned.
NumericFrame apply_log_returns(const NumericFrame& frame, const std::vector<std::string>& price_columns);

struct IngestOptions {
  /// Column holding the modelled series.
  std::string series_column;
  std::vector<std::string> price_columns_to_log_return;
  std::optional<std::string> date_column;
  /// Covariate columns; every other numeric column when empty.
  std::vector<std::string> covariate_columns;
};

struct IngestedDataset {
  std::optional<std::vector<std::string>> dates;
  std::vector<double> returns;
  Eigen::MatrixXd covariates;
  std::vector<std::string> covariate_names;
  std::map<std::string, bool> transform_log;
  std::size_t dropped_rows = 0;

  [[nodiscard]] ReturnSeries series() const { return ReturnSeries(returns); }
  [[nodiscard]] CovariatePanel panel() const { return CovariatePanel(covariates, covariate_names); }
};

IngestedDataset ingest_csv(const std::filesystem::path& path, const IngestOptions& options);

/// Joins a series file and a covariate file on their date columns (or by row when
/// neither has one). Log returns are applied before the join.
IngestedDataset ingest_pair(const std::filesystem::path& series_path, const std::filesystem::path& covariates_path,
                            const std::optional<std::string>& date_column, bool series_log_returns,
                            const std::vector<std::string>& covariate_log_returns);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

void write_series_csv(const std::filesystem::path& path, std::span<const double> values,
                      const std::optional<std::vector<std::string>>& dates = std::nullopt);

void write_covariates_csv(const std::filesystem::path& path, const CovariatePanel& panel,
                          const std::optional<std::vector<std::string>>& dates = std::nullopt);

/// FNV-1a of the file bytes, hex encoded.
std::string file_hash(const std::filesystem::path& path);

/// Names of the synthetic market fixture columns: the index series followed by 11 covariates.
const std::vector<std::string>& fixture_columns();

/// Writes a synthetic daily price file with the market fixture schema. The index
/// volatility depends on lagged squared returns of a fixed subset of covariates.
void write_market_fixture(const std::filesystem::path& path, std::size_t n, std::uint64_t seed);

/// Covariates that drive the fixture's index volatility.
const std::vector<std::string>& fixture_active_columns();

}  // namespace archmx::io
