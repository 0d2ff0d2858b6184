#include "archmx/io.hpp"

#include "archmx/error.hpp"
#include "archmx/stats.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

namespace archmx::io {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '"')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '"')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      cells.push_back(trim(std::string_view(line).substr(pos)));
      break;
    }
    cells.push_back(trim(std::string_view(line).substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return cells;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "null";
}

std::optional<double> parse_number(const std::string& cell) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool dates_increasing(const std::vector<std::string>& dates) {
  bool numeric = true;
  std::vector<double> nums;
  nums.reserve(dates.size());
  for (const auto& d : dates) {
    const auto v = parse_number(d);
    if (!v) {
      numeric = false;
      break;
    }
    nums.push_back(*v);
  }
  for (std::size_t i = 1; i < dates.size(); ++i) {
    const bool ok = numeric ? nums[i] > nums[i - 1] : dates[i] > dates[i - 1];
    if (!ok) return false;
  }
  return true;
}

std::size_t header_index(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorCode::MissingColumn, "missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path.string());
  return out;
}

}  // namespace

const std::vector<double>& NumericFrame::column(const std::string& name) const {
  return columns[header_index(names, name)];
}

NumericFrame read_numeric_csv(const std::filesystem::path& path, const std::optional<std::string>& date_column,
                              const std::vector<std::string>& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::EmptyInput, "missing header row in " + path.string());
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
  const auto header = split_line(line);

  std::optional<std::size_t> date_idx;
  if (date_column) date_idx = header_index(header, *date_column);

  NumericFrame frame;
  std::vector<std::size_t> used;
  if (columns.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (date_idx && i == *date_idx) continue;
      used.push_back(i);
      frame.names.push_back(header[i]);
    }
  } else {
    for (const auto& name : columns) {
      used.push_back(header_index(header, name));
      frame.names.push_back(name);
    }
  }
  frame.columns.resize(used.size());
  if (date_idx) frame.dates.emplace();

  std::size_t row = 0;
  std::vector<double> values(used.size());
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    bool missing = false;
    for (std::size_t j = 0; j < used.size(); ++j) {
      const std::size_t c = used[j];
      if (c >= cells.size() || is_missing(cells[c])) {
        missing = true;
        continue;
      }
      const auto v = parse_number(cells[c]);
      if (!v) {
        throw Error(ErrorCode::NonNumericCell,
                    "non-numeric cell at row " + std::to_string(row) + ", column '" + header[c] + "'");
      }
      values[j] = *v;
    }
    if (date_idx && (*date_idx >= cells.size() || cells[*date_idx].empty())) missing = true;
    if (missing) {
      ++frame.dropped_rows;
      continue;
    }
    for (std::size_t j = 0; j < used.size(); ++j) frame.columns[j].push_back(values[j]);
    if (date_idx) frame.dates->push_back(cells[*date_idx]);
  }
  if (frame.dates && !dates_increasing(*frame.dates)) {
    throw Error(ErrorCode::InvalidArgument, "date column '" + *date_column + "' is not strictly increasing");
  }
  return frame;
}

NumericFrame apply_log_returns(const NumericFrame& frame, const std::vector<std::string>& price_columns) {
  std::vector<bool> transform(frame.names.size(), false);
  for (const auto& name : price_columns) transform[header_index(frame.names, name)] = true;

  NumericFrame out;
  out.names = frame.names;
  out.dropped_rows = frame.dropped_rows;
  const std::size_t n = frame.rows();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "no rows to transform");
  if (frame.dates) out.dates.emplace(frame.dates->begin() + 1, frame.dates->end());
  out.columns.resize(frame.columns.size());
  for (std::size_t j = 0; j < frame.columns.size(); ++j) {
    const auto& col = frame.columns[j];
    auto& dst = out.columns[j];
    dst.reserve(n - 1);
    if (!transform[j]) {
      dst.assign(col.begin() + 1, col.end());
      continue;
    }
    for (std::size_t t = 0; t < n; ++t) {
      if (!(col[t] > 0.0)) {
        throw Error(ErrorCode::NonPositivePrice,
                    "non-positive price in column '" + frame.names[j] + "' at row " + std::to_string(t + 1));
      }
    }
    for (std::size_t t = 1; t < n; ++t) dst.push_back(std::log(col[t]) - std::log(col[t - 1]));
  }
  return out;
}

IngestedDataset ingest_csv(const std::filesystem::path& path, const IngestOptions& options) {
  std::vector<std::string> wanted;
  if (!options.covariate_columns.empty()) {
    wanted.push_back(options.series_column);
    wanted.insert(wanted.end(), options.covariate_columns.begin(), options.covariate_columns.end());
  }
  auto frame = read_numeric_csv(path, options.date_column, wanted);
  const std::size_t series_idx = header_index(frame.names, options.series_column);
  for (const auto& name : options.price_columns_to_log_return) (void)header_index(frame.names, name);
  if (!options.price_columns_to_log_return.empty()) frame = apply_log_returns(frame, options.price_columns_to_log_return);

  IngestedDataset ds;
  ds.dates = frame.dates;
  ds.dropped_rows = frame.dropped_rows;
  ds.returns = frame.columns[series_idx];
  std::vector<std::size_t> cov_idx;
  for (std::size_t j = 0; j < frame.names.size(); ++j) {
    if (j == series_idx) continue;
    cov_idx.push_back(j);
    ds.covariate_names.push_back(frame.names[j]);
  }
  ds.covariates.resize(static_cast<Eigen::Index>(ds.returns.size()), static_cast<Eigen::Index>(cov_idx.size()));
  for (std::size_t j = 0; j < cov_idx.size(); ++j) {
    const auto& col = frame.columns[cov_idx[j]];
    for (std::size_t t = 0; t < col.size(); ++t) ds.covariates(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = col[t];
  }
  for (const auto& name : frame.names) {
    ds.transform_log[name] = std::find(options.price_columns_to_log_return.begin(),
                                       options.price_columns_to_log_return.end(),
                                       name) != options.price_columns_to_log_return.end();
  }
  return ds;
}

IngestedDataset ingest_pair(const std::filesystem::path& series_path, const std::filesystem::path& covariates_path,
                            const std::optional<std::string>& date_column, bool series_log_returns,
                            const std::vector<std::string>& covariate_log_returns) {
  auto sframe = read_numeric_csv(series_path, date_column);
  if (sframe.names.size() != 1) {
    throw Error(ErrorCode::InvalidArgument, "series file must hold exactly one value column besides the date");
  }
  if (series_log_returns) sframe = apply_log_returns(sframe, sframe.names);
  auto cframe = read_numeric_csv(covariates_path, date_column);
  if (cframe.names.empty()) throw Error(ErrorCode::EmptyInput, "covariate file has no value columns");
  if (!covariate_log_returns.empty()) cframe = apply_log_returns(cframe, covariate_log_returns);

  IngestedDataset ds;
  ds.dropped_rows = sframe.dropped_rows + cframe.dropped_rows;
  ds.covariate_names = cframe.names;
  ds.transform_log[sframe.names.front()] = series_log_returns;
  for (const auto& name : cframe.names) {
    ds.transform_log[name] = std::find(covariate_log_returns.begin(), covariate_log_returns.end(), name) !=
                             covariate_log_returns.end();
  }

  std::vector<std::pair<std::size_t, std::size_t>> rows;
  if (sframe.dates && cframe.dates) {
    const auto& sd = *sframe.dates;
    const auto& cd = *cframe.dates;
    ds.dates.emplace();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < sd.size() && j < cd.size()) {
      if (sd[i] == cd[j]) {
        rows.emplace_back(i, j);
        ds.dates->push_back(sd[i]);
        ++i;
        ++j;
      } else if (sd[i] < cd[j]) {
        ++i;
      } else {
        ++j;
      }
    }
    ds.dropped_rows += (sd.size() - rows.size()) + (cd.size() - rows.size());
  } else {
    if (sframe.rows() != cframe.rows()) {
      throw Error(ErrorCode::LengthMismatch, "series has " + std::to_string(sframe.rows()) + " rows, covariates " +
                                                 std::to_string(cframe.rows()));
    }
    for (std::size_t t = 0; t < sframe.rows(); ++t) rows.emplace_back(t, t);
  }

  ds.returns.reserve(rows.size());
  ds.covariates.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cframe.names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    ds.returns.push_back(sframe.columns.front()[rows[r].first]);
    for (std::size_t j = 0; j < cframe.names.size(); ++j) {
      ds.covariates(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = cframe.columns[j][rows[r].second];
    }
  }
  return ds;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw Error(ErrorCode::Overflow, "cannot format value");
  return std::string(buf, ptr);
}

void write_series_csv(const std::filesystem::path& path, std::span<const double> values,
                      const std::optional<std::vector<std::string>>& dates) {
  if (dates && dates->size() != values.size()) throw Error(ErrorCode::LengthMismatch, "dates and values differ in length");
  auto out = open_out(path);
  out << "date,value\n";
  for (std::size_t t = 0; t < values.size(); ++t) {
    out << (dates ? (*dates)[t] : std::to_string(t + 1)) << ',' << format_double(values[t]) << '\n';
  }
}

void write_covariates_csv(const std::filesystem::path& path, const CovariatePanel& panel,
                          const std::optional<std::vector<std::string>>& dates) {
  const std::size_t n = panel.rows();
  if (dates && dates->size() != n) throw Error(ErrorCode::LengthMismatch, "dates and rows differ in length");
  auto out = open_out(path);
  out << "date";
  for (const auto& name : panel.names()) out << ',' << name;
  out << '\n';
  const auto& m = panel.matrix();
  for (std::size_t t = 0; t < n; ++t) {
    out << (dates ? (*dates)[t] : std::to_string(t + 1));
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_double(m(static_cast<Eigen::Index>(t), j));
    out << '\n';
  }
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

const std::vector<std::string>& fixture_columns() {
  static const std::vector<std::string> cols{"SP500",  "China Market", "Asia Market", "Crude Oil",
                                             "USD Index", "Gold",      "Copper",      "Silver",
                                             "Steel",  "Rice",         "Wheat",       "Europe Market"};
  return cols;
}

const std::vector<std::string>& fixture_active_columns() {
  static const std::vector<std::string> cols{"Asia Market", "Crude Oil", "Gold", "Steel", "Europe Market"};
  return cols;
}

void write_market_fixture(const std::filesystem::path& path, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::TooShort, "fixture needs at least 2 rows");
  const auto& cols = fixture_columns();
  const std::size_t d = cols.size() - 1;
  std::vector<bool> active(d, false);
  for (const auto& name : fixture_active_columns()) {
    active[static_cast<std::size_t>(std::find(cols.begin() + 1, cols.end(), name) - cols.begin() - 1)] = true;
  }

  Rng rng(derive_seed(seed, {7}));
  std::normal_distribution<double> z(0.0, 1.0);
  constexpr double kCovScale = 0.01;
  constexpr double kBase = 2e-5;
  constexpr double kLoad = 0.6;
  constexpr double kArch = 0.1;

  std::vector<double> prices(cols.size(), 100.0);
  std::vector<double> prev_x(d, 0.0);
  double prev_eps = 0.0;

  using namespace std::chrono;
  sys_days cur = year_month_day{year{2010}, January, day{4}};

  auto out = open_out(path);
  out << "date";
  for (const auto& c : cols) out << ',' << c;
  out << '\n';
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) {
      double m = kBase;
      for (std::size_t j = 0; j < d; ++j) {
        if (active[j]) m += kLoad * prev_x[j] * prev_x[j];
      }
      const double eps = std::sqrt(kArch * prev_eps * prev_eps + m) * z(rng);
      prices[0] *= std::exp(eps);
      prev_eps = eps;
      for (std::size_t j = 0; j < d; ++j) {
        prev_x[j] = kCovScale * z(rng);
        prices[j + 1] *= std::exp(prev_x[j]);
      }
      do {
        cur += days{1};
      } while (weekday{cur} == Saturday || weekday{cur} == Sunday);
    }
    const year_month_day ymd{cur};
    char date[16];
    std::snprintf(date, sizeof(date), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    out << date;
    for (const double p : prices) out << ',' << format_double(p);
    out << '\n';
  }
}

}  // namespace archmx::io
