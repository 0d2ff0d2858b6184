#include "archmx/select.hpp"

#include "archmx/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace archmx {

namespace {

void check_level(double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::InvalidLevel, "level must lie in (0,1)");
}

void check_pvalues(std::span<const double> p) {
  if (p.empty()) throw Error(ErrorCode::EmptyInput, "no p-values");
  for (const double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::InvalidPValue, "p-value " + std::to_string(v));
  }
}

std::vector<std::size_t> ascending_order(std::span<const double> p) {
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  return order;
}

}  // namespace

double harmonic(std::size_t d) noexcept {
  double h = 0.0;
  for (std::size_t l = 1; l <= d; ++l) h += 1.0 / static_cast<double>(l);
  return h;
}

std::vector<double> by_adjusted_pvalues(std::span<const double> p_values) {
  check_pvalues(p_values);
  const std::size_t d = p_values.size();
  const double scale = static_cast<double>(d) * harmonic(d);
  const auto order = ascending_order(p_values);
  std::vector<double> adjusted(d);
  double running = 1.0;
  for (std::size_t r = d; r-- > 0;) {
    const double v = scale / static_cast<double>(r + 1) * p_values[order[r]];
    running = std::min(running, v);
    adjusted[order[r]] = std::min(1.0, running);
  }
  return adjusted;
}

SelectionResult by_fdr_select(std::span<const double> p_values, double q) {
  check_level(q);
  check_pvalues(p_values);
  const std::size_t d = p_values.size();
  const double h = harmonic(d);

  SelectionResult r;
  r.q = q;
  r.p_values.assign(p_values.begin(), p_values.end());
  r.order = ascending_order(p_values);
  r.cutoffs.resize(d);
  for (std::size_t l = 1; l <= d; ++l) {
    r.cutoffs[l - 1] = static_cast<double>(l) / static_cast<double>(d) * q / h;
  }
  for (std::size_t l = d; l >= 1; --l) {
    if (p_values[r.order[l - 1]] <= r.cutoffs[l - 1]) {
      r.k = l;
      break;
    }
  }
  r.selected.assign(r.order.begin(), r.order.begin() + static_cast<std::ptrdiff_t>(r.k));
  std::sort(r.selected.begin(), r.selected.end());
  r.adjusted = by_adjusted_pvalues(p_values);
  return r;
}

SelectionResult bonferroni_select(std::span<const double> p_values, double alpha) {
  check_level(alpha);
  check_pvalues(p_values);
  const std::size_t d = p_values.size();
  const double cut = alpha / static_cast<double>(d);

  SelectionResult r;
  r.q = alpha;
  r.p_values.assign(p_values.begin(), p_values.end());
  r.order = ascending_order(p_values);
  r.cutoffs.assign(d, cut);
  for (std::size_t l = 0; l < d; ++l) {
    if (p_values[l] <= cut) r.selected.push_back(l);
  }
  r.k = r.selected.size();
  r.adjusted.resize(d);
  for (std::size_t l = 0; l < d; ++l) r.adjusted[l] = std::min(1.0, static_cast<double>(d) * p_values[l]);
  return r;
}

SelectionRun select_variables(const ReturnSeries& series, const CovariatePanel& panel, std::size_t p, double q,
                              const EstimatorChoice& estimator, std::optional<std::size_t> k_n) {
  check_level(q);
  validate_inputs(series, panel, p);
  SelectionRun run;
  std::vector<double> pv;
  for (std::size_t l = 0; l < panel.dim(); ++l) {
    run.tests.push_back(test_covariate(series, panel, l, p, estimator, k_n));
    pv.push_back(run.tests.back().p_value);
  }
  run.selection = by_fdr_select(pv, q);
  return run;
}

}  // namespace archmx
