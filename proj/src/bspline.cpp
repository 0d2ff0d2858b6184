#include "archmx/bspline.hpp"

#include "archmx/error.hpp"

#include <algorithm>
#include <cmath>

namespace archmx::bspline {

Basis::Basis(std::vector<double> knots, int order) : knots_(std::move(knots)), order_(order) {
  if (order_ < 1) throw Error(ErrorCode::InvalidArgument, "spline order must be >= 1");
  const auto m = static_cast<std::size_t>(order_);
  if (knots_.size() < 2 * m) throw Error(ErrorCode::InvalidArgument, "too few knots for the spline order");
  for (std::size_t i = 0; i < m; ++i) {
    if (knots_[i] != 0.0 || knots_[knots_.size() - 1 - i] != 1.0) {
      throw Error(ErrorCode::InvalidArgument, "knot sequence must be clamped on [0,1]");
    }
  }
  for (std::size_t i = m - 1; i + m < knots_.size(); ++i) {
    if (!(knots_[i + 1] > knots_[i])) {
      throw Error(ErrorCode::InvalidArgument, "interior knots must be strictly increasing inside (0,1)");
    }
  }
}

Basis Basis::from_quantiles(std::span<const double> values, std::size_t internal_knots, int order) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "no data for knot placement");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> knots(static_cast<std::size_t>(order), 0.0);
  const double last = static_cast<double>(sorted.size() - 1);
  for (std::size_t k = 1; k <= internal_knots; ++k) {
    // linear-interpolated quantile at k/(N+1)
    const double pos = last * static_cast<double>(k) / static_cast<double>(internal_knots + 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    knots.push_back(sorted[lo] + frac * (sorted[hi] - sorted[lo]));
  }
  knots.insert(knots.end(), static_cast<std::size_t>(order), 1.0);
  return Basis(std::move(knots), order);
}

std::vector<double> Basis::evaluate(double x) const {
  x = std::clamp(x, 0.0, 1.0);
  const auto m = static_cast<std::size_t>(order_);
  const std::size_t nb = size();
  // knot span: largest i with knots[i] <= x < knots[i+1], restricted to the non-degenerate range
  std::size_t span = m - 1;
  while (span + 1 < nb && knots_[span + 1] <= x) ++span;

  // Cox-de Boor on the m non-zero functions of the span
  std::vector<double> local(m, 0.0);
  local[0] = 1.0;
  for (std::size_t k = 1; k < m; ++k) {
    double saved = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      const double right = knots_[span + r + 1];
      const double left = knots_[span + 1 + r - k];
      const double denom = right - left;
      const double tmp = denom > 0.0 ? local[r] / denom : 0.0;
      local[r] = saved + (right - x) * tmp;
      saved = (x - left) * tmp;
    }
    local[k] = saved;
  }
  std::vector<double> out(nb, 0.0);
  for (std::size_t r = 0; r < m; ++r) out[span + 1 - m + r] = local[r];
  return out;
}

TensorBasis::TensorBasis(std::vector<Basis> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw Error(ErrorCode::InvalidArgument, "tensor basis needs at least one factor");
}

std::size_t TensorBasis::size() const noexcept {
  std::size_t k = 1;
  for (const auto& f : factors_) k *= f.size();
  return k;
}

std::vector<double> TensorBasis::evaluate(std::span<const double> x) const {
  if (x.size() != factors_.size()) throw Error(ErrorCode::DimensionMismatch, "tensor basis query dimension");
  std::vector<double> out{1.0};
  for (std::size_t l = 0; l < factors_.size(); ++l) {
    const auto b = factors_[l].evaluate(x[l]);
    std::vector<double> next;
    next.reserve(out.size() * b.size());
    for (const double a : out) {
      for (const double v : b) next.push_back(a * v);
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace archmx::bspline
