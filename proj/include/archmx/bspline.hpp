#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace archmx::bspline {

/// Clamped B-spline basis of a given order (order 4 = cubic) on [0,1].
class Basis {
 public:
  /// `knots` is the full clamped sequence: `order` zeros, interior knots, `order` ones.
  Basis(std::vector<double> knots, int order);

  /// Interior knots at empirical quantiles of `values` (already on [0,1]).
  static Basis from_quantiles(std::span<const double> values, std::size_t internal_knots, int order);

  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] std::size_t size() const noexcept { return knots_.size() - static_cast<std::size_t>(order_); }
  [[nodiscard]] const std::vector<double>& knots() const noexcept { return knots_; }

  /// All basis values at x (clamped into [0,1]). Non-negative, sum to one.
  [[nodiscard]] std::vector<double> evaluate(double x) const;

 private:
  std::vector<double> knots_;
  int order_;
};

/// Tensor product B_1(x_1) (x) ... (x) B_d(x_d); the last dimension varies fastest.
class TensorBasis {
 public:
  explicit TensorBasis(std::vector<Basis> factors);

  [[nodiscard]] std::size_t dim() const noexcept { return factors_.size(); }
  [[nodiscard]] std::size_t size() const noexcept;
  [[nodiscard]] const std::vector<Basis>& factors() const noexcept { return factors_; }
  [[nodiscard]] std::vector<double> evaluate(std::span<const double> x) const;

 private:
  std::vector<Basis> factors_;
};

}  // namespace archmx::bspline
