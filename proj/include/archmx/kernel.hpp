#pragma once

#include "archmx/core.hpp"

#include <Eigen/Dense>

#include <span>

namespace archmx {

/// Product-kernel smoother settings; one bandwidth per covariate dimension.
struct KernelConfig {
  Eigen::VectorXd bandwidth;
  KernelType kernel = KernelType::Gaussian;
};

void validate(const KernelConfig& cfg, std::size_t dim);

/// Kernel value K_h(u) for a difference vector already divided by h. Normalising
/// constants are dropped; they cancel in the row-stochastic weights.
double kernel_value(KernelType kernel, std::span<const double> scaled_diff) noexcept;

/// Design points X_{t-1}, t = p..n-1: panel rows p-1..n-2.
Eigen::MatrixXd lagged_design(const Eigen::MatrixXd& covariates, std::size_t p);

/// Dense W = diag(K 1)^{-1} K over the given points. O(n^2) memory; meant for small n.
Eigen::MatrixXd kernel_weight_matrix(const Eigen::MatrixXd& points, const KernelConfig& cfg);

/// W over the lagged design of a panel, (n-p) x (n-p).
Eigen::MatrixXd kernel_weight_matrix(const CovariatePanel& panel, std::size_t p, const KernelConfig& cfg);

/// W * values without forming W. Exploits the symmetry of K; O(n) extra memory.
/// A points matrix with zero columns gives the flat average.
Eigen::MatrixXd kernel_smooth(const Eigen::MatrixXd& points, const KernelConfig& cfg,
                              const Eigen::MatrixXd& values);

/// Nadaraya-Watson weights of the training points at a new location x.
Eigen::VectorXd kernel_weights_at(const Eigen::MatrixXd& points, const KernelConfig& cfg,
                                  std::span<const double> x);

/// Rule of thumb h_j = 1.06 sd(X_j) (n-p)^{-1/(4+d)} on the lagged design rows.
KernelConfig select_bandwidth(const CovariatePanel& panel, std::size_t p = 1);

/// Same rule applied to an explicit design matrix (rows already lagged).
KernelConfig select_bandwidth(const Eigen::MatrixXd& points);

}  // namespace archmx
