#include "archmx/kernel.hpp"

#include "archmx/error.hpp"

#include <cmath>
#include <vector>

namespace archmx {

namespace {

// Row-major copy of points / h so the pair loop walks contiguous memory.
std::vector<double> scaled_rows(const Eigen::MatrixXd& points, const Eigen::VectorXd& h) {
  const auto n = points.rows();
  const auto d = points.cols();
  std::vector<double> out(static_cast<std::size_t>(n * d));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) out[static_cast<std::size_t>(i * d + j)] = points(i, j) / h(j);
  }
  return out;
}

double pair_kernel(KernelType kernel, const double* a, const double* b, std::size_t d) noexcept {
  if (kernel == KernelType::Gaussian) {
    double u2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double u = a[k] - b[k];
      u2 += u * u;
    }
    // exp underflows to zero well before this
    return u2 > 1500.0 ? 0.0 : std::exp(-0.5 * u2);
  }
  double w = 1.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double u = a[k] - b[k];
    const double v = 1.0 - u * u;
    if (v <= 0.0) return 0.0;
    w *= 0.75 * v;
  }
  return w;
}

}  // namespace

void validate(const KernelConfig& cfg, std::size_t dim) {
  if (static_cast<std::size_t>(cfg.bandwidth.size()) != dim) {
    throw Error(ErrorCode::DimensionMismatch, "need " + std::to_string(dim) + " bandwidths, got " +
                                                  std::to_string(cfg.bandwidth.size()));
  }
  for (Eigen::Index j = 0; j < cfg.bandwidth.size(); ++j) {
    if (!(cfg.bandwidth(j) > 0.0) || !std::isfinite(cfg.bandwidth(j))) {
      throw Error(ErrorCode::InvalidArgument, "bandwidths must be positive and finite");
    }
  }
}

double kernel_value(KernelType kernel, std::span<const double> scaled_diff) noexcept {
  const std::vector<double> zero(scaled_diff.size(), 0.0);
  return pair_kernel(kernel, scaled_diff.data(), zero.data(), scaled_diff.size());
}

Eigen::MatrixXd lagged_design(const Eigen::MatrixXd& covariates, std::size_t p) {
  const auto n = static_cast<std::size_t>(covariates.rows());
  if (p < 1 || p >= n) throw Error(ErrorCode::InvalidOrder, "lag order out of range");
  return covariates.middleRows(static_cast<Eigen::Index>(p - 1), static_cast<Eigen::Index>(n - p));
}

Eigen::MatrixXd kernel_weight_matrix(const Eigen::MatrixXd& points, const KernelConfig& cfg) {
  const auto d = static_cast<std::size_t>(points.cols());
  validate(cfg, d);
  const auto n = points.rows();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "no design points");
  const auto z = scaled_rows(points, cfg.bandwidth);
  Eigen::MatrixXd w(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      w(i, j) = pair_kernel(cfg.kernel, &z[static_cast<std::size_t>(i) * d], &z[static_cast<std::size_t>(j) * d], d);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = w.row(i).sum();
    if (!(s > 0.0)) throw Error(ErrorCode::ZeroRowSum, "row " + std::to_string(i) + " has no kernel mass");
    w.row(i) /= s;
  }
  return w;
}

Eigen::MatrixXd kernel_weight_matrix(const CovariatePanel& panel, std::size_t p, const KernelConfig& cfg) {
  return kernel_weight_matrix(lagged_design(panel.matrix(), p), cfg);
}

Eigen::MatrixXd kernel_smooth(const Eigen::MatrixXd& points, const KernelConfig& cfg, const Eigen::MatrixXd& values) {
  const auto n = points.rows();
  if (values.rows() != n) throw Error(ErrorCode::DimensionMismatch, "values and points differ in length");
  const auto m = static_cast<std::size_t>(values.cols());
  if (points.cols() == 0) {
    Eigen::MatrixXd out(n, values.cols());
    const Eigen::RowVectorXd avg = values.colwise().mean();
    out.rowwise() = avg;
    return out;
  }
  const auto d = static_cast<std::size_t>(points.cols());
  validate(cfg, d);
  const auto z = scaled_rows(points, cfg.bandwidth);

  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> v(nn * m);
  for (std::size_t i = 0; i < nn; ++i) {
    for (std::size_t c = 0; c < m; ++c) v[i * m + c] = values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
  }
  std::vector<double> acc(nn * m, 0.0);
  std::vector<double> rowsum(nn, 0.0);
  const double self = pair_kernel(cfg.kernel, z.data(), z.data(), d);
  for (std::size_t i = 0; i < nn; ++i) {
    const double* zi = &z[i * d];
    double* ai = &acc[i * m];
    const double* vi = &v[i * m];
    double ri = self;
    for (std::size_t c = 0; c < m; ++c) ai[c] += self * vi[c];
    for (std::size_t j = i + 1; j < nn; ++j) {
      const double k = pair_kernel(cfg.kernel, zi, &z[j * d], d);
      if (k == 0.0) continue;
      ri += k;
      rowsum[j] += k;
      const double* vj = &v[j * m];
      double* aj = &acc[j * m];
      for (std::size_t c = 0; c < m; ++c) {
        ai[c] += k * vj[c];
        aj[c] += k * vi[c];
      }
    }
    rowsum[i] += ri;
  }
  Eigen::MatrixXd out(n, values.cols());
  for (std::size_t i = 0; i < nn; ++i) {
    if (!(rowsum[i] > 0.0)) throw Error(ErrorCode::ZeroRowSum, "row " + std::to_string(i) + " has no kernel mass");
    for (std::size_t c = 0; c < m; ++c) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = acc[i * m + c] / rowsum[i];
    }
  }
  return out;
}

Eigen::VectorXd kernel_weights_at(const Eigen::MatrixXd& points, const KernelConfig& cfg, std::span<const double> x) {
  const auto n = points.rows();
  if (points.cols() == 0) return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  const auto d = static_cast<std::size_t>(points.cols());
  validate(cfg, d);
  if (x.size() != d) throw Error(ErrorCode::DimensionMismatch, "query has wrong dimension");
  std::vector<double> zx(d);
  for (std::size_t k = 0; k < d; ++k) zx[k] = x[k] / cfg.bandwidth(static_cast<Eigen::Index>(k));
  const auto z = scaled_rows(points, cfg.bandwidth);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = pair_kernel(cfg.kernel, &z[static_cast<std::size_t>(i) * d], zx.data(), d);
  const double s = w.sum();
  if (!(s > 0.0)) throw Error(ErrorCode::ZeroRowSum, "no training point within kernel support of the query");
  return w / s;
}

KernelConfig select_bandwidth(const Eigen::MatrixXd& points) {
  const auto n = static_cast<double>(points.rows());
  const auto d = static_cast<double>(points.cols());
  KernelConfig cfg;
  cfg.bandwidth.resize(points.cols());
  const double rate = std::pow(n, -1.0 / (4.0 + d));
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const double mu = points.col(j).mean();
    const double var = (points.col(j).array() - mu).square().sum() / (n - 1.0);
    cfg.bandwidth(j) = 1.06 * std::sqrt(var) * rate;
  }
  return cfg;
}

KernelConfig select_bandwidth(const CovariatePanel& panel, std::size_t p) {
  return select_bandwidth(lagged_design(panel.matrix(), p));
}

}  // namespace archmx
