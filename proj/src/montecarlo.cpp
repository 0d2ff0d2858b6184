#include "archmx/montecarlo.hpp"

#include "archmx/error.hpp"
#include "archmx/select.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <thread>

namespace archmx::mc {

void validate(const StudyConfig& cfg) {
  if (cfg.replications < 1) throw Error(ErrorCode::InvalidArgument, "replications must be >= 1");
  (void)dgp::make_model(cfg.scenario, cfg.model_id, 0.0);
  for (const double c : cfg.c_grid) {
    if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::InvalidArgument, "c grid values must lie in [0,1]");
  }
  if (!(cfg.rho >= 0.0 && cfg.rho < 1.0)) throw Error(ErrorCode::InvalidArgument, "rho must lie in [0,1)");
  if (!(cfg.q > 0.0 && cfg.q < 1.0)) throw Error(ErrorCode::InvalidLevel, "q must lie in (0,1)");
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw Error(ErrorCode::InvalidLevel, "level must lie in (0,1)");
  if (cfg.bandwidth && !(*cfg.bandwidth > 0.0)) throw Error(ErrorCode::InvalidArgument, "bandwidth must be positive");
  if (cfg.method != "kernel" && cfg.method != "spline") {
    throw Error(ErrorCode::InvalidArgument, "method must be kernel or spline");
  }
  if (cfg.n < 10 * 2 + 1) throw Error(ErrorCode::TooShort, "sample size too small");
  (void)cfg.shock.variance();
}

bool is_long_running(const StudyConfig& cfg) { return cfg.n > 5000 || cfg.replications > 500; }

SelectionCounts selection_metrics(const std::vector<std::size_t>& selected, const std::vector<std::size_t>& active,
                                  std::size_t d) {
  const std::set<std::size_t> sel(selected.begin(), selected.end());
  const std::set<std::size_t> act(active.begin(), active.end());
  for (const auto i : sel) {
    if (i >= d) throw Error(ErrorCode::IndexOutOfRange, "selected index " + std::to_string(i));
  }
  for (const auto i : act) {
    if (i >= d) throw Error(ErrorCode::IndexOutOfRange, "active index " + std::to_string(i));
  }
  SelectionCounts c;
  for (std::size_t i = 0; i < d; ++i) {
    const bool s = sel.count(i) > 0;
    const bool a = act.count(i) > 0;
    if (s && a) ++c.cs;
    if (s && !a) ++c.is;
    if (!s && !a) ++c.ce;
    if (!s && a) ++c.ie;
  }
  return c;
}

std::uint64_t replication_seed(std::uint64_t master, std::size_t rep, std::size_t cell) {
  return derive_seed(master, {static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(cell)});
}

std::size_t worker_count(std::optional<std::size_t> requested) {
  std::size_t cap = requested.value_or(0);
  if (cap == 0) {
    if (const char* env = std::getenv("ARCHMX_THREADS")) {
      try {
        cap = static_cast<std::size_t>(std::stoul(env));
      } catch (const std::exception&) {
        cap = 0;
      }
    }
  }
  if (cap == 0) cap = std::max(1u, std::thread::hardware_concurrency());
  return cap;
}

EstimatorChoice estimator_for(const StudyConfig& cfg, std::size_t d) {
  if (cfg.method == "spline") return SplineConfig{};
  KernelEstimator est;
  if (cfg.bandwidth) est.config = KernelConfig{Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), *cfg.bandwidth)};
  return est;
}

std::vector<RejectionRow> run_rejection_study(const StudyConfig& cfg) {
  validate(cfg);
  const std::size_t target = dgp::designated_covariate(cfg.scenario);
  const std::size_t workers = worker_count(cfg.threads);
  std::vector<RejectionRow> table;
  for (std::size_t ci = 0; ci < cfg.c_grid.size(); ++ci) {
    const auto model = dgp::make_model(cfg.scenario, cfg.model_id, cfg.c_grid[ci]);
    const std::size_t p = model.alpha().size();
    const auto estimator = estimator_for(cfg, model.dim());
    const std::function<double(std::size_t)> task = [&](std::size_t rep) {
      const auto design = dgp::simulate_design(model, cfg.shock, cfg.n, cfg.rho, replication_seed(cfg.master_seed, rep, ci),
                                               cfg.standardize_shocks, cfg.burnin);
      return test_covariate(design.series, design.panel, target, p, estimator, cfg.k_n).p_value;
    };
    const auto pvals = parallel_map(cfg.replications, workers, task);

    RejectionRow row;
    row.c = cfg.c_grid[ci];
    std::size_t rejected = 0;
    for (const auto& pv : pvals) {
      if (!pv) {
        ++row.failures;
        continue;
      }
      ++row.valid;
      if (*pv < cfg.level) ++rejected;
    }
    if (row.valid > 0) {
      row.rate = static_cast<double>(rejected) / static_cast<double>(row.valid);
      row.mc_stderr = std::sqrt(row.rate * (1.0 - row.rate) / static_cast<double>(row.valid));
    }
    table.push_back(row);
  }
  return table;
}

SelectionMetrics run_selection_study(const StudyConfig& cfg) {
  validate(cfg);
  const auto model = dgp::make_model(cfg.scenario, cfg.model_id);
  if (!model.is_selection()) throw Error(ErrorCode::InvalidArgument, "selection studies need a selection scenario");
  const std::size_t d = model.dim();
  const std::size_t p = model.alpha().size();
  const auto active = model.active_set();
  const auto estimator = estimator_for(cfg, d);

  const std::function<std::vector<std::size_t>(std::size_t)> task = [&](std::size_t rep) {
    const auto design = dgp::simulate_design(model, cfg.shock, cfg.n, cfg.rho, replication_seed(cfg.master_seed, rep, 0),
                                             cfg.standardize_shocks, cfg.burnin);
    return select_variables(design.series, design.panel, p, cfg.q, estimator, cfg.k_n).selection.selected;
  };
  const auto picks = parallel_map(cfg.replications, worker_count(cfg.threads), task);

  SelectionMetrics m;
  m.per_covariate_freq.assign(d, 0.0);
  for (const auto& sel : picks) {
    if (!sel) {
      ++m.failures;
      continue;
    }
    ++m.valid;
    const auto c = selection_metrics(*sel, active, d);
    m.mean_cs += static_cast<double>(c.cs);
    m.mean_is += static_cast<double>(c.is);
    m.mean_ce += static_cast<double>(c.ce);
    m.mean_ie += static_cast<double>(c.ie);
    for (const auto i : *sel) m.per_covariate_freq[i] += 1.0;
  }
  if (m.valid > 0) {
    const auto v = static_cast<double>(m.valid);
    m.mean_cs /= v;
    m.mean_is /= v;
    m.mean_ce /= v;
    m.mean_ie /= v;
    for (auto& f : m.per_covariate_freq) f /= v;
  }
  return m;
}

}  // namespace archmx::mc
