#include "archmx/anova.hpp"
#include "archmx/dgp.hpp"
#include "archmx/estimate.hpp"
#include "archmx/montecarlo.hpp"
#include "archmx/select.hpp"
#include "archmx/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace archmx;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

template <typename... Args>
std::string fmt(const char* pattern, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

std::size_t workers() { return mc::worker_count(std::nullopt); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <typename T>
std::vector<T> collect(const std::vector<std::optional<T>>& slots, std::size_t& failures) {
  std::vector<T> out;
  failures = 0;
  for (const auto& s : slots) {
    if (s) {
      out.push_back(*s);
    } else {
      ++failures;
    }
  }
  return out;
}

// Rejection indicator for the designated covariate of the 2-covariate design.
TestResult null_test(int model, double c, std::size_t n, std::uint64_t seed) {
  const auto design = dgp::simulate_design(dgp::make_model(dgp::Scenario::Test2Cov, model, c), dgp::Shock::normal(), n,
                                           0.0, seed);
  return test_covariate(design.series, design.panel, dgp::designated_covariate(dgp::Scenario::Test2Cov), 1);
}

Outcome oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(20240101);
  std::uniform_int_distribution<std::size_t> nd(5, 200);
  std::normal_distribution<double> z;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = nd(rng);
    std::size_t k_max = n / 10;
    if (k_max % 2 == 0) k_max = k_max == 0 ? 0 : k_max - 1;
    k_max = std::max<std::size_t>(k_max, 3);
    const std::size_t k = 3 + 2 * std::uniform_int_distribution<std::size_t>(0, (k_max - 3) / 2)(rng);
    std::vector<double> x(n);
    std::vector<double> v(n);
    for (auto& e : x) e = z(rng);
    for (auto& e : v) e = 2.0 * z(rng);
    const auto ws = build_windows(x, k);
    const auto ranked = ws.rank_order(v);
    const double fast = anova_statistic(ranked, ws).t_n;
    const double slow = quadratic_form_oracle(ranked, ws, n * k);
    worst = std::max(worst, std::abs(fast - slow));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 1e-10 && secs < 10.0, fmt("max |T - V'AV| = %.3g over 1000 instances in %.2f s", worst, secs)};
}

Outcome null_size() {
  mc::StudyConfig cfg;
  cfg.n = 1000;
  cfg.replications = 500;
  cfg.c_grid = {0.0};
  cfg.master_seed = 2002;
  const auto row = mc::run_rejection_study(cfg).front();
  return {row.rate >= 0.02 && row.rate <= 0.09,
          fmt("rejection rate %.3f (se %.3f, %zu failures), required [0.02, 0.09]", row.rate, row.mc_stderr,
              row.failures)};
}

Outcome null_shape() {
  const std::function<double(std::size_t)> z_task = [](std::size_t r) {
    return null_test(1, 0.0, 1000, mc::replication_seed(3003, r)).z;
  };
  std::size_t z_fail = 0;
  const auto zs = collect(mc::parallel_map(1000, workers(), z_task), z_fail);
  const double ks = ks_statistic_normal(zs);
  const double ks_p = kolmogorov_pvalue(ks, zs.size());

  struct Scaled {
    double stat;
    double predicted;
  };
  const std::function<Scaled(std::size_t)> v_task = [](std::size_t r) {
    const auto t = null_test(1, 0.0, 5000, mc::replication_seed(3004, r));
    const double scale = std::sqrt(static_cast<double>(t.n_eff) / static_cast<double>(t.k_n));
    return Scaled{scale * t.t_n, null_variance_fixed_k(t.k_n, t.tau_hat)};
  };
  std::size_t v_fail = 0;
  const auto vs = collect(mc::parallel_map(1000, workers(), v_task), v_fail);
  std::vector<double> stats;
  double predicted = 0.0;
  for (const auto& s : vs) {
    stats.push_back(s.stat);
    predicted += s.predicted;
  }
  predicted /= static_cast<double>(vs.size());
  const double observed = sample_variance(stats);
  const double rel = std::abs(observed - predicted) / predicted;
  return {ks_p > 0.01 && rel <= 0.10,
          fmt("KS D = %.4f (p = %.3f, R = %zu); var sqrt(n/k)T = %.4g vs predicted %.4g (rel %.3f, R = %zu)", ks,
              ks_p, zs.size(), observed, predicted, rel, vs.size())};
}

Outcome power_monotone() {
  const std::vector<double> grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  constexpr std::size_t reps = 500;
  bool ok = true;
  std::string detail;
  for (const int model : {1, 2, 5}) {
    const std::function<std::vector<int>(std::size_t)> task = [&](std::size_t r) {
      std::vector<int> rejected;
      const auto seed = mc::replication_seed(4004, r, static_cast<std::size_t>(model));
      for (const double c : grid) rejected.push_back(null_test(model, c, 1000, seed).p_value < 0.05 ? 1 : 0);
      return rejected;
    };
    std::size_t fails = 0;
    const auto rows = collect(mc::parallel_map(reps, workers(), task), fails);
    std::vector<double> rate(grid.size(), 0.0);
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < grid.size(); ++i) rate[i] += row[i];
    }
    for (auto& r : rate) r /= static_cast<double>(rows.size());
    double running_max = 0.0;
    bool mono = true;
    for (const double r : rate) {
      if (r < running_max - 0.05) mono = false;
      running_max = std::max(running_max, r);
    }
    const bool strong = rate.back() > 0.8;
    ok = ok && mono && strong && !rows.empty();
    detail += fmt("M%d [", model);
    for (std::size_t i = 0; i < rate.size(); ++i) detail += fmt(i == 0 ? "%.2f" : " %.2f", rate[i]);
    detail += fmt("]%s%s; ", mono ? "" : " non-monotone", strong ? "" : " weak at c=1");
  }
  detail += fmt("R = %zu common draws per c", reps);
  return {ok, detail};
}

mc::StudyConfig selection_config(std::size_t n, std::uint64_t seed) {
  mc::StudyConfig cfg;
  cfg.scenario = dgp::Scenario::Select5Cov;
  cfg.model_id = 1;
  cfg.n = n;
  cfg.replications = 200;
  cfg.master_seed = seed;
  return cfg;
}

Outcome selection_frequencies() {
  const auto m = mc::run_selection_study(selection_config(5000, 5005));
  const std::vector<double> target{0.995, 0.025, 1.000, 0.990, 0.010};
  bool ok = m.valid > 0;
  std::string freq;
  for (std::size_t l = 0; l < target.size(); ++l) {
    ok = ok && std::abs(m.per_covariate_freq[l] - target[l]) <= 0.07;
    freq += fmt(l == 0 ? "%.3f" : " %.3f", m.per_covariate_freq[l]);
  }
  return {ok, fmt("frequencies (%s) vs (0.995 0.025 1.000 0.990 0.010), valid %zu, failures %zu", freq.c_str(),
                  m.valid, m.failures)};
}

Outcome selection_metrics_large() {
  const auto m = mc::run_selection_study(selection_config(10000, 6006));
  const bool ok = m.valid > 0 && std::abs(m.mean_cs - 3.0) <= 0.15 && std::abs(m.mean_is - 0.06) <= 0.15;
  return {ok, fmt("n = 10000: C.S. = %.3f, I.S. = %.3f vs (3.00, 0.06) +- 0.15, valid %zu", m.mean_cs, m.mean_is,
                  m.valid)};
}

Outcome fdr_control() {
  const std::function<int(std::size_t)> task = [](std::size_t r) {
    const auto seed = mc::replication_seed(7007, r);
    const dgp::CovariateLaw law{5, 2.5, 0.0};
    const auto panel = dgp::sample_covariates(law, 1000, derive_seed(seed, {1}));
    const dgp::ArchMxSpec spec{{0.3}, [](std::span<const double>) { return 0.2; }, dgp::Shock::normal(), false};
    const auto sim = dgp::simulate_arch_mx(spec, panel, law, derive_seed(seed, {2}));
    const auto run = select_variables(sim.series, panel, 1, 0.05);
    return run.selection.selected.empty() ? 0 : 1;
  };
  std::size_t fails = 0;
  const auto any = collect(mc::parallel_map(1000, workers(), task), fails);
  double fdr = 0.0;
  for (const int a : any) fdr += a;
  fdr /= static_cast<double>(any.size());
  return {!any.empty() && fdr <= 0.08,
          fmt("empirical FDR %.3f over %zu replications (%zu failures), required <= 0.08", fdr, any.size(), fails)};
}

Outcome estimator_consistency() {
  auto errors_at = [](std::size_t n) {
    const std::function<double(std::size_t)> task = [n](std::size_t r) {
      const auto d = dgp::simulate_design(dgp::make_model(dgp::Scenario::Test2Cov, 1, 0.0), dgp::Shock::normal(), n,
                                          0.0, mc::replication_seed(8008, r));
      return std::abs(fit_partially_linear(d.series, d.panel, 1).alpha_hat[0] - 0.3);
    };
    std::size_t fails = 0;
    return collect(mc::parallel_map(100, workers(), task), fails);
  };
  const double small = median(errors_at(1000));
  const double large = median(errors_at(4000));
  const double ratio = large / small;
  return {ratio >= 0.35 && ratio <= 0.65,
          fmt("median |alpha - 0.3|: %.4f at n=1000, %.4f at n=4000, ratio %.3f, required 0.5 +- 30%% [0.35, 0.65]",
              small, large, ratio)};
}

Outcome rice_accuracy() {
  Rng rng(9009);
  const double sigma2 = 4.0;
  std::normal_distribution<double> z(0.0, std::sqrt(sigma2));
  std::vector<double> v(100000);
  for (auto& e : v) e = z(rng);
  const double rel = std::abs(rice_variance(v) - sigma2) / sigma2;
  return {rel < 0.02, fmt("relative error %.4f at n = 100000", rel)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"null size", null_size},
      {"null distribution shape", null_shape},
      {"power monotonicity", power_monotone},
      {"selection frequencies", selection_frequencies},
      {"selection metrics", selection_metrics_large},
      {"FDR control", fdr_control},
      {"estimator consistency", estimator_consistency},
      {"Rice estimator", rice_accuracy},
  };
  std::set<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(static_cast<std::size_t>(std::atoi(argv[i])));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && only.count(i + 1) == 0) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("AC%zu %s %s: %s [%.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
