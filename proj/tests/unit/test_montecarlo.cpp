#include "archmx/error.hpp"
#include "archmx/montecarlo.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

using namespace archmx;
using namespace archmx::mc;

TEST_CASE("selection accounting by hand") {
  const std::vector<std::size_t> active{0, 2, 3};
  auto c = selection_metrics({0, 2, 3}, active, 5);
  CHECK((c.cs == 3 && c.is == 0 && c.ce == 2 && c.ie == 0));
  c = selection_metrics({}, active, 5);
  CHECK((c.cs == 0 && c.is == 0 && c.ce == 2 && c.ie == 3));
  c = selection_metrics({0, 1}, active, 5);
  CHECK((c.cs == 1 && c.is == 1 && c.ce == 1 && c.ie == 2));
  CHECK_THROWS_AS(selection_metrics({7}, active, 5), Error);
}

TEST_CASE("parallel_map keeps order and isolates failures") {
  const std::function<int(std::size_t)> task = [](std::size_t i) {
    if (i == 3) throw std::runtime_error("boom");
    return static_cast<int>(i * i);
  };
  for (const std::size_t workers : {1u, 3u, 8u}) {
    const auto out = parallel_map(10, workers, task);
    REQUIRE(out.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) {
      if (i == 3) {
        CHECK_FALSE(out[i].has_value());
      } else {
        CHECK(*out[i] == static_cast<int>(i * i));
      }
    }
  }
}

TEST_CASE("replication seeds depend only on their coordinates") {
  CHECK(replication_seed(1, 5, 2) == replication_seed(1, 5, 2));
  CHECK(replication_seed(1, 5, 2) != replication_seed(1, 2, 5));
  CHECK(replication_seed(1, 5, 2) != replication_seed(2, 5, 2));
}

TEST_CASE("config validation") {
  StudyConfig cfg;
  cfg.replications = 0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = StudyConfig{};
  cfg.c_grid = {0.0, 1.5};
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = StudyConfig{};
  cfg.method = "spline";
  CHECK_NOTHROW(validate(cfg));
  cfg.n = 10000;
  CHECK(is_long_running(cfg));
  CHECK_FALSE(is_long_running(StudyConfig{}));
}

TEST_CASE("one replication gives a degenerate rate") {
  StudyConfig cfg;
  cfg.replications = 1;
  cfg.n = 300;
  cfg.c_grid = {0.0, 1.0};
  const auto rows = run_rejection_study(cfg);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK((r.rate == 0.0 || r.rate == 1.0));
    CHECK(r.mc_stderr == 0.0);
    CHECK(r.valid + r.failures == 1);
  }
}

TEST_CASE("results do not depend on the worker count") {
  StudyConfig cfg;
  cfg.n = 300;
  cfg.replications = 12;
  cfg.c_grid = {0.0, 0.5};
  cfg.threads = 1;
  const auto a = run_rejection_study(cfg);
  cfg.threads = 4;
  const auto b = run_rejection_study(cfg);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].rate == b[i].rate);
    CHECK(a[i].failures == b[i].failures);
  }

  StudyConfig sel;
  sel.scenario = dgp::Scenario::Select5Cov;
  sel.n = 300;
  sel.replications = 6;
  sel.threads = 1;
  const auto m1 = run_selection_study(sel);
  sel.threads = 3;
  const auto m2 = run_selection_study(sel);
  CHECK(m1.mean_cs == m2.mean_cs);
  CHECK(m1.per_covariate_freq == m2.per_covariate_freq);
}

TEST_CASE("selection metrics satisfy the accounting identities") {
  StudyConfig cfg;
  cfg.scenario = dgp::Scenario::Select5Cov;
  cfg.n = 400;
  cfg.replications = 10;
  const auto m = run_selection_study(cfg);
  CHECK(m.valid + m.failures == 10);
  const auto& f = m.per_covariate_freq;
  CHECK(m.mean_cs == doctest::Approx(f[0] + f[2] + f[3]));
  CHECK(m.mean_is == doctest::Approx(f[1] + f[4]));
  CHECK(m.mean_cs + m.mean_ie == doctest::Approx(3.0));
  CHECK(m.mean_is + m.mean_ce == doctest::Approx(2.0));
}

TEST_CASE("strong signal raises the rejection rate") {
  StudyConfig cfg;
  cfg.n = 1000;
  cfg.replications = 60;
  cfg.c_grid = {0.0, 1.0};
  const auto rows = run_rejection_study(cfg);
  CHECK(rows[1].rate >= rows[0].rate + 0.3);
}

TEST_CASE("study estimators follow the config") {
  StudyConfig cfg;
  cfg.bandwidth = 0.4;
  const auto est = estimator_for(cfg, 2);
  REQUIRE(std::holds_alternative<KernelEstimator>(est));
  CHECK(std::get<KernelEstimator>(est).config->bandwidth.size() == 2);
  cfg.method = "spline";
  CHECK(std::holds_alternative<SplineConfig>(estimator_for(cfg, 2)));
  CHECK(worker_count(3) == 3);
}
