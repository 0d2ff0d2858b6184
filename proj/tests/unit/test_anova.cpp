#include "archmx/anova.hpp"
#include "archmx/dgp.hpp"
#include "archmx/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace archmx;

namespace {

std::vector<double> iid(std::size_t n, double sd, Rng& rng) {
  std::normal_distribution<double> z(0.0, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = z(rng);
  return v;
}

WindowSet identity_windows(std::size_t n, std::size_t k) {
  std::vector<std::size_t> ord(n);
  std::iota(ord.begin(), ord.end(), std::size_t{0});
  return WindowSet(ord, k);
}

// Straight transcription of the windowed means with explicit member lists.
AnovaParts naive_anova(const std::vector<double>& v, const WindowSet& ws) {
  const auto n = static_cast<double>(v.size());
  const auto k = static_cast<double>(ws.k());
  std::vector<std::vector<double>> cells;
  for (std::size_t t = 0; t < v.size(); ++t) {
    std::vector<double> cell;
    for (const auto r : ws.members(t)) cell.push_back(v[r]);
    cells.push_back(cell);
  }
  double grand = 0.0;
  for (const auto& c : cells) grand += std::accumulate(c.begin(), c.end(), 0.0);
  grand /= n * k;
  double mst = 0.0;
  double mse = 0.0;
  for (const auto& c : cells) {
    const double m = std::accumulate(c.begin(), c.end(), 0.0) / k;
    mst += (m - grand) * (m - grand);
    for (const double x : c) mse += (x - m) * (x - m);
  }
  return {k / (n - 1.0) * mst - mse / (n * (k - 1.0)), k / (n - 1.0) * mst, mse / (n * (k - 1.0))};
}

}  // namespace

TEST_CASE("interior and edge windows") {
  const auto ws = identity_windows(5, 3);
  CHECK(ws.members(2) == std::vector<std::size_t>{1, 2, 3});
  CHECK(ws.members(0) == std::vector<std::size_t>{0, 1, 2});
  CHECK(ws.members(4) == std::vector<std::size_t>{2, 3, 4});
  const auto ws7 = identity_windows(7, 5);
  CHECK(ws7.members(1) == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(ws7.members(3) == std::vector<std::size_t>{1, 2, 3, 4, 5});
}

TEST_CASE("window construction errors") {
  const std::vector<double> x{0.3, 0.1, 0.2, 0.5};
  try {
    (void)build_windows(x, 4);
    FAIL("expected EvenWindow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EvenWindow);
  }
  try {
    (void)build_windows(x, 5);
    FAIL("expected WindowTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WindowTooLarge);
  }
}

TEST_CASE("ranking is by covariate value with stable ties") {
  const std::vector<double> x{0.5, 0.1, 0.5, -1.0, 0.1};
  const auto ws = build_windows(x, 3);
  CHECK(ws.ordering() == std::vector<std::size_t>{3, 1, 4, 0, 2});
}

TEST_CASE("constant residuals give a zero statistic") {
  const std::vector<double> v(20, 3.7);
  const auto p = anova_statistic(v, identity_windows(20, 5));
  CHECK(std::abs(p.t_n) < 1e-14);
  CHECK(std::abs(p.mst) < 1e-14);
  CHECK(std::abs(p.mse) < 1e-14);
}

TEST_CASE("three residuals by hand") {
  const std::vector<double> v{1.0, 0.0, -1.0};
  const auto p = anova_statistic(v, identity_windows(3, 3));
  CHECK(p.mst == doctest::Approx(0.0));
  CHECK(p.mse == doctest::Approx(1.0));
  CHECK(p.t_n == doctest::Approx(-1.0));
}

TEST_CASE("oracle on hand-sized inputs") {
  const auto ws = identity_windows(3, 3);
  CHECK(quadratic_form_oracle(std::vector<double>{1.0, 0.0, 0.0}, ws) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(quadratic_form_oracle(std::vector<double>(3, 0.0), ws) == 0.0);
  CHECK_THROWS_AS(quadratic_form_oracle(std::vector<double>(400, 1.0), identity_windows(400, 15)), Error);
}

TEST_CASE("statistic equals the quadratic form and the naive transcription") {
  Rng rng(17);
  std::uniform_int_distribution<std::size_t> nd(3, 200);
  std::uniform_int_distribution<std::size_t> kd(1, 7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = nd(rng);
    const std::size_t k = std::min<std::size_t>(2 * kd(rng) + 1, n % 2 == 1 ? n : n - 1);
    const auto x = iid(n, 1.0, rng);
    const auto v = iid(n, 2.0, rng);
    const auto ws = build_windows(x, k);
    const auto ranked = ws.rank_order(v);
    const auto fast = anova_statistic(ranked, ws);
    const auto slow = naive_anova(ranked, ws);
    CHECK(std::abs(fast.t_n - quadratic_form_oracle(ranked, ws)) < 1e-10);
    CHECK(std::abs(fast.mst - slow.mst) < 1e-10);
    CHECK(std::abs(fast.mse - slow.mse) < 1e-10);
  }
}

TEST_CASE("location invariance and scale equivariance") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = iid(150, 1.0, rng);
    const auto v = iid(150, 1.0, rng);
    const auto ws = build_windows(x, 9);
    const auto ranked = ws.rank_order(v);
    const double base = anova_statistic(ranked, ws).t_n;
    std::vector<double> shifted(ranked);
    for (auto& e : shifted) e += 5.0;
    CHECK(anova_statistic(shifted, ws).t_n == doctest::Approx(base).epsilon(1e-9));
    std::vector<double> scaled(ranked);
    for (auto& e : scaled) e *= 2.0;
    CHECK(anova_statistic(scaled, ws).t_n == doctest::Approx(4.0 * base).epsilon(1e-12));

    std::vector<double> v3(v);
    for (auto& e : v3) e *= 3.0;
    const auto a = test_residuals(v, x, 0, 9);
    const auto b = test_residuals(v3, x, 0, 9);
    CHECK(std::abs(a.z - b.z) <= 1e-10 * std::max(1.0, std::abs(a.z)));
  }
}

TEST_CASE("shuffling the pairs leaves the statistic unchanged") {
  Rng rng(4);
  const auto x = iid(120, 1.0, rng);
  const auto v = iid(120, 1.0, rng);
  std::vector<std::size_t> perm(120);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> xs(120);
  std::vector<double> vs(120);
  for (std::size_t i = 0; i < 120; ++i) {
    xs[i] = x[perm[i]];
    vs[i] = v[perm[i]];
  }
  const auto a = build_windows(x, 7);
  const auto b = build_windows(xs, 7);
  CHECK(anova_statistic(a.rank_order(v), a).t_n == anova_statistic(b.rank_order(vs), b).t_n);
}

TEST_CASE("difference-based variance") {
  CHECK(rice_variance(std::vector<double>(10, 4.0)) == 0.0);
  CHECK(rice_variance(std::vector<double>{0.0, 2.0}) == 2.0);
  CHECK_THROWS_AS(rice_variance(std::vector<double>{1.0}), Error);
  Rng rng(8);
  const auto v = iid(100000, 1.5, rng);
  CHECK(std::abs(rice_variance(v) - 2.25) / 2.25 < 0.02);
}

TEST_CASE("window size rule") {
  CHECK(choose_kn(1000) == 11);
  CHECK(choose_kn(10000) == 19);
  CHECK(choose_kn(50) == 5);
  CHECK(choose_kn(999) == 11);
  CHECK(choose_kn(5000) == 17);
  CHECK_THROWS_AS(choose_kn(49), Error);
  for (std::size_t n = 50; n < 3000; n += 37) CHECK(choose_kn(n) % 2 == 1);
}

TEST_CASE("standardisation and p-value") {
  CHECK(standardize(0.0, 100, 5, 1.0) == 0.0);
  CHECK(standardize(1.0, 400, 4, 1.5) == doctest::Approx(10.0 / std::sqrt(3.0)));
  CHECK(upper_p_value(0.0) == doctest::Approx(0.5));
  CHECK(upper_p_value(1.6448536269514722) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(null_variance_fixed_k(11, 2.0) == doctest::Approx(2.0 * 21.0 / 30.0 * 4.0));
}

TEST_CASE("null mean of the scaled statistic is near zero") {
  Rng rng(21);
  double sum = 0.0;
  for (int r = 0; r < 500; ++r) {
    const auto x = iid(2000, 1.0, rng);
    const auto v = iid(2000, 1.0, rng);
    const auto ws = build_windows(x, 11);
    sum += std::sqrt(2000.0 / 11.0) * anova_statistic(ws.rank_order(v), ws).t_n;
  }
  CHECK(std::abs(sum / 500.0) < 0.1);
}

TEST_CASE("null variance at fixed window size") {
  Rng rng(22);
  const std::size_t n = 5000;
  const std::size_t k = 11;
  std::vector<double> s;
  for (int r = 0; r < 2000; ++r) {
    const auto x = iid(n, 1.0, rng);
    const auto v = iid(n, 1.0, rng);
    const auto ws = build_windows(x, k);
    s.push_back(std::sqrt(static_cast<double>(n) / k) * anova_statistic(ws.rank_order(v), ws).t_n);
  }
  const double target = null_variance_fixed_k(k, 1.0);
  CHECK(std::abs(sample_variance(s) - target) / target < 0.10);
}

TEST_CASE("p-values of residuals decoupled from the covariate are uniform") {
  std::vector<double> pv;
  Rng rng(30);
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto d = dgp::simulate_design(dgp::make_model(dgp::Scenario::Test2Cov, 1, 1.0), dgp::Shock::normal(), 1000,
                                        0.0, 500 + seed);
    auto fit = fit_partially_linear(d.series, d.panel, 1, std::nullopt, 1);
    std::shuffle(fit.residuals.begin(), fit.residuals.end(), rng);
    const Eigen::VectorXd x = lagged_design(d.panel.matrix(), 1).col(1);
    pv.push_back(test_residuals(fit.residuals, std::span<const double>(x.data(), 999), 1).p_value);
  }
  CHECK(ks_statistic_uniform(pv) < 0.08);
}

TEST_CASE("test_covariate reports a consistent record") {
  const auto d = dgp::simulate_design(dgp::make_model(dgp::Scenario::Test2Cov, 1, 0.0), dgp::Shock::normal(), 600, 0.0, 5);
  const auto r = test_covariate(d.series, d.panel, 1, 1);
  CHECK(r.n_eff == 599);
  CHECK(r.k_n == choose_kn(599));
  CHECK(r.t_n == doctest::Approx(r.mst - r.mse));
  CHECK(std::abs(standardize(r.t_n, r.n_eff, r.k_n, r.tau_hat) - r.z) < 1e-12);
  CHECK(r.p_value >= 0.0);
  CHECK(r.p_value <= 1.0);
  CHECK(r.bandwidth.size() == 1);
  const auto rs = test_covariate(d.series, d.panel, 1, 1, SplineConfig{});
  CHECK(rs.bandwidth.empty());
  CHECK_THROWS_AS(test_covariate(d.series, d.panel, 2, 1), Error);
}

TEST_CASE("degenerate residuals are rejected") {
  const std::vector<double> v(60, 1.0);
  std::vector<double> x(60);
  std::iota(x.begin(), x.end(), 0.0);
  try {
    (void)test_residuals(v, x, 0);
    FAIL("expected DegenerateResiduals");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateResiduals);
  }
}
