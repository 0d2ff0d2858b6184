#include "archmx/dgp.hpp"
#include "archmx/error.hpp"
#include "archmx/select.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace archmx;

namespace {

std::vector<double> random_pvalues(Rng& rng, std::size_t d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(d);
  for (auto& v : p) {
    const double x = u(rng);
    v = x * x * x;
  }
  return p;
}

// Brute force: the largest l with p_(l) <= l q / (d H_d).
std::vector<std::size_t> brute_by(const std::vector<double>& p, double q) {
  const std::size_t d = p.size();
  std::vector<double> sorted(p);
  std::sort(sorted.begin(), sorted.end());
  std::size_t k = 0;
  for (std::size_t l = 1; l <= d; ++l) {
    if (sorted[l - 1] <= static_cast<double>(l) * q / (static_cast<double>(d) * harmonic(d))) k = l;
  }
  std::vector<std::size_t> out;
  if (k == 0) return out;
  for (std::size_t i = 0; i < d; ++i) {
    if (p[i] <= sorted[k - 1]) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_CASE("three hypotheses by hand") {
  const std::vector<double> p{0.001, 0.2, 0.9};
  const auto r = by_fdr_select(p, 0.05);
  CHECK(harmonic(3) == doctest::Approx(11.0 / 6.0));
  CHECK(r.cutoffs[0] == doctest::Approx(0.05 / 3.0 * 6.0 / 11.0));
  CHECK(r.cutoffs[1] == doctest::Approx(0.01818181818));
  CHECK(r.cutoffs[2] == doctest::Approx(0.02727272727));
  CHECK(r.k == 1);
  CHECK(r.selected == std::vector<std::size_t>{0});
}

TEST_CASE("a single hypothesis uses the plain level") {
  const auto r = by_fdr_select(std::vector<double>{0.04}, 0.05);
  CHECK(r.cutoffs[0] == doctest::Approx(0.05));
  CHECK(r.selected == std::vector<std::size_t>{0});
}

TEST_CASE("nothing passes when every p-value is one") {
  const auto r = by_fdr_select(std::vector<double>(6, 1.0), 0.05);
  CHECK(r.k == 0);
  CHECK(r.selected.empty());
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(by_fdr_select(std::vector<double>{0.1}, 0.0), Error);
  CHECK_THROWS_AS(by_fdr_select(std::vector<double>{1.2}, 0.05), Error);
  CHECK_THROWS_AS(by_adjusted_pvalues(std::vector<double>{-0.1}), Error);
  CHECK_THROWS_AS(bonferroni_select(std::vector<double>{0.1}, 1.0), Error);
}

TEST_CASE("Bonferroni by hand") {
  const std::vector<double> p{0.009, 0.2, 0.011, 0.5, 0.9};
  const auto r = bonferroni_select(p, 0.05);
  CHECK(r.cutoffs[0] == doctest::Approx(0.01));
  CHECK(r.selected == std::vector<std::size_t>{0});
  CHECK(bonferroni_select(std::vector<double>{0.04}, 0.05).selected.size() == 1);
  CHECK(bonferroni_select(std::vector<double>{0.3, 0.2}, 0.05).selected.empty());
}

TEST_CASE("adjusted p-values by hand") {
  const auto a = by_adjusted_pvalues(std::vector<double>{0.001, 0.2, 0.9});
  CHECK(a[0] == doctest::Approx(0.0055));
  CHECK(a[1] == doctest::Approx(0.55));
  CHECK(a[2] == doctest::Approx(1.0));
  const auto eq = by_adjusted_pvalues(std::vector<double>(4, 0.01));
  for (const double v : eq) CHECK(v == doctest::Approx(harmonic(4) * 0.01));
}

TEST_CASE("step-up properties over random p-vectors") {
  Rng rng(1);
  std::uniform_int_distribution<std::size_t> dd(1, 12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t d = dd(rng);
    const auto p = random_pvalues(rng, d);
    const double q = 0.01 + 0.2 * u(rng);
    const auto r = by_fdr_select(p, q);

    CHECK(r.selected.size() == r.k);
    CHECK(r.selected == brute_by(p, q));

    std::vector<std::size_t> dual;
    for (std::size_t i = 0; i < d; ++i) {
      if (r.adjusted[i] <= q) dual.push_back(i);
    }
    CHECK(dual == r.selected);

    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        if (p[i] < p[j]) CHECK(r.adjusted[i] <= r.adjusted[j]);
      }
    }

    auto lowered = p;
    const std::size_t i = static_cast<std::size_t>(u(rng) * static_cast<double>(d)) % d;
    lowered[i] *= u(rng);
    const auto r2 = by_fdr_select(lowered, q);
    CHECK(std::includes(r2.selected.begin(), r2.selected.end(), r.selected.begin(), r.selected.end()));

    const auto b = bonferroni_select(p, q);
    for (std::size_t l = 1; l <= d; ++l) {
      const bool bonf_le = b.cutoffs[l - 1] <= r.cutoffs[l - 1] * (1.0 + 1e-12);
      CHECK(bonf_le == (static_cast<double>(l) >= harmonic(d) * (1.0 - 1e-12)));
    }
  }
}

TEST_CASE("tied p-values at the boundary are selected together") {
  const auto r = by_fdr_select(std::vector<double>{0.001, 0.001, 0.5}, 0.05);
  CHECK(r.selected == std::vector<std::size_t>{0, 1});
}

TEST_CASE("select_variables tests every covariate") {
  const auto d = dgp::simulate_design(dgp::make_model(dgp::Scenario::Select5Cov, 1), dgp::Shock::normal(), 800, 0.0, 3);
  const auto run = select_variables(d.series, d.panel, 1, 0.05);
  CHECK(run.tests.size() == 5);
  for (std::size_t l = 0; l < 5; ++l) {
    CHECK(run.tests[l].covariate == l);
    CHECK(run.selection.p_values[l] == run.tests[l].p_value);
  }
}
