#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "transona/error.hpp"
#include "transona/rng.hpp"
#include "transona/stats.hpp"

using namespace transona;

TEST_CASE("rank sum: pinned exact fixtures") {
  SUBCASE("complete separation, n=3 vs 3") {
    auto r = wilcoxon_rank_sum({1, 2, 3}, {4, 5, 6});
    CHECK(r.statistic == 0.0);
    CHECK(r.method == PValueMethod::EXACT);
    CHECK(r.p == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("interleaved, n=2 vs 2") {
    auto r = wilcoxon_rank_sum({1, 3}, {2, 4});
    CHECK(r.statistic == 1.0);
    CHECK(r.p == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("symmetry: swapping samples mirrors W around n1*n2") {
    auto a = wilcoxon_rank_sum({1, 2, 5, 9}, {3, 4, 7});
    auto b = wilcoxon_rank_sum({3, 4, 7}, {1, 2, 5, 9});
    CHECK(a.statistic + b.statistic == doctest::Approx(12.0));
    CHECK(a.p == doctest::Approx(b.p).epsilon(1e-12));
  }
}

TEST_CASE("rank sum: exact p equals direct enumeration for small tie-free samples") {
  // independent oracle: enumerate all C(n1+n2, n1) group assignments of the
  // pooled ranks and count those at least as extreme
  Rng rng(31);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n1 = 2 + rng.below(4);
    const std::size_t n2 = 2 + rng.below(4);
    std::vector<double> pool(n1 + n2);
    for (auto& v : pool) v = rng.uniform();  // ties have probability zero
    std::vector<double> x(pool.begin(), pool.begin() + static_cast<long>(n1));
    std::vector<double> y(pool.begin() + static_cast<long>(n1), pool.end());
    auto res = wilcoxon_rank_sum(x, y);
    REQUIRE(res.method == PValueMethod::EXACT);

    std::vector<double> sorted = pool;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t total = n1 + n2;
    std::size_t extreme = 0, count = 0;
    const double mean_u = static_cast<double>(n1 * n2) / 2.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << total); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcountll(mask)) != n1) continue;
      ++count;
      double rank_sum = 0;
      for (std::size_t i = 0; i < total; ++i)
        if (mask & (std::size_t{1} << i)) rank_sum += static_cast<double>(i + 1);
      const double u = rank_sum - static_cast<double>(n1 * (n1 + 1)) / 2.0;
      if (std::abs(u - mean_u) >= std::abs(res.statistic - mean_u) - 1e-12) ++extreme;
    }
    CHECK(res.p == doctest::Approx(static_cast<double>(extreme) / count).epsilon(1e-12));
  }
}

TEST_CASE("rank sum: ties force the corrected normal approximation") {
  auto r = wilcoxon_rank_sum({1, 2, 2, 3}, {2, 4, 5, 6});
  CHECK(r.method == PValueMethod::NORMAL_APPROX);
  CHECK(r.p > 0.0);
  CHECK(r.p <= 1.0);
  CHECK(r.r == doctest::Approx(std::abs(r.z) / std::sqrt(8.0)));
  SUBCASE("identical samples give z = 0, p = 1") {
    auto s = wilcoxon_rank_sum({5, 5}, {5, 5});
    CHECK(s.z == 0.0);
    CHECK(s.p == doctest::Approx(1.0));
  }
}

TEST_CASE("signed rank: pinned fixture V=6, p=0.25") {
  auto r = wilcoxon_signed_rank({1, 2, 3});
  CHECK(r.statistic == 6.0);
  CHECK(r.method == PValueMethod::EXACT);
  CHECK(r.p == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("signed rank: exact p equals sign enumeration; zeros dropped") {
  Rng rng(77);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rng.below(8);
    std::vector<double> d(n);
    for (auto& v : d) v = rng.uniform() - 0.5;
    auto res = wilcoxon_signed_rank(d);
    REQUIRE(res.method == PValueMethod::EXACT);

    std::vector<double> abs_d(n);
    for (std::size_t i = 0; i < n; ++i) abs_d[i] = std::abs(d[i]);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return abs_d[a] < abs_d[b]; });
    const double mean_v = static_cast<double>(n * (n + 1)) / 4.0;
    std::size_t extreme = 0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      double v = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (std::size_t{1} << i)) v += static_cast<double>(i + 1);
      if (std::abs(v - mean_v) >= std::abs(res.statistic - mean_v) - 1e-12) ++extreme;
    }
    CHECK(res.p ==
          doctest::Approx(static_cast<double>(extreme) / std::pow(2.0, n)).epsilon(1e-12));
  }
  CHECK(wilcoxon_signed_rank({0.0, 1.0, -2.0}).n1 == 2);
  CHECK_THROWS_AS(wilcoxon_signed_rank({0.0, 0.0}), DataError);
}

TEST_CASE("logistic: intercept-only analytic AIC") {
  // 4 observations, half positive: LL = -4 ln 2, AIC = 2k - 2 LL = 2 + 8 ln 2
  Eigen::MatrixXd empty(4, 0);
  auto fit = logistic_aic(empty, {0, 1, 0, 1});
  CHECK(fit.converged);
  CHECK(fit.k == 1);
  CHECK(std::abs(fit.coefficients[0]) < 1e-10);
  CHECK(fit.aic == doctest::Approx(2.0 + 8.0 * std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("logistic matches a gradient-ascent oracle on random non-separable data") {
  Rng rng(2023);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 40;
    Eigen::MatrixXd x(n, 2);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = rng.normal();
      x(i, 1) = rng.normal();
      const double eta = 0.3 + 0.8 * x(i, 0) - 0.5 * x(i, 1);
      y[static_cast<std::size_t>(i)] = rng.chance(1.0 / (1.0 + std::exp(-eta))) ? 1 : 0;
    }
    bool a0 = false, a1 = false;
    for (int v : y) (v ? a1 : a0) = true;
    if (!a0 || !a1) continue;
    auto fit = logistic_aic(x, y);
    if (!fit.converged) continue;  // separable draws excluded from comparison

    // slow, independent fixed-step gradient ascent
    Eigen::MatrixXd design(n, 3);
    design.col(0).setOnes();
    design.rightCols(2) = x;
    Eigen::VectorXd yy(n);
    for (int i = 0; i < n; ++i) yy[i] = y[static_cast<std::size_t>(i)];
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(3);
    for (int it = 0; it < 200000; ++it) {
      Eigen::VectorXd eta = design * beta;
      Eigen::VectorXd p(n);
      for (int i = 0; i < n; ++i) p[i] = 1.0 / (1.0 + std::exp(-eta[i]));
      Eigen::VectorXd grad = design.transpose() * (yy - p);
      if (grad.norm() < 1e-9) break;
      beta += 0.01 * grad;
    }
    for (int j = 0; j < 3; ++j) CHECK(std::abs(fit.coefficients[j] - beta[j]) < 1e-4);
  }
}

TEST_CASE("logistic input validation") {
  Eigen::MatrixXd x(3, 2);
  x.setZero();
  CHECK_THROWS_AS(logistic_aic(x, {0, 1, 0}), DataError);      // n <= d+1
  Eigen::MatrixXd x2(5, 1);
  x2.setZero();
  CHECK_THROWS_AS(logistic_aic(x2, {1, 1, 1, 1, 1}), DataError);
  CHECK_THROWS_AS(logistic_aic(x2, {1, 0}), DataError);
}

TEST_CASE("bootstrap: deterministic in seed, sensitive to it, shares indices") {
  Rng rng(5);
  const int n = 40;
  Eigen::MatrixXd good(n, 1), noise(n, 1);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    labels[static_cast<std::size_t>(i)] = i % 2;
    good(i, 0) = labels[static_cast<std::size_t>(i)] * 2.0 + rng.normal() * 0.3;
    noise(i, 0) = rng.normal();
  }
  auto a = bootstrap_aic_compare(good, noise, labels, 200, 11);
  auto b = bootstrap_aic_compare(good, noise, labels, 200, 11);
  CHECK(a.aic_a == b.aic_a);
  CHECK(a.aic_b == b.aic_b);
  CHECK(a.t == b.t);
  auto c = bootstrap_aic_compare(good, noise, labels, 200, 12);
  CHECK(a.aic_a != c.aic_a);

  // informative predictor wins decisively
  CHECK(a.mean_diff < 0.0);
  CHECK(a.p < 0.05);
  CHECK(a.ci_high < 0.0);

  // a model compared against itself must tie exactly on every replicate,
  // which can only happen when both models see the same resample indices
  auto self = bootstrap_aic_compare(good, good, labels, 50, 3);
  for (std::size_t i = 0; i < self.aic_a.size(); ++i)
    CHECK(self.aic_a[i] == self.aic_b[i]);
}

TEST_CASE("bootstrap input validation") {
  Eigen::MatrixXd x(5, 1);
  x.setZero();
  std::vector<int> y = {0, 1, 0, 1, 0};
  CHECK_THROWS_AS(bootstrap_aic_compare(x, x, y, 100, 1), DataError);  // < 10 units
  Eigen::MatrixXd big(12, 1);
  big.setZero();
  std::vector<int> yb(12, 0);
  for (int i = 0; i < 6; ++i) yb[static_cast<std::size_t>(i)] = 1;
  CHECK_THROWS_AS(bootstrap_aic_compare(big, big, yb, 1, 1), ConfigError);
}

TEST_CASE("poisson rate ratio: pinned study-scale fixture") {
  auto r = poisson_rate_ratio(27, 66, 80, 335);
  CHECK(r.irr == doctest::Approx(1.71).epsilon(0.01));
  CHECK(r.ci_low == doctest::Approx(1.1076).epsilon(1e-3));
  CHECK(r.ci_high == doctest::Approx(2.6495).epsilon(1e-3));
  CHECK(r.p < 0.05);
  CHECK_FALSE(r.degenerate);

  SUBCASE("unit ratio") {
    auto u = poisson_rate_ratio(10, 100, 10, 100);
    CHECK(u.irr == doctest::Approx(1.0));
    CHECK(u.p == doctest::Approx(1.0));
  }
  SUBCASE("zero count degenerates") {
    auto z = poisson_rate_ratio(0, 50, 10, 100);
    CHECK(z.degenerate);
    CHECK(z.ci_low == 0.0);
    CHECK(std::isinf(z.ci_high));
  }
  SUBCASE("bad exposures") {
    CHECK_THROWS_AS(poisson_rate_ratio(1, 0, 1, 1), DataError);
    CHECK_THROWS_AS(poisson_rate_ratio(-1, 1, 1, 1), DataError);
  }
}

TEST_CASE("normal cdf sanity") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
  CHECK(normal_cdf(-8.0) < 1e-14);
}
