#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace transona {

enum class PValueMethod { EXACT, NORMAL_APPROX };

struct RankTestResult {
  double statistic = 0.0;  // W (Mann-Whitney U convention) or V
  double z = 0.0;
  double p = 1.0;          // two-sided
  double r = 0.0;          // |Z| / sqrt(N)
  PValueMethod method = PValueMethod::EXACT;
  std::size_t n1 = 0;
  std::size_t n2 = 0;      // 0 for the signed-rank test (n1 = retained pairs)
};

struct GlmFit {
  Eigen::VectorXd coefficients;  // intercept first
  double log_likelihood = 0.0;
  double aic = 0.0;              // 2k - 2 LL
  int k = 0;                     // parameter count
  bool converged = false;
};

struct BootstrapComparison {
  std::vector<double> aic_a;
  std::vector<double> aic_b;
  double mean_diff = 0.0;  // mean(aic_a) - mean(aic_b)
  double t = 0.0;          // Welch two-sample t
  double df = 0.0;
  double p = 1.0;
  double ci_low = 0.0;     // 95% CI of the mean difference
  double ci_high = 0.0;
  std::uint64_t seed = 0;
};

struct RateRatioResult {
  double irr = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double p = 1.0;
  bool degenerate = false;  // a zero count: CI unbounded
};

// Mann-Whitney W = rank sum of x minus n1(n1+1)/2. Exact two-sided p by
// enumeration when n1, n2 <= exact_limit and there are no ties; otherwise
// normal approximation with tie and continuity corrections.
RankTestResult wilcoxon_rank_sum(const std::vector<double>& x, const std::vector<double>& y,
                                 std::size_t exact_limit = 8);

// Zero differences dropped; V = rank sum of positive differences. Exact p by
// sign-pattern enumeration when n <= exact_limit and |d| are tie-free.
RankTestResult wilcoxon_signed_rank(const std::vector<double>& diffs,
                                    std::size_t exact_limit = 12);

// Maximum-likelihood logistic regression via IRLS; an intercept column is
// prepended. Separation leaves the converged flag unset.
GlmFit logistic_aic(const Eigen::MatrixXd& predictors, const std::vector<int>& labels);

// Unit bootstrap of two score sets against the same labels: identical resample
// indices per replicate, logistic AIC recorded for each model, Welch t-test on
// the two AIC distributions. Deterministic in (inputs, seed).
BootstrapComparison bootstrap_aic_compare(const Eigen::MatrixXd& scores_a,
                                          const Eigen::MatrixXd& scores_b,
                                          const std::vector<int>& labels,
                                          std::size_t replicates, std::uint64_t seed);

// Closed-form two-group Poisson rate-ratio with Wald CI.
RateRatioResult poisson_rate_ratio(double count1, double exposure1, double count2,
                                   double exposure2);

// Standard normal CDF.
double normal_cdf(double z);

}  // namespace transona
