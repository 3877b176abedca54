#include "transona/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <boost/math/distributions/students_t.hpp>

#include "transona/error.hpp"
#include "transona/rng.hpp"

namespace transona {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

constexpr double kZ975 = 1.959963984540054;

// average ranks; returns ranks aligned with values, plus tie-group sizes
std::vector<double> average_ranks(const std::vector<double>& values,
                                  std::vector<std::size_t>* tie_sizes) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    if (tie_sizes && j > i) tie_sizes->push_back(j - i + 1);
    i = j + 1;
  }
  return ranks;
}

// exact two-sided rank-sum p: DP over #ways to pick n1 of ranks 1..N with a
// given sum, compared against the observed U's distance from the mean
double exact_rank_sum_p(double u_obs, std::size_t n1, std::size_t n2) {
  const std::size_t total = n1 + n2;
  const std::size_t max_sum = total * (total + 1) / 2;
  // ways[k][s] = #subsets of size k with rank sum s
  std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(max_sum + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t rank = 1; rank <= total; ++rank)
    for (std::size_t k = std::min(n1, rank); k >= 1; --k)
      for (std::size_t s = max_sum; s >= rank; --s)
        ways[k][s] += ways[k - 1][s - rank];
  const double mean_u = static_cast<double>(n1 * n2) / 2.0;
  const double dist = std::abs(u_obs - mean_u);
  double extreme = 0.0, all = 0.0;
  const double min_sum = static_cast<double>(n1 * (n1 + 1)) / 2.0;
  for (std::size_t s = 0; s <= max_sum; ++s) {
    if (ways[n1][s] == 0.0) continue;
    all += ways[n1][s];
    const double u = static_cast<double>(s) - min_sum;
    if (std::abs(u - mean_u) >= dist - 1e-12) extreme += ways[n1][s];
  }
  return extreme / all;
}

double exact_signed_rank_p(double v_obs, std::size_t n) {
  const std::size_t max_sum = n * (n + 1) / 2;
  std::vector<double> ways(max_sum + 1, 0.0);
  ways[0] = 1.0;
  for (std::size_t rank = 1; rank <= n; ++rank)
    for (std::size_t s = max_sum; s >= rank; --s) ways[s] += ways[s - rank];
  const double mean_v = static_cast<double>(max_sum) / 2.0;
  const double dist = std::abs(v_obs - mean_v);
  double extreme = 0.0;
  for (std::size_t s = 0; s <= max_sum; ++s)
    if (std::abs(static_cast<double>(s) - mean_v) >= dist - 1e-12) extreme += ways[s];
  return extreme / std::pow(2.0, static_cast<double>(n));
}

double logistic(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double log1pexp(double eta) {
  if (eta > 30) return eta;
  return std::log1p(std::exp(eta));
}

}  // namespace

RankTestResult wilcoxon_rank_sum(const std::vector<double>& x, const std::vector<double>& y,
                                 std::size_t exact_limit) {
  if (x.empty() || y.empty()) throw DataError("wilcoxon_rank_sum: empty sample");
  const std::size_t n1 = x.size(), n2 = y.size(), total = n1 + n2;
  std::vector<double> pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::vector<std::size_t> tie_sizes;
  auto ranks = average_ranks(pooled, &tie_sizes);
  double rank_sum_x = 0.0;
  for (std::size_t i = 0; i < n1; ++i) rank_sum_x += ranks[i];
  const double u = rank_sum_x - static_cast<double>(n1 * (n1 + 1)) / 2.0;

  RankTestResult res;
  res.statistic = u;
  res.n1 = n1;
  res.n2 = n2;

  const double mean_u = static_cast<double>(n1 * n2) / 2.0;
  double tie_term = 0.0;
  for (std::size_t t : tie_sizes)
    tie_term += static_cast<double>(t * t * t - t);
  const double var =
      static_cast<double>(n1 * n2) / 12.0 *
      (static_cast<double>(total + 1) -
       tie_term / (static_cast<double>(total) * static_cast<double>(total - 1)));
  if (var > 0.0) {
    double dev = u - mean_u;
    // continuity correction toward the mean
    if (dev > 0.5) dev -= 0.5;
    else if (dev < -0.5) dev += 0.5;
    else dev = 0.0;
    res.z = dev / std::sqrt(var);
  } else {
    res.z = 0.0;
  }
  res.r = std::abs(res.z) / std::sqrt(static_cast<double>(total));

  if (n1 <= exact_limit && n2 <= exact_limit && tie_sizes.empty()) {
    res.method = PValueMethod::EXACT;
    res.p = exact_rank_sum_p(u, n1, n2);
  } else {
    res.method = PValueMethod::NORMAL_APPROX;
    res.p = 2.0 * (1.0 - normal_cdf(std::abs(res.z)));
    res.p = std::min(1.0, res.p);
  }
  return res;
}

RankTestResult wilcoxon_signed_rank(const std::vector<double>& diffs,
                                    std::size_t exact_limit) {
  std::vector<double> d;
  for (double v : diffs)
    if (v != 0.0) d.push_back(v);
  if (d.empty())
    throw DataError("wilcoxon_signed_rank: all differences are zero");
  const std::size_t n = d.size();
  std::vector<double> abs_d(n);
  for (std::size_t i = 0; i < n; ++i) abs_d[i] = std::abs(d[i]);
  std::vector<std::size_t> tie_sizes;
  auto ranks = average_ranks(abs_d, &tie_sizes);
  double v_stat = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (d[i] > 0) v_stat += ranks[i];

  RankTestResult res;
  res.statistic = v_stat;
  res.n1 = n;
  res.n2 = 0;

  const double mean_v = static_cast<double>(n * (n + 1)) / 4.0;
  double tie_term = 0.0;
  for (std::size_t t : tie_sizes)
    tie_term += static_cast<double>(t * t * t - t);
  const double var =
      static_cast<double>(n * (n + 1) * (2 * n + 1)) / 24.0 - tie_term / 48.0;
  if (var > 0.0) {
    double dev = v_stat - mean_v;
    if (dev > 0.5) dev -= 0.5;
    else if (dev < -0.5) dev += 0.5;
    else dev = 0.0;
    res.z = dev / std::sqrt(var);
  } else {
    res.z = 0.0;
  }
  res.r = std::abs(res.z) / std::sqrt(static_cast<double>(n));

  if (n <= exact_limit && tie_sizes.empty()) {
    res.method = PValueMethod::EXACT;
    res.p = exact_signed_rank_p(v_stat, n);
  } else {
    res.method = PValueMethod::NORMAL_APPROX;
    res.p = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::abs(res.z))));
  }
  return res;
}

GlmFit logistic_aic(const Eigen::MatrixXd& predictors, const std::vector<int>& labels) {
  const Eigen::Index n = predictors.rows();
  const Eigen::Index d = predictors.cols();
  if (static_cast<std::size_t>(n) != labels.size())
    throw DataError("logistic_aic: predictor/label row mismatch");
  if (n <= d + 1) throw DataError("logistic_aic: need n > d+1");
  bool any0 = false, any1 = false;
  for (int y : labels) (y ? any1 : any0) = true;
  if (!any0 || !any1) throw DataError("logistic_aic: labels contain a single class");

  Eigen::MatrixXd design(n, d + 1);
  design.col(0).setOnes();
  if (d > 0) design.rightCols(d) = predictors;
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[static_cast<std::size_t>(i)];

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d + 1);
  auto loglik = [&](const Eigen::VectorXd& b) {
    double ll = 0.0;
    Eigen::VectorXd eta = design * b;
    for (Eigen::Index i = 0; i < n; ++i) ll += y[i] * eta[i] - log1pexp(eta[i]);
    return ll;
  };
  double cur_ll = loglik(beta);
  GlmFit fit;
  const int kMaxIter = 100;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    Eigen::VectorXd eta = design * beta;
    Eigen::VectorXd p(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = logistic(eta[i]);
      w[i] = std::max(p[i] * (1.0 - p[i]), 1e-12);
    }
    Eigen::VectorXd grad = design.transpose() * (y - p);
    if (grad.norm() < 1e-8) {
      fit.converged = true;
      break;
    }
    Eigen::MatrixXd h = design.transpose() * w.asDiagonal() * design;
    h.diagonal().array() += 1e-12;
    Eigen::VectorXd step = h.ldlt().solve(grad);
    if (!step.allFinite()) break;
    double scale = 1.0;
    bool accepted = false;
    for (int half = 0; half < 40; ++half) {
      Eigen::VectorXd cand = beta + scale * step;
      const double cand_ll = loglik(cand);
      if (std::isfinite(cand_ll) && cand_ll >= cur_ll) {
        beta = std::move(cand);
        cur_ll = cand_ll;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;
  }
  fit.coefficients = beta;
  fit.log_likelihood = cur_ll;
  fit.k = static_cast<int>(d + 1);
  fit.aic = 2.0 * fit.k - 2.0 * cur_ll;
  return fit;
}

BootstrapComparison bootstrap_aic_compare(const Eigen::MatrixXd& scores_a,
                                          const Eigen::MatrixXd& scores_b,
                                          const std::vector<int>& labels,
                                          std::size_t replicates, std::uint64_t seed) {
  const Eigen::Index n = scores_a.rows();
  if (scores_b.rows() != n || static_cast<std::size_t>(n) != labels.size())
    throw DataError("bootstrap_aic_compare: unit count mismatch");
  if (n < 10) throw DataError("bootstrap_aic_compare: fewer than 10 units");
  if (replicates < 2) throw ConfigError("bootstrap_aic_compare: need >= 2 replicates");

  BootstrapComparison out;
  out.seed = seed;
  out.aic_a.reserve(replicates);
  out.aic_b.reserve(replicates);
  // replicate RNG keyed by (seed, counter) so valid replicates are
  // order-independent of skipped ones
  const std::size_t max_attempts = replicates * 200;
  std::size_t counter = 0;
  while (out.aic_a.size() < replicates) {
    if (counter >= max_attempts)
      throw NumericError("bootstrap_aic_compare: too many degenerate resamples");
    Rng rng(mix_seed(seed, counter++));
    Eigen::MatrixXd ra(n, scores_a.cols()), rb(n, scores_b.cols());
    std::vector<int> ry(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
      ra.row(i) = scores_a.row(pick);
      rb.row(i) = scores_b.row(pick);
      ry[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(pick)];
    }
    try {
      GlmFit fa = logistic_aic(ra, ry);
      GlmFit fb = logistic_aic(rb, ry);
      out.aic_a.push_back(fa.aic);
      out.aic_b.push_back(fb.aic);
    } catch (const DataError&) {
      continue;  // single-class resample
    }
  }

  auto mean_var = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s2 = 0.0;
    for (double x : v) s2 += (x - m) * (x - m);
    s2 /= static_cast<double>(v.size() - 1);
    return std::pair<double, double>(m, s2);
  };
  auto [ma, va] = mean_var(out.aic_a);
  auto [mb, vb] = mean_var(out.aic_b);
  const double na = static_cast<double>(out.aic_a.size());
  const double nb = static_cast<double>(out.aic_b.size());
  const double se2 = va / na + vb / nb;
  out.mean_diff = ma - mb;
  if (se2 > 0.0) {
    out.t = out.mean_diff / std::sqrt(se2);
    out.df = se2 * se2 /
             (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
    boost::math::students_t dist(out.df);
    out.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.t)));
    const double tq = boost::math::quantile(dist, 0.975);
    out.ci_low = out.mean_diff - tq * std::sqrt(se2);
    out.ci_high = out.mean_diff + tq * std::sqrt(se2);
  } else {
    out.t = 0.0;
    out.df = na + nb - 2.0;
    out.p = 1.0;
    out.ci_low = out.ci_high = out.mean_diff;
  }
  return out;
}

RateRatioResult poisson_rate_ratio(double count1, double exposure1, double count2,
                                   double exposure2) {
  if (exposure1 <= 0.0 || exposure2 <= 0.0)
    throw DataError("poisson_rate_ratio: exposures must be positive");
  if (count1 < 0.0 || count2 < 0.0)
    throw DataError("poisson_rate_ratio: counts must be non-negative");
  RateRatioResult res;
  const double rate1 = count1 / exposure1;
  const double rate2 = count2 / exposure2;
  if (count1 == 0.0 || count2 == 0.0) {
    res.degenerate = true;
    res.irr = rate2 > 0.0 ? rate1 / rate2 : std::numeric_limits<double>::infinity();
    res.ci_low = 0.0;
    res.ci_high = std::numeric_limits<double>::infinity();
    res.p = 1.0;
    return res;
  }
  res.irr = rate1 / rate2;
  const double se = std::sqrt(1.0 / count1 + 1.0 / count2);
  const double z = std::log(res.irr) / se;
  res.ci_low = std::exp(std::log(res.irr) - kZ975 * se);
  res.ci_high = std::exp(std::log(res.irr) + kZ975 * se);
  res.p = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::abs(z))));
  return res;
}

}  // namespace transona
