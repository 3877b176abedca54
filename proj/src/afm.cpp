#include "transona/afm.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "transona/error.hpp"

namespace transona {

namespace {

double logistic(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

// log(1 + e^eta) without overflow
double log1pexp(double eta) {
  if (eta > 30) return eta;
  return std::log1p(std::exp(eta));
}

}  // namespace

double AfmFit::delta_for(StudentId s) const {
  for (std::size_t i = 0; i < students.size(); ++i)
    if (students[i] == s) return delta[i];
  throw DataError("afm: student " + std::to_string(s) + " not in fit");
}

OpportunityTable build_opportunity_table(const std::vector<Event>& tutor_events) {
  OpportunityTable table;
  std::set<std::tuple<StudentId, std::string, std::string>> seen;  // student, problem, step
  std::map<std::pair<StudentId, std::string>, int> counters;       // student, kc -> T
  for (const auto& e : tutor_events) {
    if (e.source != EventSource::TUTOR_LOG || !e.student) continue;
    auto pit = e.payload.find("problem");
    auto sit = e.payload.find("step");
    auto kit = e.payload.find("kc");
    const std::string problem = pit == e.payload.end() ? "" : pit->second;
    const std::string step = sit == e.payload.end() ? "" : sit->second;
    if (!seen.insert({*e.student, problem, step}).second) continue;
    if (kit == e.payload.end() || kit->second.empty()) {
      ++table.skipped_missing_kc;
      continue;
    }
    OpportunityRow row;
    row.student = *e.student;
    row.kc = kit->second;
    row.opportunity = counters[{*e.student, row.kc}]++;
    row.correct = e.has_code(Code(Code::CORRECT_FIRST_ATTEMPT));
    table.rows.push_back(std::move(row));
  }
  return table;
}

AfmFit fit_iafm(const std::vector<OpportunityRow>& rows, double lambda_theta,
                double lambda_delta) {
  if (rows.empty()) throw DataError("fit_iafm: empty opportunity table");
  std::set<StudentId> student_set;
  std::set<std::string> kc_set;
  bool any_true = false, any_false = false;
  for (const auto& r : rows) {
    student_set.insert(r.student);
    kc_set.insert(r.kc);
    (r.correct ? any_true : any_false) = true;
  }
  if (student_set.size() < 2) throw DataError("fit_iafm: need at least 2 students");
  if (!any_true || !any_false) throw DataError("fit_iafm: outcomes all identical");
  if (lambda_theta < 0 || lambda_delta < 0) throw ConfigError("fit_iafm: negative penalty");

  AfmFit fit;
  fit.students.assign(student_set.begin(), student_set.end());
  fit.kcs.assign(kc_set.begin(), kc_set.end());
  fit.lambda_theta = lambda_theta;
  fit.lambda_delta = lambda_delta;
  const int S = static_cast<int>(fit.students.size());
  const int K = static_cast<int>(fit.kcs.size());
  const int P = 2 * S + 2 * K;  // theta | beta | gamma | delta

  std::map<StudentId, int> sidx;
  std::map<std::string, int> kidx;
  for (int i = 0; i < S; ++i) sidx[fit.students[i]] = i;
  for (int k = 0; k < K; ++k) kidx[fit.kcs[k]] = k;

  Eigen::VectorXd param = Eigen::VectorXd::Zero(P);
  auto theta_at = [&](int i) { return i; };
  auto beta_at = [&](int k) { return S + k; };
  auto gamma_at = [&](int k) { return S + K + k; };
  auto delta_at = [&](int i) { return S + K + K + i; };

  auto eta_of = [&](const Eigen::VectorXd& v, const OpportunityRow& r) {
    const int i = sidx[r.student];
    const int k = kidx[r.kc];
    const double t = static_cast<double>(r.opportunity);
    return v[theta_at(i)] + v[beta_at(k)] + (v[gamma_at(k)] + v[delta_at(i)]) * t;
  };

  auto penalized_ll = [&](const Eigen::VectorXd& v) {
    double ll = 0.0;
    for (const auto& r : rows) {
      const double eta = eta_of(v, r);
      ll += (r.correct ? eta : 0.0) - log1pexp(eta);
    }
    for (int i = 0; i < S; ++i)
      ll -= lambda_theta * v[theta_at(i)] * v[theta_at(i)] +
            lambda_delta * v[delta_at(i)] * v[delta_at(i)];
    return ll;
  };

  double cur_ll = penalized_ll(param);
  fit.ll_trace.push_back(cur_ll);
  Eigen::VectorXd grad(P);
  Eigen::MatrixXd hess(P, P);

  const int kMaxIter = 500;
  const double kGradTol = 1e-8;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    grad.setZero();
    hess.setZero();
    for (const auto& r : rows) {
      const int i = sidx[r.student];
      const int k = kidx[r.kc];
      const double t = static_cast<double>(r.opportunity);
      const double p = logistic(eta_of(param, r));
      const double resid = (r.correct ? 1.0 : 0.0) - p;
      const double w = p * (1.0 - p);
      const int cols[4] = {theta_at(i), beta_at(k), gamma_at(k), delta_at(i)};
      const double vals[4] = {1.0, 1.0, t, t};
      for (int a = 0; a < 4; ++a) {
        grad[cols[a]] += resid * vals[a];
        for (int b = 0; b < 4; ++b) hess(cols[a], cols[b]) += w * vals[a] * vals[b];
      }
    }
    for (int i = 0; i < S; ++i) {
      grad[theta_at(i)] -= 2.0 * lambda_theta * param[theta_at(i)];
      grad[delta_at(i)] -= 2.0 * lambda_delta * param[delta_at(i)];
      hess(theta_at(i), theta_at(i)) += 2.0 * lambda_theta;
      hess(delta_at(i), delta_at(i)) += 2.0 * lambda_delta;
    }
    if (grad.norm() < kGradTol) {
      fit.converged = true;
      break;
    }
    // unpenalized intercept collinearity leaves the Hessian near-singular at
    // lambda = 0; a hair of ridge keeps the solve defined
    hess.diagonal().array() += 1e-12;
    Eigen::VectorXd step = hess.ldlt().solve(grad);
    if (!step.allFinite()) break;
    double scale = 1.0;
    bool accepted = false;
    // near the optimum a full Newton step moves the LL by less than double
    // rounding noise; treat such steps as non-decreasing
    const double round_tol = 1e-10 * (std::abs(cur_ll) + 1.0);
    for (int half = 0; half < 40; ++half) {
      Eigen::VectorXd cand = param + scale * step;
      const double cand_ll = penalized_ll(cand);
      if (std::isfinite(cand_ll) && cand_ll + round_tol >= cur_ll) {
        param = std::move(cand);
        cur_ll = std::max(cand_ll, cur_ll);
        fit.ll_trace.push_back(cur_ll);
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;  // no ascent step found
  }

  fit.theta.resize(S);
  fit.delta.resize(S);
  fit.beta.resize(K);
  fit.gamma.resize(K);
  for (int i = 0; i < S; ++i) {
    fit.theta[i] = param[theta_at(i)];
    fit.delta[i] = param[delta_at(i)];
  }
  for (int k = 0; k < K; ++k) {
    fit.beta[k] = param[beta_at(k)];
    fit.gamma[k] = param[gamma_at(k)];
  }
  fit.penalized_ll = cur_ll;
  double ll = 0.0;
  for (const auto& r : rows) {
    const double eta = eta_of(param, r);
    ll += (r.correct ? eta : 0.0) - log1pexp(eta);
  }
  fit.log_likelihood = ll;
  return fit;
}

GroupAssignment median_split(const AfmFit& fit) {
  if (fit.students.size() < 2) throw DataError("median_split: need at least 2 students");
  std::vector<double> sorted = fit.delta;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = (n % 2 == 1) ? sorted[n / 2]
                                     : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  GroupAssignment out;
  out.split_value = median;
  std::size_t at_median = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out.groups[fit.students[i]] =
        fit.delta[i] > median ? LearningGroup::HIGH : LearningGroup::LOW;
    if (fit.delta[i] == median) ++at_median;
  }
  out.tie_warning = at_median * 5 > n;  // > 20% tied at the median
  return out;
}

const char* to_string(LearningGroup g) {
  return g == LearningGroup::LOW ? "LOW" : "HIGH";
}

std::string learning_rates_to_csv(const AfmFit& fit, const GroupAssignment& groups) {
  std::ostringstream os;
  os << "student_id,delta,group\n";
  os.precision(12);
  for (std::size_t i = 0; i < fit.students.size(); ++i) {
    os << fit.students[i] << ',' << fit.delta[i] << ','
       << to_string(groups.groups.at(fit.students[i])) << '\n';
  }
  return os.str();
}

}  // namespace transona
