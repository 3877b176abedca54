#pragma once

#include <map>
#include <string>
#include <vector>

#include "transona/events.hpp"

namespace transona {

struct OpportunityRow {
  StudentId student = 0;
  std::string kc;
  int opportunity = 0;  // 0-based count of prior first attempts on this kc
  bool correct = false; // first-attempt-correct
};

struct OpportunityTable {
  std::vector<OpportunityRow> rows;
  int skipped_missing_kc = 0;
};

struct AfmFit {
  std::vector<StudentId> students;
  std::vector<std::string> kcs;
  std::vector<double> theta;  // per-student proficiency intercepts
  std::vector<double> beta;   // per-kc difficulty intercepts
  std::vector<double> gamma;  // per-kc learning-rate slopes
  std::vector<double> delta;  // per-student learning-rate deviations
  double lambda_theta = 1.0;
  double lambda_delta = 1.0;
  bool converged = false;
  double log_likelihood = 0.0;   // unpenalized, at solution
  double penalized_ll = 0.0;
  std::vector<double> ll_trace;  // penalized LL after each accepted step

  double delta_for(StudentId s) const;
};

enum class LearningGroup { LOW, HIGH };

struct GroupAssignment {
  std::map<StudentId, LearningGroup> groups;
  double split_value = 0.0;  // median of delta
  bool tie_warning = false;  // > 20% of deltas tie at the median
};

// One opportunity per first encounter of a (student, problem, step); events
// without a kc label are skipped and counted.
OpportunityTable build_opportunity_table(const std::vector<Event>& tutor_events);

// Penalized individualized AFM: maximizes
//   sum log Bernoulli(y | logit^-1(theta_i + beta_k + (gamma_k + delta_i) T))
//     - lambda_theta * sum theta^2 - lambda_delta * sum delta^2
// by damped Newton iterations (cap 500, converged iff grad norm < 1e-8).
AfmFit fit_iafm(const std::vector<OpportunityRow>& rows, double lambda_theta = 1.0,
                double lambda_delta = 1.0);

// Strictly-above-median deltas -> HIGH, the rest -> LOW.
GroupAssignment median_split(const AfmFit& fit);

std::string learning_rates_to_csv(const AfmFit& fit, const GroupAssignment& groups);

const char* to_string(LearningGroup g);

}  // namespace transona
