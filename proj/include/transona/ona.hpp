#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "transona/events.hpp"
#include "transona/tma.hpp"

namespace transona {

struct WeightMatrix {
  std::vector<Code> universe;       // C codes; columns are C^2 ordered pairs
  std::vector<UnitKey> units;       // row order
  std::vector<std::string> groups;  // per-row group label
  Eigen::MatrixXd rows;             // U x C^2
  std::vector<bool> zero_row;       // flagged by sphere_normalize

  std::size_t code_count() const { return universe.size(); }
};

WeightMatrix to_weight_matrix(const std::vector<std::pair<UnitKey, AdjacencyVector>>& adj,
                              const std::map<StudentId, std::string>& group_labels);

struct RotationBasis {
  Eigen::VectorXd dim1;  // unit norm, means-rotation direction
  Eigen::VectorXd dim2;  // unit norm, orthogonal to dim1
  Eigen::VectorXd grand_mean;
  std::string positive_group;
};

struct Scores {
  std::vector<UnitKey> units;
  Eigen::VectorXd x;  // projection on dim1
  Eigen::VectorXd y;  // projection on dim2
};

struct NodeLayout {
  std::vector<Code> universe;
  std::vector<double> x;
  std::vector<double> y;
};

struct GroupNetwork {
  std::vector<Code> universe;
  std::vector<double> mean_weights;       // C x C row-major
  std::vector<double> response_strength;  // per code j: sum over a != j of w(a->j)
  std::vector<double> self_strength;      // w(j->j)
  std::string group;
  std::size_t unit_count = 0;

  double weight(std::size_t a, std::size_t b) const {
    return mean_weights[a * universe.size() + b];
  }
};

struct SubtractedNetwork {
  std::vector<Code> universe;
  std::vector<double> diff_weights;  // meanA - meanB
  std::string group_a;
  std::string group_b;
  // per ordered pair: member weights from each group, Wilcoxon-ready
  std::vector<std::vector<double>> members_a;
  std::vector<std::vector<double>> members_b;
};

// Each nonzero row scaled to unit Euclidean norm; zero rows left alone and flagged.
WeightMatrix sphere_normalize(const WeightMatrix& matrix);

// dim1 = normalize(mu_positive - mu_other) over grand-mean-centered rows;
// dim2 = leading right-singular direction after dim1 deflation. Throws on a
// zero group-mean difference.
std::pair<RotationBasis, Scores> means_rotation(const WeightMatrix& normalized,
                                                const std::string& positive_group);

// Node positions minimizing sum_u ||score_u - centroid_u(P)||^2 + lambda ||P||^2,
// solved per axis as linear least squares.
NodeLayout coregister(const WeightMatrix& normalized, const Scores& scores,
                      double lambda = 1e-6);

GroupNetwork group_mean_network(const WeightMatrix& normalized, const std::string& group);

SubtractedNetwork subtract_networks(const WeightMatrix& normalized, const std::string& group_a,
                                    const std::string& group_b);

// Difference of two precomputed group networks; universes must match.
SubtractedNetwork subtract_networks(const GroupNetwork& a, const GroupNetwork& b);

std::string scores_to_csv(const Scores& scores, const std::vector<std::string>& groups);
std::string layout_to_csv(const NodeLayout& layout);
std::string basis_to_json(const RotationBasis& basis, const std::vector<Code>& universe);

}  // namespace transona
