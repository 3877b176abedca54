#include "transona/ona.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "transona/error.hpp"

namespace transona {

WeightMatrix to_weight_matrix(const std::vector<std::pair<UnitKey, AdjacencyVector>>& adj,
                              const std::map<StudentId, std::string>& group_labels) {
  WeightMatrix m;
  if (adj.empty()) throw DataError("weight matrix: no units");
  m.universe = adj.front().second.universe;
  const std::size_t d = m.universe.size() * m.universe.size();
  m.rows.resize(static_cast<Eigen::Index>(adj.size()), static_cast<Eigen::Index>(d));
  m.zero_row.assign(adj.size(), false);
  for (std::size_t u = 0; u < adj.size(); ++u) {
    const auto& [key, vec] = adj[u];
    if (vec.universe != m.universe)
      throw DataError("weight matrix: mismatched code universes");
    m.units.push_back(key);
    auto git = group_labels.find(key.student);
    m.groups.push_back(git == group_labels.end() ? "" : git->second);
    for (std::size_t j = 0; j < d; ++j)
      m.rows(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(j)) = vec.weights[j];
  }
  return m;
}

WeightMatrix sphere_normalize(const WeightMatrix& matrix) {
  WeightMatrix out = matrix;
  out.zero_row.assign(static_cast<std::size_t>(out.rows.rows()), false);
  for (Eigen::Index i = 0; i < out.rows.rows(); ++i) {
    const double norm = out.rows.row(i).norm();
    if (norm > 0.0) {
      out.rows.row(i) /= norm;
    } else {
      out.zero_row[static_cast<std::size_t>(i)] = true;
    }
  }
  return out;
}

namespace {

// Deterministic sign: the largest-magnitude component points positive.
void fix_sign(Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  if (v[best] < 0) v = -v;
}

}  // namespace

std::pair<RotationBasis, Scores> means_rotation(const WeightMatrix& normalized,
                                                const std::string& positive_group) {
  const Eigen::Index n = normalized.rows.rows();
  const Eigen::Index d = normalized.rows.cols();
  Eigen::VectorXd mu_pos = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd mu_other = Eigen::VectorXd::Zero(d);
  Eigen::Index n_pos = 0, n_other = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (normalized.groups[static_cast<std::size_t>(i)] == positive_group) {
      mu_pos += normalized.rows.row(i).transpose();
      ++n_pos;
    } else {
      mu_other += normalized.rows.row(i).transpose();
      ++n_other;
    }
  }
  if (n_pos == 0 || n_other == 0)
    throw DataError("means_rotation: both groups must be non-empty");
  mu_pos /= static_cast<double>(n_pos);
  mu_other /= static_cast<double>(n_other);

  Eigen::VectorXd diff = mu_pos - mu_other;
  const double diff_norm = diff.norm();
  if (diff_norm == 0.0)
    throw DataError("means_rotation: group means coincide, no rotation direction");

  RotationBasis basis;
  basis.positive_group = positive_group;
  basis.grand_mean = normalized.rows.colwise().mean().transpose();
  basis.dim1 = diff / diff_norm;

  Eigen::MatrixXd centered = normalized.rows.rowwise() - basis.grand_mean.transpose();
  // deflate the MR direction, then take the leading right-singular direction
  Eigen::VectorXd proj = centered * basis.dim1;
  Eigen::MatrixXd deflated = centered - proj * basis.dim1.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(deflated, Eigen::ComputeThinV);
  Eigen::VectorXd dim2;
  if (svd.singularValues().size() > 0 && svd.singularValues()[0] > 1e-12) {
    dim2 = svd.matrixV().col(0);
  } else {
    // degenerate deflated matrix: any direction orthogonal to dim1 serves
    Eigen::Index least = 0;
    for (Eigen::Index i = 1; i < d; ++i)
      if (std::abs(basis.dim1[i]) < std::abs(basis.dim1[least])) least = i;
    dim2 = Eigen::VectorXd::Unit(d, least);
  }
  dim2 -= dim2.dot(basis.dim1) * basis.dim1;
  dim2.normalize();
  fix_sign(dim2);
  basis.dim2 = dim2;

  Scores scores;
  scores.units = normalized.units;
  scores.x = centered * basis.dim1;
  scores.y = centered * basis.dim2;
  return {std::move(basis), std::move(scores)};
}

NodeLayout coregister(const WeightMatrix& normalized, const Scores& scores, double lambda) {
  const Eigen::Index n = normalized.rows.rows();
  const auto c = static_cast<Eigen::Index>(normalized.code_count());
  if (scores.x.size() != n) throw DataError("coregister: scores missing for some units");

  // centroid_u(P) = coeff_u . P, coeff_u[j] = (out-weight_j + in-weight_j) / (2 S_u)
  std::vector<Eigen::VectorXd> coeffs;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index u = 0; u < n; ++u) {
    double total = normalized.rows.row(u).sum();
    if (total <= 0.0) continue;
    Eigen::VectorXd coeff = Eigen::VectorXd::Zero(c);
    for (Eigen::Index a = 0; a < c; ++a)
      for (Eigen::Index b = 0; b < c; ++b) {
        const double w = normalized.rows(u, a * c + b);
        coeff[a] += w * 0.5;
        coeff[b] += w * 0.5;
      }
    coeff /= total;
    coeffs.push_back(std::move(coeff));
    kept.push_back(u);
  }
  if (coeffs.empty()) throw DataError("coregister: all units have zero weight");

  const auto m = static_cast<Eigen::Index>(coeffs.size());
  const double sqrt_lambda = std::sqrt(lambda);
  Eigen::MatrixXd design(m + c, c);
  for (Eigen::Index i = 0; i < m; ++i) design.row(i) = coeffs[static_cast<std::size_t>(i)];
  design.bottomRows(c) = sqrt_lambda * Eigen::MatrixXd::Identity(c, c);

  auto solve_axis = [&](const Eigen::VectorXd& target) {
    Eigen::VectorXd rhs(m + c);
    for (Eigen::Index i = 0; i < m; ++i) rhs[i] = target[kept[static_cast<std::size_t>(i)]];
    rhs.tail(c).setZero();
    return Eigen::VectorXd(design.colPivHouseholderQr().solve(rhs));
  };
  Eigen::VectorXd px = solve_axis(scores.x);
  Eigen::VectorXd py = solve_axis(scores.y);

  NodeLayout layout;
  layout.universe = normalized.universe;
  layout.x.assign(px.data(), px.data() + px.size());
  layout.y.assign(py.data(), py.data() + py.size());
  return layout;
}

GroupNetwork group_mean_network(const WeightMatrix& normalized, const std::string& group) {
  const Eigen::Index n = normalized.rows.rows();
  const auto c = static_cast<Eigen::Index>(normalized.code_count());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(normalized.rows.cols());
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (normalized.groups[static_cast<std::size_t>(i)] != group) continue;
    mean += normalized.rows.row(i).transpose();
    ++count;
  }
  if (count == 0) throw DataError("group_mean_network: empty group '" + group + "'");
  mean /= static_cast<double>(count);

  GroupNetwork net;
  net.universe = normalized.universe;
  net.group = group;
  net.unit_count = count;
  net.mean_weights.assign(mean.data(), mean.data() + mean.size());
  net.response_strength.assign(static_cast<std::size_t>(c), 0.0);
  net.self_strength.assign(static_cast<std::size_t>(c), 0.0);
  for (Eigen::Index a = 0; a < c; ++a)
    for (Eigen::Index b = 0; b < c; ++b) {
      const double w = mean[a * c + b];
      if (a == b)
        net.self_strength[static_cast<std::size_t>(a)] = w;
      else
        net.response_strength[static_cast<std::size_t>(b)] += w;
    }
  return net;
}

SubtractedNetwork subtract_networks(const GroupNetwork& a, const GroupNetwork& b) {
  if (a.universe != b.universe)
    throw DataError("subtract_networks: mismatched code universes");
  SubtractedNetwork out;
  out.universe = a.universe;
  out.group_a = a.group;
  out.group_b = b.group;
  out.diff_weights.resize(a.mean_weights.size());
  for (std::size_t i = 0; i < a.mean_weights.size(); ++i)
    out.diff_weights[i] = a.mean_weights[i] - b.mean_weights[i];
  return out;
}

SubtractedNetwork subtract_networks(const WeightMatrix& normalized, const std::string& group_a,
                                    const std::string& group_b) {
  auto net_a = group_mean_network(normalized, group_a);
  auto net_b = group_mean_network(normalized, group_b);
  SubtractedNetwork out = subtract_networks(net_a, net_b);
  const std::size_t d = normalized.universe.size() * normalized.universe.size();
  out.members_a.resize(d);
  out.members_b.resize(d);
  for (Eigen::Index i = 0; i < normalized.rows.rows(); ++i) {
    const auto& g = normalized.groups[static_cast<std::size_t>(i)];
    if (g != group_a && g != group_b) continue;
    auto& dest = g == group_a ? out.members_a : out.members_b;
    for (std::size_t j = 0; j < d; ++j)
      dest[j].push_back(normalized.rows(i, static_cast<Eigen::Index>(j)));
  }
  return out;
}

std::string scores_to_csv(const Scores& scores, const std::vector<std::string>& groups) {
  std::ostringstream os;
  os << "unit,phase,group,x,y\n";
  os.precision(12);
  for (std::size_t i = 0; i < scores.units.size(); ++i) {
    UnitKey base = scores.units[i];
    base.phase.reset();
    os << base.label() << ',';
    if (scores.units[i].phase)
      os << (*scores.units[i].phase == VisitPhase::PRE_VISIT ? "PRE_VISIT" : "POST_VISIT");
    os << ',' << (i < groups.size() ? groups[i] : "") << ','
       << scores.x[static_cast<Eigen::Index>(i)] << ','
       << scores.y[static_cast<Eigen::Index>(i)] << '\n';
  }
  return os.str();
}

std::string layout_to_csv(const NodeLayout& layout) {
  std::ostringstream os;
  os << "code,x,y\n";
  os.precision(12);
  for (std::size_t i = 0; i < layout.universe.size(); ++i)
    os << layout.universe[i].id() << ',' << layout.x[i] << ',' << layout.y[i] << '\n';
  return os.str();
}

std::string basis_to_json(const RotationBasis& basis, const std::vector<Code>& universe) {
  nlohmann::json j;
  j["positive_group"] = basis.positive_group;
  std::vector<std::string> codes;
  for (const auto& c : universe) codes.push_back(c.id());
  j["codes"] = codes;
  j["dim1"] = std::vector<double>(basis.dim1.data(), basis.dim1.data() + basis.dim1.size());
  j["dim2"] = std::vector<double>(basis.dim2.data(), basis.dim2.data() + basis.dim2.size());
  j["grand_mean"] = std::vector<double>(basis.grand_mean.data(),
                                        basis.grand_mean.data() + basis.grand_mean.size());
  return j.dump(2) + "\n";
}

}  // namespace transona
