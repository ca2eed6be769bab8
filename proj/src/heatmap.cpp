#include "utsp/heatmap.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace utsp {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
  }
}

void require_same_size(int a, int b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

void require_weights(double lambda1, double lambda2) {
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) {
    throw std::invalid_argument("loss weights lambda1, lambda2 must be >= 0");
  }
}

// Column k of the result is column (k + 1) mod n of t, i.e. t * V^T.
Matrix shift_columns_left(const Matrix& t) {
  const Eigen::Index n = t.cols();
  Matrix out(t.rows(), n);
  out.leftCols(n - 1) = t.rightCols(n - 1);
  out.col(n - 1) = t.col(0);
  return out;
}

// Column k of the result is column (k - 1) mod n of t, i.e. t * V.
Matrix shift_columns_right(const Matrix& t) {
  const Eigen::Index n = t.cols();
  Matrix out(t.rows(), n);
  out.rightCols(n - 1) = t.leftCols(n - 1);
  out.col(0) = t.col(n - 1);
  return out;
}

bool is_zero(double v) { return std::abs(v) <= kPermutationTolerance; }
bool is_one(double v) { return std::abs(v - 1.0) <= kPermutationTolerance; }

}  // namespace

SoftIndicator column_softmax(const Logits& logits) {
  require_square(logits.s, "column_softmax");
  if (!logits.s.allFinite()) throw std::invalid_argument("column_softmax: non-finite logits");
  const Eigen::RowVectorXd col_max = logits.s.colwise().maxCoeff();
  Matrix e = (logits.s.rowwise() - col_max).array().exp().matrix();
  const Eigen::RowVectorXd col_sum = e.colwise().sum();
  for (Eigen::Index j = 0; j < e.cols(); ++j) e.col(j) /= col_sum(j);
  return SoftIndicator{std::move(e)};
}

HeatMap indicator_to_heatmap(const SoftIndicator& indicator) {
  require_square(indicator.t, "indicator_to_heatmap");
  const Matrix next = shift_columns_left(indicator.t);
  return HeatMap{indicator.t * next.transpose()};
}

namespace reference {

HeatMap heatmap_outer_products(const SoftIndicator& indicator) {
  const Eigen::Index n = indicator.t.rows();
  Matrix h = Matrix::Zero(n, n);
  for (Eigen::Index t = 0; t < n; ++t) {
    h += indicator.t.col(t) * indicator.t.col((t + 1) % n).transpose();
  }
  return HeatMap{std::move(h)};
}

HeatMap heatmap_elementwise(const SoftIndicator& indicator) {
  const Eigen::Index n = indicator.t.rows();
  Matrix h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) acc += indicator.t(i, k) * indicator.t(j, (k + 1) % n);
      h(i, j) = acc;
    }
  }
  return HeatMap{std::move(h)};
}

Matrix shift_matrix(int n) {
  Matrix v = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) v(k, (k + 1) % n) = 1.0;
  return v;
}

}  // namespace reference

LossBreakdown surrogate_loss(const SoftIndicator& indicator, const HeatMap& heat,
                             const DistanceMatrix& dist, double lambda1, double lambda2) {
  require_square(indicator.t, "surrogate_loss");
  require_same_size(indicator.size(), heat.size(), "surrogate_loss");
  require_same_size(indicator.size(), dist.size(), "surrogate_loss");
  require_weights(lambda1, lambda2);

  LossBreakdown out;
  out.row_penalty = (indicator.t.rowwise().sum().array() - 1.0).square().sum();
  out.self_loop = heat.h.trace();
  out.expected_length = dist.d.cwiseProduct(heat.h).sum();
  out.total = lambda1 * out.row_penalty + lambda2 * out.self_loop + out.expected_length;
  assert(std::abs(out.total - compact_loss(indicator, heat, dist, lambda1, lambda2)) <=
         1e-10 * std::max(1.0, std::abs(out.total)));
  return out;
}

double compact_loss(const SoftIndicator& indicator, const HeatMap& heat,
                    const DistanceMatrix& dist, double lambda1, double lambda2) {
  require_square(indicator.t, "compact_loss");
  require_same_size(indicator.size(), heat.size(), "compact_loss");
  require_same_size(indicator.size(), dist.size(), "compact_loss");
  require_weights(lambda1, lambda2);
  const Eigen::Index n = indicator.t.rows();
  const Matrix shifted_dist = dist.d + lambda2 * Matrix::Identity(n, n);
  const double rows = (indicator.t.rowwise().sum().array() - 1.0).square().sum();
  return lambda1 * rows + shifted_dist.cwiseProduct(heat.h).sum();
}

LossEvaluation evaluate_loss(const Logits& logits, const DistanceMatrix& dist, double lambda1,
                             double lambda2) {
  require_square(logits.s, "evaluate_loss");
  require_same_size(logits.size(), dist.size(), "evaluate_loss");
  require_weights(lambda1, lambda2);

  LossEvaluation ev;
  ev.indicator = column_softmax(logits);
  ev.heat = indicator_to_heatmap(ev.indicator);
  ev.loss = surrogate_loss(ev.indicator, ev.heat, dist, lambda1, lambda2);

  const Matrix& t = ev.indicator.t;
  const Eigen::Index n = t.rows();
  const Matrix weights = dist.d + lambda2 * Matrix::Identity(n, n);

  // d<A, T V T^T>/dT = A T V^T + A^T T V; shifting columns applies V^T / V.
  Matrix grad_t = shift_columns_left(weights * t) + shift_columns_right(weights.transpose() * t);
  const Eigen::VectorXd row_excess = t.rowwise().sum().array() - 1.0;
  grad_t.colwise() += 2.0 * lambda1 * row_excess;

  // Column-softmax Jacobian: dS_ij = T_ij (G_ij - sum_k T_kj G_kj).
  const Eigen::RowVectorXd col_dot = t.cwiseProduct(grad_t).colwise().sum();
  ev.gradient = t.cwiseProduct(grad_t.rowwise() - col_dot);

  if (!ev.gradient.allFinite() || !std::isfinite(ev.loss.total)) {
    throw NumericError("loss gradient produced a non-finite value");
  }
  return ev;
}

Matrix loss_gradient(const Logits& logits, const DistanceMatrix& dist, double lambda1,
                     double lambda2) {
  return evaluate_loss(logits, dist, lambda1, lambda2).gradient;
}

SoftIndicator permutation_indicator(std::span<const City> q) {
  const auto n = static_cast<Eigen::Index>(q.size());
  Matrix t = Matrix::Zero(n, n);
  std::vector<bool> used(q.size(), false);
  for (Eigen::Index col = 0; col < n; ++col) {
    const City row = q[static_cast<std::size_t>(col)];
    if (row < 0 || row >= n || used[static_cast<std::size_t>(row)]) {
      throw std::invalid_argument("permutation_indicator: q is not a permutation");
    }
    used[static_cast<std::size_t>(row)] = true;
    t(row, col) = 1.0;
  }
  return SoftIndicator{std::move(t)};
}

std::vector<City> permutation_to_cycle(const SoftIndicator& indicator) {
  require_square(indicator.t, "permutation_to_cycle");
  const Eigen::Index n = indicator.t.rows();
  std::vector<City> q(static_cast<std::size_t>(n), -1);
  std::vector<int> row_units(static_cast<std::size_t>(n), 0);
  for (Eigen::Index col = 0; col < n; ++col) {
    for (Eigen::Index row = 0; row < n; ++row) {
      const double v = indicator.t(row, col);
      if (is_one(v)) {
        if (q[static_cast<std::size_t>(col)] != -1) {
          throw std::invalid_argument("permutation_to_cycle: column " + std::to_string(col) +
                                      " has more than one unit entry");
        }
        q[static_cast<std::size_t>(col)] = static_cast<City>(row);
        ++row_units[static_cast<std::size_t>(row)];
      } else if (!is_zero(v)) {
        throw std::invalid_argument("permutation_to_cycle: entry (" + std::to_string(row) + ", " +
                                    std::to_string(col) + ") is neither 0 nor 1");
      }
    }
    if (q[static_cast<std::size_t>(col)] == -1) {
      throw std::invalid_argument("permutation_to_cycle: column " + std::to_string(col) +
                                  " has no unit entry");
    }
  }
  for (Eigen::Index row = 0; row < n; ++row) {
    if (row_units[static_cast<std::size_t>(row)] != 1) {
      throw std::invalid_argument("permutation_to_cycle: row " + std::to_string(row) +
                                  " does not have exactly one unit entry");
    }
  }
  return q;
}

HamiltonianCheck verify_hamiltonian_heatmap(const HeatMap& heat) {
  HamiltonianCheck out;
  const Eigen::Index n = heat.h.rows();
  if (n == 0 || heat.h.cols() != n) return out;

  std::vector<City> successor(static_cast<std::size_t>(n), -1);
  std::vector<int> col_units(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = heat.h(i, j);
      if (is_one(v)) {
        if (i == j || successor[static_cast<std::size_t>(i)] != -1) return out;
        successor[static_cast<std::size_t>(i)] = static_cast<City>(j);
        ++col_units[static_cast<std::size_t>(j)];
      } else if (!is_zero(v)) {
        return out;
      }
    }
    if (successor[static_cast<std::size_t>(i)] == -1) return out;
  }
  for (int units : col_units) {
    if (units != 1) return out;
  }

  std::vector<City> cycle;
  cycle.reserve(static_cast<std::size_t>(n));
  City c = 0;
  for (Eigen::Index step = 0; step < n; ++step) {
    if (step > 0 && c == 0) return out;  // closed early: a sub-tour
    cycle.push_back(c);
    c = successor[static_cast<std::size_t>(c)];
  }
  if (c != 0) return out;
  out.is_hamiltonian = true;
  out.cycle = std::move(cycle);
  return out;
}

}  // namespace utsp
