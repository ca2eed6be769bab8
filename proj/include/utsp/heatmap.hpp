#pragma once

#include <span>
#include <vector>

#include "utsp/common.hpp"
#include "utsp/instance.hpp"

namespace utsp {

// Soft indicator matrix T, heat map H and the surrogate loss.
//
// Column t of T is a distribution over which city occupies position t of the
// cycle. The heat map links consecutive positions:
//
//   H = sum_t p_t p_{t+1}^T  (cyclic)  =  T V T^T,
//
// where V is the cyclic shift with V(k, k+1 mod n) = 1. Indices are 0-based;
// position t here is position t+1 in 1-based notation.

/// Pre-softmax scores S.
struct Logits {
  Matrix s;
  int size() const noexcept { return static_cast<int>(s.rows()); }
};

/// Column-stochastic matrix T (every column sums to 1).
struct SoftIndicator {
  Matrix t;
  int size() const noexcept { return static_cast<int>(t.rows()); }
};

/// Directed edge scores H; h(i, j) scores the edge i -> j.
struct HeatMap {
  Matrix h;
  int size() const noexcept { return static_cast<int>(h.rows()); }
};

/// Unweighted loss terms plus the weighted total
/// lambda1 * row_penalty + lambda2 * self_loop + expected_length.
struct LossBreakdown {
  double row_penalty = 0.0;      // sum_i (sum_j T_ij - 1)^2
  double self_loop = 0.0;        // sum_i H_ii
  double expected_length = 0.0;  // sum_ij D_ij H_ij
  double total = 0.0;
};

/// t_ij = exp(s_ij) / sum_k exp(s_kj), with per-column max subtraction.
/// Throws std::invalid_argument on non-finite logits.
SoftIndicator column_softmax(const Logits& logits);

/// H = T V T^T, computed as one product T * shift(T)^T.
HeatMap indicator_to_heatmap(const SoftIndicator& indicator);

/// Independent constructions of the same heat map, used to cross-check
/// indicator_to_heatmap.
namespace reference {

/// Sum of the n cyclic outer products p_t p_{t+1}^T.
HeatMap heatmap_outer_products(const SoftIndicator& indicator);

/// H_ij = sum_k T_ik T_j,(k+1 mod n), one entry at a time.
HeatMap heatmap_elementwise(const SoftIndicator& indicator);

/// The cyclic shift matrix V.
Matrix shift_matrix(int n);

}  // namespace reference

/// Surrogate loss in its three-term form. Throws std::invalid_argument on
/// dimension mismatch or negative weights.
LossBreakdown surrogate_loss(const SoftIndicator& indicator, const HeatMap& heat,
                             const DistanceMatrix& dist, double lambda1, double lambda2);

/// The same loss in compact form: lambda1 * row_penalty + <D + lambda2 I, H>.
double compact_loss(const SoftIndicator& indicator, const HeatMap& heat,
                    const DistanceMatrix& dist, double lambda1, double lambda2);

/// Gradient of the total loss with respect to the logits. Throws NumericError
/// if any intermediate is non-finite.
Matrix loss_gradient(const Logits& logits, const DistanceMatrix& dist, double lambda1,
                     double lambda2);

/// Everything produced by one forward/backward evaluation.
struct LossEvaluation {
  SoftIndicator indicator;
  HeatMap heat;
  LossBreakdown loss;
  Matrix gradient;  // d total / d logits
};

/// Forward pass plus gradient in one sweep; the optimizer's inner step.
LossEvaluation evaluate_loss(const Logits& logits, const DistanceMatrix& dist, double lambda1,
                             double lambda2);

/// Tolerance for recognising 0/1 entries of permutation-like matrices.
inline constexpr double kPermutationTolerance = 1e-9;

/// T with T(q[t], t) = 1 and zeros elsewhere; q must be a permutation.
SoftIndicator permutation_indicator(std::span<const City> q);

/// For a permutation matrix T returns q with q[t] = row of the 1 in column t.
/// The directed cycle q[0] -> q[1] -> ... -> q[n-1] -> q[0] is exactly the set
/// of unit entries of the corresponding heat map. Throws std::invalid_argument
/// if T is not a permutation matrix within kPermutationTolerance.
std::vector<City> permutation_to_cycle(const SoftIndicator& indicator);

struct HamiltonianCheck {
  bool is_hamiltonian = false;
  std::vector<City> cycle;  // successor walk from city 0 when is_hamiltonian
};

/// True iff H is a 0/1 matrix (within kPermutationTolerance) with one unit per
/// row and column, zero diagonal, and a single cycle through all n cities.
HamiltonianCheck verify_hamiltonian_heatmap(const HeatMap& heat);

}  // namespace utsp
