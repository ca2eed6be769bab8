#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "utsp/heatmap.hpp"
#include "utsp/instance.hpp"

namespace utsp {

/// Adam settings for per-instance optimisation of the logits.
struct TrainConfig {
  int steps = 300;
  double learning_rate = 0.01;
  double lambda1 = 10.0;
  double lambda2 = 10.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double init_scale = 0.1;
  std::uint64_t seed = 0;

  /// Defaults with steps = 300 * ceil(n / 100) (at least 300).
  static TrainConfig defaults_for(int n);

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct TrainTrace {
  std::vector<LossBreakdown> steps;  // loss at the parameters of each update
  LossBreakdown final;               // loss of the returned logits
  int returned_step = 0;             // index of the returned iterate, in [0, steps]
  double seconds = 0.0;
};

struct TrainResult {
  Logits logits;
  SoftIndicator indicator;
  HeatMap heat;
  TrainTrace trace;
};

/// Logits i.i.d. N(0, init_scale^2) from Rng(cfg.seed), filled row-major.
Logits init_logits(int n, const TrainConfig& cfg);

/// Runs cfg.steps Adam updates on the logits under the surrogate loss and
/// returns the lowest-loss iterate visited (the initial logits and every
/// post-update iterate are candidates). Throws NumericError naming the step
/// when the loss or gradient stops being finite.
TrainResult optimize_heatmap(const Instance& inst, const TrainConfig& cfg);
TrainResult optimize_heatmap(const DistanceMatrix& dist, const TrainConfig& cfg);

/// CSV with header `step,total,row_penalty,self_loop,expected_length`.
std::string trace_csv(const TrainTrace& trace);

}  // namespace utsp
