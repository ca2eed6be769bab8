#include "utsp/heatmap_generator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "utsp/io.hpp"
#include "utsp/rng.hpp"

namespace utsp {

TrainConfig TrainConfig::defaults_for(int n) {
  TrainConfig cfg;
  const int hundreds = (std::max(n, 1) + 99) / 100;
  cfg.steps = std::max(300, 300 * hundreds);
  return cfg;
}

void TrainConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("TrainConfig: steps must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) {
    throw std::invalid_argument("TrainConfig: lambda1, lambda2 must be >= 0");
  }
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("TrainConfig: beta1, beta2 must lie in (0, 1)");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("TrainConfig: epsilon must be > 0");
  if (!(init_scale >= 0.0)) throw std::invalid_argument("TrainConfig: init_scale must be >= 0");
}

Logits init_logits(int n, const TrainConfig& cfg) {
  if (n < Instance::kMinCities) throw std::invalid_argument("init_logits: n must be >= 3");
  Logits logits{Matrix::Zero(n, n)};
  if (cfg.init_scale == 0.0) return logits;
  Rng rng(cfg.seed);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) logits.s(i, j) = cfg.init_scale * rng.gaussian();
  }
  return logits;
}

TrainResult optimize_heatmap(const Instance& inst, const TrainConfig& cfg) {
  return optimize_heatmap(distance_matrix(inst), cfg);
}

TrainResult optimize_heatmap(const DistanceMatrix& dist, const TrainConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const int n = dist.size();

  Logits logits = init_logits(n, cfg);
  Matrix first_moment = Matrix::Zero(n, n);
  Matrix second_moment = Matrix::Zero(n, n);
  double decay1 = 1.0;
  double decay2 = 1.0;

  TrainResult out;
  out.trace.steps.reserve(static_cast<std::size_t>(cfg.steps));
  Logits best = logits;
  LossEvaluation best_eval;
  bool have_best = false;

  for (int step = 0; step <= cfg.steps; ++step) {
    LossEvaluation ev;
    try {
      ev = evaluate_loss(logits, dist, cfg.lambda1, cfg.lambda2);
    } catch (const std::exception& e) {
      throw NumericError("optimize_heatmap: step " + std::to_string(step) + ": " + e.what());
    }
    if (!have_best || ev.loss.total < best_eval.loss.total) {
      best = logits;
      best_eval = ev;
      out.trace.returned_step = step;
      have_best = true;
    }
    if (step == cfg.steps) break;
    out.trace.steps.push_back(ev.loss);

    decay1 *= cfg.beta1;
    decay2 *= cfg.beta2;
    first_moment = cfg.beta1 * first_moment + (1.0 - cfg.beta1) * ev.gradient;
    second_moment = cfg.beta2 * second_moment +
                    (1.0 - cfg.beta2) * ev.gradient.cwiseProduct(ev.gradient);
    const Matrix m_hat = first_moment / (1.0 - decay1);
    const Matrix v_hat = second_moment / (1.0 - decay2);
    logits.s.array() -= cfg.learning_rate * m_hat.array() / (v_hat.array().sqrt() + cfg.epsilon);
    if (!logits.s.allFinite()) {
      throw NumericError("optimize_heatmap: step " + std::to_string(step) +
                         ": logits became non-finite");
    }
  }

  out.logits = std::move(best);
  out.indicator = std::move(best_eval.indicator);
  out.heat = std::move(best_eval.heat);
  out.trace.final = best_eval.loss;
  out.trace.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string trace_csv(const TrainTrace& trace) {
  std::ostringstream out;
  out << "step,total,row_penalty,self_loop,expected_length\n";
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const LossBreakdown& l = trace.steps[k];
    out << k << ',' << format_double(l.total) << ',' << format_double(l.row_penalty) << ','
        << format_double(l.self_loop) << ',' << format_double(l.expected_length) << '\n';
  }
  return out.str();
}

}  // namespace utsp
