#pragma once

#include <stdexcept>

namespace qsaf {

/// Parameters shared by all geometric integrators.
struct FlowConfig {
  double step_size = 0.1;     // explicit Euler step in chart coordinates
  double purity_tol = 1e-3;   // stop once max purity gap falls below this
  int max_iters = 10000;
  int record_every = 10;      // trajectory snapshot stride; final state always kept
  double trace_scale = 1.0;
  unsigned threads = 1;       // worker threads for per-vertex updates

  void validate() const {
    if (!(step_size > 0.0) || step_size > 0.5)
      throw std::invalid_argument("FlowConfig: step size must lie in (0, 0.5]");
    if (!(purity_tol > 0.0))
      throw std::invalid_argument("FlowConfig: purity tolerance must be positive");
    if (max_iters < 1) throw std::invalid_argument("FlowConfig: max_iters must be positive");
    if (record_every < 1)
      throw std::invalid_argument("FlowConfig: record_every must be positive");
    if (!(trace_scale > 0.0))
      throw std::invalid_argument("FlowConfig: trace scale must be positive");
    if (threads < 1) throw std::invalid_argument("FlowConfig: thread count must be positive");
  }
};

/// Per-iteration convergence record emitted by the graph flows.
struct DiagnosticsRow {
  int iter = 0;
  double purity_gap_max = 0.0;
  double potential = 0.0;
};

}  // namespace qsaf
