#ifndef DIF_ITERATED_HPP
#define DIF_ITERATED_HPP

#include <vector>

#include "dif/kalman.hpp"

namespace dif {

enum class Variant { DIEKF, DIUKF, DIPLF };

// max_iters counts total passes through TU -> MU -> S, including pass 0.
// With max_iters = 1 the step reduces to the non-iterated baseline filter.
struct DifConfig {
  Variant variant = Variant::DIEKF;
  int max_iters = 10;
  double tol = 1e-6;
  SigmaConfig sigma{};
};

struct IterationStep {
  Gaussian smoothed_prev;  // p(x_{k-1} | y_{1:k}) under this pass's surrogate
  Gaussian predicted;
  Gaussian posterior;
};

struct IterationTrace {
  std::vector<IterationStep> steps;  // steps.size() == iterations_used + 1
  int iterations_used = 0;
  bool converged = false;
  bool aborted = false;  // a pass past the first hit a numerical failure
};

struct DifStepResult {
  Gaussian posterior;
  Gaussian smoothed_prev;
  IterationTrace trace;
};

DifStepResult dif_step(const Gaussian& prior_prev, const StateSpaceModel& model,
                       const VectorXd& y, const DifConfig& cfg);

struct FilterRun {
  std::vector<Gaussian> posteriors;  // one per measurement
  std::vector<IterationTrace> traces;  // filled only when keep_traces
  int failed_steps = 0;  // steps that kept the previous estimate
};

FilterRun dif_filter(const Gaussian& prior0, const StateSpaceModel& model,
                     const std::vector<VectorXd>& ys, const DifConfig& cfg,
                     bool keep_traces = false);

enum class Baseline { EKF, UKF };

FilterRun baseline_filter(const Gaussian& prior0, const StateSpaceModel& model,
                          const std::vector<VectorXd>& ys, Baseline which,
                          const SigmaConfig& cfg = SigmaConfig{});

}  // namespace dif

#endif
