#include "dif/iterated.hpp"

namespace dif {
namespace {

// Transition surrogate about the latest smoothed iterate. Pass 0 feeds the
// prior itself through here so the expansion matches the baseline filter.
AffineModel transition_surrogate(const DifConfig& cfg,
                                 const StateSpaceModel& model,
                                 const Gaussian& prior_prev,
                                 const Gaussian& iterate) {
  switch (cfg.variant) {
    case Variant::DIEKF:
      return analytic_linearize(model.f, model.f_jacobian, iterate);
    case Variant::DIUKF:
      // Mean-only relinearization: sigma points re-centered at the iterate
      // mean but spread by the original prior covariance.
      return slr_linearize(model.f, Gaussian(iterate.mean(), prior_prev.cov()),
                           cfg.sigma);
    case Variant::DIPLF:
      return slr_linearize(model.f, iterate, cfg.sigma);
  }
  throw std::invalid_argument("dif_step: unknown variant");
}

AffineModel measurement_surrogate(const DifConfig& cfg,
                                  const StateSpaceModel& model,
                                  const Gaussian& predicted,
                                  const Gaussian& iterate) {
  switch (cfg.variant) {
    case Variant::DIEKF:
      return analytic_linearize(model.h, model.h_jacobian, iterate);
    case Variant::DIUKF:
      return slr_linearize(model.h, Gaussian(iterate.mean(), predicted.cov()),
                           cfg.sigma);
    case Variant::DIPLF:
      return slr_linearize(model.h, iterate, cfg.sigma);
  }
  throw std::invalid_argument("dif_step: unknown variant");
}

}  // namespace

DifStepResult dif_step(const Gaussian& prior_prev, const StateSpaceModel& model,
                       const VectorXd& y, const DifConfig& cfg) {
  if (cfg.max_iters < 1) {
    throw std::invalid_argument("dif_step: max_iters must be at least 1");
  }
  if (!(cfg.tol > 0.0)) {
    throw std::invalid_argument("dif_step: tol must be positive");
  }
  if (cfg.variant == Variant::DIEKF &&
      (!model.f_jacobian || !model.h_jacobian)) {
    throw std::invalid_argument("dif_step: model lacks analytic Jacobians");
  }

  IterationTrace trace;

  // Pass 0: expand about the prior and its prediction; identical call
  // sequence to ekf_step/ukf_step, so the posterior matches the baseline
  // bit for bit. Failures here propagate to the caller.
  {
    AffineModel ft = transition_surrogate(cfg, model, prior_prev, prior_prev);
    Gaussian predicted = kf_predict(prior_prev, ft, model.Q);
    AffineModel ht = measurement_surrogate(cfg, model, predicted, predicted);
    Gaussian posterior = kf_update(predicted, ht, model.R, y);
    Gaussian smoothed = rts_smooth_step(prior_prev, predicted, posterior, ft);
    trace.steps.push_back(
        {std::move(smoothed), std::move(predicted), std::move(posterior)});
  }

  for (int i = 1; i < cfg.max_iters; ++i) {
    try {
      const IterationStep& last = trace.steps.back();
      AffineModel ft =
          transition_surrogate(cfg, model, prior_prev, last.smoothed_prev);
      Gaussian predicted = kf_predict(prior_prev, ft, model.Q);
      AffineModel ht =
          measurement_surrogate(cfg, model, predicted, last.posterior);
      Gaussian posterior = kf_update(predicted, ht, model.R, y);
      Gaussian smoothed = rts_smooth_step(prior_prev, predicted, posterior, ft);

      const double delta = (posterior.mean() - last.posterior.mean()).norm();
      const double scale = 1.0 + last.posterior.mean().norm();
      trace.steps.push_back(
          {std::move(smoothed), std::move(predicted), std::move(posterior)});
      trace.iterations_used = i;
      if (delta <= cfg.tol * scale) {
        trace.converged = true;
        break;
      }
    } catch (const NumericalError&) {
      trace.aborted = true;  // keep the last valid iterate
      break;
    }
  }

  Gaussian posterior = trace.steps.back().posterior;
  Gaussian smoothed = trace.steps.back().smoothed_prev;
  return {std::move(posterior), std::move(smoothed), std::move(trace)};
}

FilterRun dif_filter(const Gaussian& prior0, const StateSpaceModel& model,
                     const std::vector<VectorXd>& ys, const DifConfig& cfg,
                     bool keep_traces) {
  FilterRun run;
  run.posteriors.reserve(ys.size());
  Gaussian current = prior0;
  for (const VectorXd& y : ys) {
    try {
      DifStepResult step = dif_step(current, model, y, cfg);
      current = std::move(step.posterior);
      if (keep_traces) run.traces.push_back(std::move(step.trace));
    } catch (const NumericalError&) {
      ++run.failed_steps;  // carry the previous estimate forward
      if (keep_traces) {
        IterationTrace failed;
        failed.aborted = true;
        run.traces.push_back(std::move(failed));
      }
    }
    run.posteriors.push_back(current);
  }
  return run;
}

FilterRun baseline_filter(const Gaussian& prior0, const StateSpaceModel& model,
                          const std::vector<VectorXd>& ys, Baseline which,
                          const SigmaConfig& cfg) {
  FilterRun run;
  run.posteriors.reserve(ys.size());
  Gaussian current = prior0;
  for (const VectorXd& y : ys) {
    try {
      StepResult step = which == Baseline::EKF
                            ? ekf_step(current, model, y)
                            : ukf_step(current, model, y, cfg);
      current = std::move(step.posterior);
    } catch (const NumericalError&) {
      ++run.failed_steps;
    }
    run.posteriors.push_back(current);
  }
  return run;
}

}  // namespace dif
