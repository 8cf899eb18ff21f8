#ifndef DIF_KALMAN_HPP
#define DIF_KALMAN_HPP

#include "dif/gaussian.hpp"
#include "dif/linearize.hpp"
#include "dif/models.hpp"

namespace dif {

/// Predictive and posterior belief of one filter step.
struct StepResult {
  Gaussian predicted;
  Gaussian posterior;
};

/// Time update through an affine surrogate:
/// mean = A mu + b, cov = A P Aᵀ + Q + Omega.
Gaussian kf_predict(const Gaussian& prior, const AffineModel& m,
                    const MatrixXd& q);

/// Measurement update with Joseph-form covariance. The surrogate maps the
/// state to the measurement; its Omega adds to R.
Gaussian kf_update(const Gaussian& pred, const AffineModel& m,
                   const MatrixXd& r, const VectorXd& y);

/// One-step Rauch-Tung-Striebel correction: G = P_prev Aᵀ P_pred⁻¹,
/// returning the smoothed belief over the previous state. The affine model
/// must be the one used to produce `predicted`.
Gaussian rts_smooth_step(const Gaussian& prior_prev, const Gaussian& predicted,
                         const Gaussian& posterior, const AffineModel& m);

/// Non-iterated EKF step (analytic linearization about the prior and the
/// prediction). Requires analytic Jacobians on the model.
StepResult ekf_step(const Gaussian& prior, const StateSpaceModel& model,
                    const VectorXd& y);

/// Non-iterated UKF step (SLR about the prior and the prediction).
StepResult ukf_step(const Gaussian& prior, const StateSpaceModel& model,
                    const VectorXd& y, const SigmaConfig& cfg);

}  // namespace dif

#endif
