#include "dif/kalman.hpp"

namespace dif {

Gaussian kf_predict(const Gaussian& prior, const AffineModel& m,
                    const MatrixXd& q) {
  if (m.A.cols() != prior.dim() || m.A.rows() != m.b.size() ||
      q.rows() != m.A.rows() || q.cols() != m.A.rows()) {
    throw DimensionError("kf_predict: dimension mismatch");
  }
  const VectorXd mean = m.A * prior.mean() + m.b;
  const MatrixXd cov =
      symmetrize(m.A * prior.cov() * m.A.transpose() + q + m.Omega);
  return Gaussian(mean, cov);
}

Gaussian kf_update(const Gaussian& pred, const AffineModel& m,
                   const MatrixXd& r, const VectorXd& y) {
  if (m.A.cols() != pred.dim() || y.size() != m.A.rows() ||
      r.rows() != y.size() || r.cols() != y.size()) {
    throw DimensionError("kf_update: dimension mismatch");
  }
  const MatrixXd& h = m.A;
  const MatrixXd& p = pred.cov();
  const MatrixXd noise = r + m.Omega;
  const MatrixXd s = symmetrize(h * p * h.transpose() + noise);

  Eigen::LLT<MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("kf_update: innovation covariance singular");
  }
  // K = P Hᵀ S⁻¹ via a Cholesky solve of S Kᵀ = H P.
  const MatrixXd gain = llt.solve(h * p).transpose();

  const VectorXd innovation = y - h * pred.mean() - m.b;
  const VectorXd mean = pred.mean() + gain * innovation;

  const MatrixXd ikh =
      MatrixXd::Identity(pred.dim(), pred.dim()) - gain * h;
  const MatrixXd cov = symmetrize(ikh * p * ikh.transpose() +
                                  gain * noise * gain.transpose());
  return Gaussian(mean, cov);
}

Gaussian rts_smooth_step(const Gaussian& prior_prev, const Gaussian& predicted,
                         const Gaussian& posterior, const AffineModel& m) {
  if (m.A.rows() != predicted.dim() || m.A.cols() != prior_prev.dim() ||
      posterior.dim() != predicted.dim()) {
    throw DimensionError("rts_smooth_step: dimension mismatch");
  }
  Eigen::LLT<MatrixXd> llt(predicted.cov());
  if (llt.info() != Eigen::Success) {
    throw NumericalError("rts_smooth_step: predicted covariance singular");
  }
  // G = P_prev Aᵀ P_pred⁻¹ via a Cholesky solve of P_pred Gᵀ = A P_prev.
  const MatrixXd gain = llt.solve(m.A * prior_prev.cov()).transpose();

  const VectorXd mean =
      prior_prev.mean() + gain * (posterior.mean() - predicted.mean());
  const MatrixXd cov = symmetrize(
      prior_prev.cov() +
      gain * (posterior.cov() - predicted.cov()) * gain.transpose());
  return Gaussian(mean, cov);
}

StepResult ekf_step(const Gaussian& prior, const StateSpaceModel& model,
                    const VectorXd& y) {
  if (!model.f_jacobian || !model.h_jacobian) {
    throw std::invalid_argument("ekf_step: model lacks analytic Jacobians");
  }
  const AffineModel ft = analytic_linearize(model.f, model.f_jacobian, prior);
  Gaussian predicted = kf_predict(prior, ft, model.Q);
  const AffineModel ht =
      analytic_linearize(model.h, model.h_jacobian, predicted);
  Gaussian posterior = kf_update(predicted, ht, model.R, y);
  return {std::move(predicted), std::move(posterior)};
}

StepResult ukf_step(const Gaussian& prior, const StateSpaceModel& model,
                    const VectorXd& y, const SigmaConfig& cfg) {
  const AffineModel ft = slr_linearize(model.f, prior, cfg);
  Gaussian predicted = kf_predict(prior, ft, model.Q);
  const AffineModel ht = slr_linearize(model.h, predicted, cfg);
  Gaussian posterior = kf_update(predicted, ht, model.R, y);
  return {std::move(predicted), std::move(posterior)};
}

}  // namespace dif
