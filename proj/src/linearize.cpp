#include "dif/linearize.hpp"

#include <cmath>

namespace dif {

SigmaConfig SigmaConfig::for_dimension(Eigen::Index n) {
  if (n < 1) throw DimensionError("SigmaConfig: dimension must be positive");
  const double nd = static_cast<double>(n);
  SigmaConfig cfg;
  cfg.alpha = std::sqrt(3.0 / nd);
  const double a2 = cfg.alpha * cfg.alpha;
  cfg.kappa = nd * (1.5 - a2) / a2;
  cfg.beta = 2.0;
  return cfg;
}

AffineModel analytic_linearize(const VectorFn& f, const JacobianFn& jacobian,
                               const Gaussian& q) {
  const VectorXd fx = f(q.mean());
  const MatrixXd a = jacobian(q.mean());
  if (a.cols() != q.dim() || a.rows() != fx.size()) {
    throw DimensionError("analytic_linearize: jacobian shape mismatch");
  }
  AffineModel m;
  m.A = a;
  m.b = fx - a * q.mean();
  m.Omega = MatrixXd::Zero(fx.size(), fx.size());
  return m;
}

SigmaPoints sigma_points(const Gaussian& q, const SigmaConfig& cfg) {
  const Eigen::Index n = q.dim();
  const double nd = static_cast<double>(n);
  const double lambda = cfg.alpha * cfg.alpha * (nd + cfg.kappa) - nd;
  if (!(cfg.alpha > 0.0) || !(nd + lambda > 0.0)) {
    throw std::invalid_argument("sigma_points: alpha^2 (n + kappa) must be positive");
  }

  const MatrixXd l = chol_psd(q.cov());
  const double scale = std::sqrt(nd + lambda);

  SigmaPoints sp;
  sp.points.resize(2 * n + 1);
  sp.w_mean.resize(2 * n + 1);
  sp.w_cov.resize(2 * n + 1);

  sp.points[0] = q.mean();
  sp.w_mean[0] = lambda / (nd + lambda);
  sp.w_cov[0] = sp.w_mean[0] + 1.0 - cfg.alpha * cfg.alpha + cfg.beta;
  const double w = 1.0 / (2.0 * (nd + lambda));
  for (Eigen::Index i = 0; i < n; ++i) {
    sp.points[1 + i] = q.mean() + scale * l.col(i);
    sp.points[1 + n + i] = q.mean() - scale * l.col(i);
    sp.w_mean[1 + i] = sp.w_mean[1 + n + i] = w;
    sp.w_cov[1 + i] = sp.w_cov[1 + n + i] = w;
  }
  return sp;
}

AffineModel slr_linearize(const VectorFn& f, const Gaussian& q,
                          const SigmaConfig& cfg) {
  const SigmaPoints sp = sigma_points(q, cfg);
  const Eigen::Index n = q.dim();

  std::vector<VectorXd> fx(sp.points.size());
  for (std::size_t i = 0; i < sp.points.size(); ++i) fx[i] = f(sp.points[i]);
  const Eigen::Index m = fx[0].size();

  VectorXd zbar = VectorXd::Zero(m);
  for (std::size_t i = 0; i < fx.size(); ++i) zbar += sp.w_mean[i] * fx[i];

  MatrixXd cross = MatrixXd::Zero(n, m);
  MatrixXd outer = MatrixXd::Zero(m, m);
  for (std::size_t i = 0; i < fx.size(); ++i) {
    const VectorXd dx = sp.points[i] - q.mean();
    const VectorXd dz = fx[i] - zbar;
    cross += sp.w_cov[i] * dx * dz.transpose();
    outer += sp.w_cov[i] * dz * dz.transpose();
  }

  Eigen::LLT<MatrixXd> llt(q.cov());
  if (llt.info() != Eigen::Success) {
    throw NumericalError("slr_linearize: expansion covariance singular");
  }

  AffineModel out;
  out.A = llt.solve(cross).transpose();  // A = crossᵀ P⁻¹
  out.b = zbar - out.A * q.mean();
  const MatrixXd resid =
      symmetrize(outer - out.A * q.cov() * out.A.transpose());
  // Sub-roundoff residual means f was affine; pin Omega to exactly zero.
  const double outer_scale = outer.cwiseAbs().maxCoeff();
  if (resid.cwiseAbs().maxCoeff() <= 1e-12 * outer_scale) {
    out.Omega = MatrixXd::Zero(m, m);
  } else {
    out.Omega = clip_psd(resid);
  }
  return out;
}

}  // namespace dif
