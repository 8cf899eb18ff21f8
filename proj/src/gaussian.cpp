#include "dif/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dif {

namespace {

double min_eigenvalue(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Invariant check: all eigenvalues >= -1e-10 * trace. The cheap path shifts
// the diagonal by that bound and attempts a Cholesky factorization; only on
// failure is the spectrum actually computed.
bool is_psd_within_tolerance(const MatrixXd& m) {
  const Eigen::Index d = m.rows();
  const double bound = 1e-10 * m.trace();
  const double shift = std::max(bound, 0.0) + 1e-300;
  Eigen::LLT<MatrixXd> llt(m + shift * MatrixXd::Identity(d, d));
  if (llt.info() == Eigen::Success) return true;
  return min_eigenvalue(m) >= -bound;
}

}  // namespace

MatrixXd symmetrize(const MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("symmetrize: matrix must be square");
  }
  return 0.5 * (m + m.transpose());
}

MatrixXd chol_psd(const MatrixXd& p) {
  if (p.rows() != p.cols()) {
    throw DimensionError("chol_psd: matrix must be square");
  }
  if (!p.allFinite()) {
    throw NumericalError("chol_psd: non-finite entries");
  }
  const Eigen::Index d = p.rows();
  const MatrixXd m = symmetrize(p);

  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  double jitter =
      1e-12 * std::max(m.trace(), 0.0) / static_cast<double>(d) + 1e-300;
  for (int retry = 0; retry < 3; ++retry, jitter *= 100.0) {
    Eigen::LLT<MatrixXd> jl(m + jitter * MatrixXd::Identity(d, d));
    if (jl.info() == Eigen::Success) return jl.matrixL();
  }
  throw NumericalError("chol_psd: matrix indefinite, smallest eigenvalue " +
                       std::to_string(min_eigenvalue(m)));
}

MatrixXd clip_psd(const MatrixXd& m) {
  MatrixXd s = symmetrize(m);
  if (!s.allFinite()) {
    throw NumericalError("clip_psd: non-finite entries");
  }
  if (Eigen::LLT<MatrixXd>(s).info() == Eigen::Success) return s;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s);
  const VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  return symmetrize(es.eigenvectors() * clipped.asDiagonal() *
                    es.eigenvectors().transpose());
}

Gaussian::Gaussian(VectorXd mean, MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() == 0) {
    throw DimensionError("Gaussian: empty mean");
  }
  if (cov_.rows() != cov_.cols() || cov_.rows() != mean_.size()) {
    throw DimensionError("Gaussian: mean/covariance dimension mismatch");
  }
  if (!mean_.allFinite() || !cov_.allFinite()) {
    throw NumericalError("Gaussian: non-finite entries");
  }
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  const double asym = (cov_ - cov_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw NumericalError("Gaussian: covariance asymmetric by " +
                         std::to_string(asym));
  }
  cov_ = symmetrize(cov_);
  if (!is_psd_within_tolerance(cov_)) {
    throw NumericalError(
        "Gaussian: covariance indefinite, smallest eigenvalue " +
        std::to_string(min_eigenvalue(cov_)));
  }
}

double kl_gaussian(const Gaussian& p, const Gaussian& q) {
  if (p.dim() != q.dim()) {
    throw DimensionError("kl_gaussian: dimension mismatch");
  }
  const Eigen::Index d = p.dim();

  Eigen::LLT<MatrixXd> lq(q.cov());
  if (lq.info() != Eigen::Success) {
    throw NumericalError("kl_gaussian: q covariance singular");
  }

  const MatrixXd q_inv_p = lq.solve(p.cov());
  const VectorXd diff = q.mean() - p.mean();
  const double maha = diff.dot(lq.solve(diff));

  const MatrixXd lq_mat = lq.matrixL();
  const double logdet_q =
      2.0 * lq_mat.diagonal().array().log().sum();
  const MatrixXd lp = chol_psd(p.cov());
  const double logdet_p = 2.0 * lp.diagonal().array().log().sum();

  const double kl = 0.5 * (q_inv_p.trace() + maha -
                           static_cast<double>(d) + logdet_q - logdet_p);
  return std::max(kl, 0.0);
}

}  // namespace dif
