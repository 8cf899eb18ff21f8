#ifndef DIF_GAUSSIAN_HPP
#define DIF_GAUSSIAN_HPP

#include <Eigen/Dense>
#include <stdexcept>

namespace dif {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Inconsistent input dimensions.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A factorization or solve failed beyond recovery.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (M + Mᵀ)/2. The result is exactly symmetric.
MatrixXd symmetrize(const MatrixXd& m);

/// Lower Cholesky factor of a symmetric PSD matrix. Near-singular inputs
/// are recovered with escalating diagonal jitter; indefinite inputs throw
/// NumericalError carrying the smallest eigenvalue estimate.
MatrixXd chol_psd(const MatrixXd& p);

/// Clamp the negative eigenvalues of a symmetric matrix to zero.
MatrixXd clip_psd(const MatrixXd& m);

/// Multivariate normal belief. Construction validates that the covariance
/// is square, symmetric to 1e-12 relative tolerance and PSD (eigenvalues
/// >= -1e-10 * trace), then stores an exactly symmetric copy.
class Gaussian {
 public:
  Gaussian(VectorXd mean, MatrixXd cov);

  const VectorXd& mean() const { return mean_; }
  const MatrixXd& cov() const { return cov_; }
  Eigen::Index dim() const { return mean_.size(); }

 private:
  VectorXd mean_;
  MatrixXd cov_;
};

/// KL(p || q) between two Gaussians of equal dimension, in nats.
/// q must have a nonsingular covariance.
double kl_gaussian(const Gaussian& p, const Gaussian& q);

}  // namespace dif

#endif
