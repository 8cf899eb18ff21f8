#ifndef DIF_LINEARIZE_HPP
#define DIF_LINEARIZE_HPP

#include <functional>
#include <vector>

#include "dif/gaussian.hpp"

namespace dif {

using VectorFn = std::function<VectorXd(const VectorXd&)>;
using JacobianFn = std::function<MatrixXd(const VectorXd&)>;

/// Affine-plus-noise surrogate of a nonlinear function:
/// g(x) ~ A x + b + e with e ~ N(0, Omega). Omega captures the
/// linearization error and is zero for analytic (Jacobian) linearization.
struct AffineModel {
  MatrixXd A;
  VectorXd b;
  MatrixXd Omega;
};

/// Scaled unscented transform tuning.
struct SigmaConfig {
  double alpha = 1.0;
  double kappa = 0.0;
  double beta = 2.0;

  /// Tuning with alpha = sqrt(3/n), kappa = n(3/2 - alpha^2)/alpha^2,
  /// beta = 2. Puts mean-weight 1/3 on the central sigma point for every n.
  static SigmaConfig for_dimension(Eigen::Index n);
};

struct SigmaPoints {
  std::vector<VectorXd> points;  // 2n+1 points, mean first
  std::vector<double> w_mean;
  std::vector<double> w_cov;
};

/// First-order expansion about the mean of q: A = J(mean),
/// b = f(mean) - A mean, Omega = 0.
AffineModel analytic_linearize(const VectorFn& f, const JacobianFn& jacobian,
                               const Gaussian& q);

/// 2n+1 scaled sigma points of q with lambda = alpha^2 (n + kappa) - n.
SigmaPoints sigma_points(const Gaussian& q, const SigmaConfig& cfg);

/// Statistical linear regression of f with respect to q via the unscented
/// transform: the best affine fit A x + b plus residual covariance Omega
/// (clipped to PSD).
AffineModel slr_linearize(const VectorFn& f, const Gaussian& q,
                          const SigmaConfig& cfg);

}  // namespace dif

#endif
