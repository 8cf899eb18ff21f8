#ifndef DIF_MODELS_HPP
#define DIF_MODELS_HPP

#include "dif/gaussian.hpp"
#include "dif/linearize.hpp"

namespace dif {

/// Discrete-time model x_{k+1} ~ N(f(x_k), Q), y_k ~ N(h(x_k), R) with
/// additive noise. Jacobians are optional; filters that need them check.
struct StateSpaceModel {
  Eigen::Index state_dim = 0;
  Eigen::Index meas_dim = 0;
  VectorFn f;
  VectorFn h;
  MatrixXd Q;
  MatrixXd R;
  JacobianFn f_jacobian;  // may be empty
  JacobianFn h_jacobian;  // may be empty
};

/// Coordinated-turn model parameters.
struct CtParams {
  double T = 1.0;        // sampling period [s]
  double q1 = 1e-2;      // translational process noise scale [m^2/s^3]
  double q2 = 1e-2;      // turn-rate process noise [rad^2/s^2]
  double sigma2 = 1.0;   // position measurement variance [m^2]
};

/// 1-D model f(x) = a x^3, h(x) = x with analytic Jacobians.
StateSpaceModel cubic_model(double a, double q, double r);

/// Coordinated-turn transition matrix for state (px, vx, py, vy, omega).
/// For |omega| < 1e-9 the constant-velocity limit is used.
MatrixXd ct_transition_matrix(double omega, double t);

/// Jacobian of x -> F(x_5) x. Columns 1..4 equal those of F; column 5
/// adds the closed-form derivative of F in omega applied to x, with
/// series limits below |omega| = 1e-9.
MatrixXd ct_transition_jacobian(const VectorXd& x, double t);

/// Block-diagonal process noise: per-axis [[q1 T^3/3, q1 T^2/2],
/// [q1 T^2/2, q1 T]] blocks and q2 for the turn rate.
MatrixXd ct_process_noise(double q1, double q2, double t);

/// 2x5 selector picking the positions (px, py) out of the state.
MatrixXd ct_measurement_matrix();

/// Full coordinated-turn model with a linear position measurement,
/// R = sigma2 * I_2.
StateSpaceModel ct_model(const CtParams& p);

/// Benchmark prior: mean (130, 35, -20, -20, -4 pi/180),
/// covariance diag(5, 5, 5, 5, 1e-2).
Gaussian ct_initial_prior();

}  // namespace dif

#endif
