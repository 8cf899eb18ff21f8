#include "dif/models.hpp"

#include <cmath>

namespace dif {

namespace {

constexpr double kOmegaEps = 1e-9;

void validate_covariance(const MatrixXd& m, const char* what) {
  const MatrixXd s = symmetrize(m);
  chol_psd(s);  // throws if indefinite
  if ((m - s).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    throw NumericalError(std::string(what) + ": covariance asymmetric");
  }
}

}  // namespace

StateSpaceModel cubic_model(double a, double q, double r) {
  if (!(q > 0.0) || !(r > 0.0)) {
    throw std::invalid_argument("cubic_model: Q and R must be positive");
  }
  StateSpaceModel m;
  m.state_dim = 1;
  m.meas_dim = 1;
  m.f = [a](const VectorXd& x) {
    VectorXd out(1);
    out(0) = a * x(0) * x(0) * x(0);
    return out;
  };
  m.f_jacobian = [a](const VectorXd& x) {
    MatrixXd j(1, 1);
    j(0, 0) = 3.0 * a * x(0) * x(0);
    return j;
  };
  m.h = [](const VectorXd& x) { return x; };
  m.h_jacobian = [](const VectorXd&) { return MatrixXd::Identity(1, 1); };
  m.Q = MatrixXd::Constant(1, 1, q);
  m.R = MatrixXd::Constant(1, 1, r);
  return m;
}

MatrixXd ct_transition_matrix(double omega, double t) {
  if (!(t > 0.0)) {
    throw std::invalid_argument("ct_transition_matrix: T must be positive");
  }
  double s, c, sot, vot;  // sin, cos, sin(Tw)/w, (1-cos(Tw))/w
  if (std::abs(omega) < kOmegaEps) {
    s = 0.0;
    c = 1.0;
    sot = t;
    vot = 0.0;
  } else {
    s = std::sin(t * omega);
    c = std::cos(t * omega);
    sot = s / omega;
    vot = (1.0 - c) / omega;
  }
  MatrixXd f = MatrixXd::Identity(5, 5);
  f(0, 1) = sot;
  f(0, 3) = -vot;
  f(1, 1) = c;
  f(1, 3) = -s;
  f(2, 1) = vot;
  f(2, 3) = sot;
  f(3, 1) = s;
  f(3, 3) = c;
  return f;
}

MatrixXd ct_transition_jacobian(const VectorXd& x, double t) {
  if (x.size() != 5) {
    throw DimensionError("ct_transition_jacobian: state must be 5-D");
  }
  const double omega = x(4);
  const double vx = x(1);
  const double vy = x(3);

  double s, c, dsot, dvot;  // d(sin(Tw)/w)/dw and d((1-cos(Tw))/w)/dw
  if (std::abs(omega) < kOmegaEps) {
    s = 0.0;
    c = 1.0;
    dsot = 0.0;
    dvot = 0.5 * t * t;
  } else {
    s = std::sin(t * omega);
    c = std::cos(t * omega);
    dsot = (t * omega * c - s) / (omega * omega);
    dvot = (t * omega * s - (1.0 - c)) / (omega * omega);
  }

  MatrixXd j = ct_transition_matrix(omega, t);
  j(0, 4) = vx * dsot - vy * dvot;
  j(1, 4) = -vx * t * s - vy * t * c;
  j(2, 4) = vx * dvot + vy * dsot;
  j(3, 4) = vx * t * c - vy * t * s;
  return j;
}

MatrixXd ct_process_noise(double q1, double q2, double t) {
  if (!(q1 > 0.0) || !(q2 > 0.0) || !(t > 0.0)) {
    throw std::invalid_argument("ct_process_noise: parameters must be positive");
  }
  const double t3 = q1 * t * t * t / 3.0;
  const double t2 = q1 * t * t / 2.0;
  MatrixXd q = MatrixXd::Zero(5, 5);
  q(0, 0) = t3;
  q(0, 1) = t2;
  q(1, 0) = t2;
  q(1, 1) = q1 * t;
  q(2, 2) = t3;
  q(2, 3) = t2;
  q(3, 2) = t2;
  q(3, 3) = q1 * t;
  q(4, 4) = q2;
  return q;
}

MatrixXd ct_measurement_matrix() {
  MatrixXd h = MatrixXd::Zero(2, 5);
  h(0, 0) = 1.0;
  h(1, 2) = 1.0;
  return h;
}

StateSpaceModel ct_model(const CtParams& p) {
  if (!(p.T > 0.0) || !(p.q1 > 0.0) || !(p.q2 > 0.0) || !(p.sigma2 > 0.0)) {
    throw std::invalid_argument("ct_model: parameters must be positive");
  }
  const double t = p.T;
  const MatrixXd h = ct_measurement_matrix();

  StateSpaceModel m;
  m.state_dim = 5;
  m.meas_dim = 2;
  m.f = [t](const VectorXd& x) -> VectorXd {
    return ct_transition_matrix(x(4), t) * x;
  };
  m.f_jacobian = [t](const VectorXd& x) {
    return ct_transition_jacobian(x, t);
  };
  m.h = [h](const VectorXd& x) -> VectorXd { return h * x; };
  m.h_jacobian = [h](const VectorXd&) { return h; };
  m.Q = ct_process_noise(p.q1, p.q2, t);
  m.R = p.sigma2 * MatrixXd::Identity(2, 2);
  validate_covariance(m.Q, "ct_model Q");
  validate_covariance(m.R, "ct_model R");
  return m;
}

Gaussian ct_initial_prior() {
  VectorXd mean(5);
  mean << 130.0, 35.0, -20.0, -20.0, -4.0 * M_PI / 180.0;
  VectorXd var(5);
  var << 5.0, 5.0, 5.0, 5.0, 1e-2;
  return Gaussian(mean, var.asDiagonal());
}

}  // namespace dif
