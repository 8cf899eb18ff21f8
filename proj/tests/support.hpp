#ifndef DIF_TESTS_SUPPORT_HPP
#define DIF_TESTS_SUPPORT_HPP

#include <random>
#include <vector>

#include "dif/gaussian.hpp"
#include "dif/kalman.hpp"
#include "dif/linearize.hpp"
#include "dif/models.hpp"

// Shared generators and hand-rolled oracles. The oracles use textbook
// formulas with explicit inverses on purpose: they must not share code
// paths with the library.
namespace test_support {

using dif::AffineModel;
using dif::Gaussian;
using dif::MatrixXd;
using dif::StateSpaceModel;
using dif::VectorXd;

inline VectorXd random_vector(int n, std::mt19937_64& rng,
                              double scale = 1.0) {
  std::normal_distribution<double> nd;
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * nd(rng);
  return v;
}

inline MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng,
                              double scale = 1.0) {
  std::normal_distribution<double> nd;
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * nd(rng);
  return m;
}

// Well-conditioned random PSD matrix: A Aᵀ plus a diagonal floor.
inline MatrixXd random_psd(int n, std::mt19937_64& rng, double scale = 1.0) {
  const MatrixXd a = random_matrix(n, n, rng);
  return dif::symmetrize(scale * (a * a.transpose()) +
                         0.1 * scale * MatrixXd::Identity(n, n));
}

inline Gaussian random_gaussian(int n, std::mt19937_64& rng,
                                double mean_scale = 1.0,
                                double cov_scale = 1.0) {
  return Gaussian(random_vector(n, rng, mean_scale),
                  random_psd(n, rng, cov_scale));
}

struct LinearParts {
  MatrixXd F;
  VectorXd c;
  MatrixXd H;
  VectorXd d;
};

// Random affine model with exact Jacobians; the transition is contracted
// so multi-step runs stay well scaled.
inline StateSpaceModel random_linear_model(int state_dim, int meas_dim,
                                           std::mt19937_64& rng,
                                           LinearParts* parts = nullptr) {
  LinearParts lp;
  lp.F = random_matrix(state_dim, state_dim, rng, 0.6);
  lp.c = random_vector(state_dim, rng);
  lp.H = random_matrix(meas_dim, state_dim, rng);
  lp.d = random_vector(meas_dim, rng);

  StateSpaceModel m;
  m.state_dim = state_dim;
  m.meas_dim = meas_dim;
  m.Q = random_psd(state_dim, rng, 0.5);
  m.R = random_psd(meas_dim, rng, 0.5);
  const MatrixXd f = lp.F;
  const VectorXd c = lp.c;
  const MatrixXd h = lp.H;
  const VectorXd d = lp.d;
  m.f = [f, c](const VectorXd& x) -> VectorXd { return f * x + c; };
  m.f_jacobian = [f](const VectorXd&) { return f; };
  m.h = [h, d](const VectorXd& x) -> VectorXd { return h * x + d; };
  m.h_jacobian = [h](const VectorXd&) { return h; };
  if (parts) *parts = lp;
  return m;
}

inline MatrixXd fd_jacobian(const dif::VectorFn& f, const VectorXd& x,
                            double eps = 1e-6) {
  const VectorXd fx = f(x);
  MatrixXd j(fx.size(), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    VectorXd hi = x;
    VectorXd lo = x;
    hi(k) += eps;
    lo(k) -= eps;
    j.col(k) = (f(hi) - f(lo)) / (2.0 * eps);
  }
  return j;
}

// Exact Bayes update of a Gaussian through an affine measurement map.
inline Gaussian conditioning_oracle(const Gaussian& pred, const AffineModel& h,
                                    const MatrixXd& r, const VectorXd& y) {
  const MatrixXd s =
      h.A * pred.cov() * h.A.transpose() + r + h.Omega;
  const MatrixXd cross = pred.cov() * h.A.transpose();
  const MatrixXd sinv = s.inverse();
  const VectorXd mean =
      pred.mean() + cross * sinv * (y - h.A * pred.mean() - h.b);
  const MatrixXd cov = pred.cov() - cross * sinv * cross.transpose();
  return Gaussian(mean, dif::symmetrize(cov));
}

// Batch one-step smoother: condition the joint of (x_{k-1}, x_k) on y and
// read off the x_{k-1} marginal.
inline Gaussian smoothing_oracle(const Gaussian& prior, const AffineModel& f,
                                 const MatrixXd& q, const AffineModel& h,
                                 const MatrixXd& r, const VectorXd& y) {
  const MatrixXd p11 = prior.cov();
  const MatrixXd p12 = p11 * f.A.transpose();
  const MatrixXd p22 = f.A * p11 * f.A.transpose() + q + f.Omega;
  const VectorXd mu2 = f.A * prior.mean() + f.b;

  const MatrixXd s = h.A * p22 * h.A.transpose() + r + h.Omega;
  const MatrixXd sinv = s.inverse();
  const MatrixXd cross = p12 * h.A.transpose();  // cov(x_{k-1}, y)
  const VectorXd mean = prior.mean() + cross * sinv * (y - h.A * mu2 - h.b);
  const MatrixXd cov = p11 - cross * sinv * cross.transpose();
  return Gaussian(mean, dif::symmetrize(cov));
}

// Textbook linear Kalman recursion.
inline std::vector<Gaussian> exact_kf(const Gaussian& prior,
                                      const LinearParts& lp, const MatrixXd& q,
                                      const MatrixXd& r,
                                      const std::vector<VectorXd>& ys) {
  std::vector<Gaussian> out;
  VectorXd mu = prior.mean();
  MatrixXd p = prior.cov();
  const MatrixXd eye = MatrixXd::Identity(mu.size(), mu.size());
  for (const VectorXd& y : ys) {
    mu = lp.F * mu + lp.c;
    p = lp.F * p * lp.F.transpose() + q;
    const MatrixXd s = lp.H * p * lp.H.transpose() + r;
    const MatrixXd k = p * lp.H.transpose() * s.inverse();
    mu = mu + k * (y - lp.H * mu - lp.d);
    p = dif::symmetrize((eye - k * lp.H) * p);
    out.emplace_back(mu, p);
  }
  return out;
}

inline double max_abs_diff(const MatrixXd& a, const MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const VectorXd& a, const VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double gaussian_diff(const Gaussian& a, const Gaussian& b) {
  return std::max(max_abs_diff(a.mean(), b.mean()),
                  max_abs_diff(a.cov(), b.cov()));
}

}  // namespace test_support

#endif
