#include "dif/grid_oracle.hpp"

#include <cmath>
#include <numbers>

namespace dif {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_scalar_model(const StateSpaceModel& model) {
  if (model.state_dim != 1 || model.meas_dim != 1) {
    throw DimensionError("grid oracle supports 1-D models only");
  }
}

void require_spec(const GridSpec& spec) {
  if (!(spec.hi > spec.lo) || spec.n < 2) {
    throw std::invalid_argument("grid spec needs hi > lo and n >= 2");
  }
}

double trapezoid_weight(int i, int n, double dx) {
  return (i == 0 || i == n - 1) ? 0.5 * dx : dx;
}

// Companion grid over the prior axis with the prior density folded into the
// trapezoid weights, plus the transition pushed through each node.
struct PriorQuadrature {
  VectorXd weighted_density;  // w_i * prior pdf at s_i
  VectorXd f_values;          // f(s_i)
};

PriorQuadrature prior_quadrature(const Gaussian& prior,
                                 const StateSpaceModel& model, int n) {
  const double mu = prior.mean()(0);
  const double var = prior.cov()(0, 0);
  if (!(var > 0.0)) {
    throw NumericalError("grid oracle: prior variance must be positive");
  }
  const double sd = std::sqrt(var);
  const double lo = mu - 10.0 * sd;
  const double hi = mu + 10.0 * sd;
  const double dx = (hi - lo) / (n - 1);
  const double norm = 1.0 / std::sqrt(kTwoPi * var);

  PriorQuadrature q;
  q.weighted_density.resize(n);
  q.f_values.resize(n);
  VectorXd s(1);
  for (int i = 0; i < n; ++i) {
    const double si = lo + dx * i;
    const double z = (si - mu) / sd;
    q.weighted_density(i) =
        trapezoid_weight(i, n, dx) * norm * std::exp(-0.5 * z * z);
    s(0) = si;
    q.f_values(i) = model.f(s)(0);
  }
  return q;
}

double trapezoid_integral(const Grid1D& g) {
  const double dx = g.dx();
  double total = 0.0;
  for (int i = 0; i < g.n; ++i) {
    total += trapezoid_weight(i, g.n, dx) * g.values(i);
  }
  return total;
}

void normalize_and_check_bounds(Grid1D& g) {
  const double mass = trapezoid_integral(g);
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw NumericalError("grid oracle: density mass vanished on the grid");
  }
  g.values /= mass;
  const double boundary = std::max(g.values(0), g.values(g.n - 1)) * g.dx();
  if (boundary > 1e-6) {
    throw NumericalError(
        "grid oracle: density mass reaches the grid boundary; widen the grid "
        "bounds");
  }
}

Grid1D evaluate_grid(const Gaussian& prior, const StateSpaceModel& model,
                     const GridSpec& spec, bool with_likelihood, double y) {
  require_scalar_model(model);
  require_spec(spec);

  const PriorQuadrature pq = prior_quadrature(prior, model, spec.n);
  const double q_var = model.Q(0, 0);
  const double r_var = model.R(0, 0);

  Grid1D g;
  g.lo = spec.lo;
  g.hi = spec.hi;
  g.n = spec.n;
  g.values.resize(spec.n);

  VectorXd xv(1);
  for (int j = 0; j < spec.n; ++j) {
    const double xj = g.x(j);
    const double pred =
        (pq.weighted_density.array() *
         (-(xj - pq.f_values.array()).square() / (2.0 * q_var)).exp())
            .sum();
    double v = pred / std::sqrt(kTwoPi * q_var);
    if (with_likelihood) {
      xv(0) = xj;
      const double resid = y - model.h(xv)(0);
      v *= std::exp(-0.5 * resid * resid / r_var);
    }
    g.values(j) = v;
  }
  normalize_and_check_bounds(g);
  return g;
}

void require_normalized(const Grid1D& g) {
  if (g.n < 2 || g.values.size() != g.n || !(g.hi > g.lo)) {
    throw std::invalid_argument("grid oracle: malformed grid");
  }
  if (std::abs(trapezoid_integral(g) - 1.0) > 1e-6) {
    throw std::invalid_argument("grid oracle: grid is not normalized");
  }
}

}  // namespace

GridSpec default_grid_spec(const Gaussian& prior, const StateSpaceModel& model,
                           int n) {
  require_scalar_model(model);
  if (n < 2) throw std::invalid_argument("grid spec needs n >= 2");

  const PriorQuadrature pq = prior_quadrature(prior, model, n);
  const double mass = pq.weighted_density.sum();
  const double m1 = (pq.weighted_density.array() * pq.f_values.array()).sum() /
                    mass;
  const double m2 = (pq.weighted_density.array() *
                     pq.f_values.array().square())
                        .sum() /
                    mass;
  const double pred_var = std::max(m2 - m1 * m1, 0.0) + model.Q(0, 0);
  const double sd = std::sqrt(pred_var);
  return {m1 - 10.0 * sd, m1 + 10.0 * sd, n};
}

Grid1D grid_predictive(const Gaussian& prior, const StateSpaceModel& model,
                       const GridSpec& spec) {
  return evaluate_grid(prior, model, spec, false, 0.0);
}

Grid1D grid_posterior(const Gaussian& prior, const StateSpaceModel& model,
                      double y, const GridSpec& spec) {
  return evaluate_grid(prior, model, spec, true, y);
}

Gaussian grid_moments(const Grid1D& g) {
  require_normalized(g);
  const double dx = g.dx();
  double mean = 0.0;
  for (int i = 0; i < g.n; ++i) {
    mean += trapezoid_weight(i, g.n, dx) * g.x(i) * g.values(i);
  }
  double var = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double d = g.x(i) - mean;
    var += trapezoid_weight(i, g.n, dx) * d * d * g.values(i);
  }
  if (!(var > 0.0)) {
    throw NumericalError("grid oracle: degenerate grid density");
  }
  VectorXd m(1);
  m(0) = mean;
  MatrixXd p(1, 1);
  p(0, 0) = var;
  return Gaussian(std::move(m), std::move(p));
}

double kl_grid_vs_gaussian(const Grid1D& g, const Gaussian& q) {
  require_normalized(g);
  if (q.dim() != 1) {
    throw DimensionError("kl_grid_vs_gaussian expects a 1-D Gaussian");
  }
  const double mu = q.mean()(0);
  const double var = q.cov()(0, 0);
  if (!(var > 0.0)) {
    throw NumericalError("kl_grid_vs_gaussian: q variance must be positive");
  }
  const double log_norm = -0.5 * std::log(kTwoPi * var);
  const double dx = g.dx();
  double kl = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double p = g.values(i);
    if (p <= 0.0) continue;  // 0 * ln 0 := 0
    const double d = g.x(i) - mu;
    const double log_q = log_norm - 0.5 * d * d / var;
    kl += trapezoid_weight(i, g.n, dx) * p * (std::log(p) - log_q);
  }
  return kl;
}

}  // namespace dif
