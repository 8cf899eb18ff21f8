#ifndef DIF_GRID_ORACLE_HPP
#define DIF_GRID_ORACLE_HPP

#include "dif/gaussian.hpp"
#include "dif/models.hpp"

namespace dif {

struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  int n = 2001;
};

// Density samples (probability per unit length) on a uniform 1-D grid,
// normalized so the trapezoid integral is 1.
struct Grid1D {
  double lo = 0.0;
  double hi = 1.0;
  int n = 0;
  VectorXd values;

  double dx() const { return (hi - lo) / (n - 1); }
  double x(int i) const { return lo + dx() * i; }
};

// Bounds for the next-state axis: pilot predictive moments by quadrature
// over the prior's +-10 sigma range, then +-10 predictive std around the
// predictive mean.
GridSpec default_grid_spec(const Gaussian& prior, const StateSpaceModel& model,
                           int n = 2001);

// p(x_k) = integral of N(x_k; f(s), Q) prior(s) ds, trapezoid over a
// companion s-grid spanning the prior's +-10 sigma.
Grid1D grid_predictive(const Gaussian& prior, const StateSpaceModel& model,
                       const GridSpec& spec);

// p(x_k | y) proportional to N(y; h(x_k), R) * predictive(x_k).
Grid1D grid_posterior(const Gaussian& prior, const StateSpaceModel& model,
                      double y, const GridSpec& spec);

Gaussian grid_moments(const Grid1D& g);

// KL(g || q) by trapezoid quadrature of g*ln(g/q), with 0*ln 0 := 0.
// May come out slightly negative (>= -1e-9) from quadrature error.
double kl_grid_vs_gaussian(const Grid1D& g, const Gaussian& q);

}  // namespace dif

#endif
