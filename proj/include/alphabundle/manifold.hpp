#pragma once

#include <vector>

#include "alphabundle/expectation.hpp"
#include "alphabundle/types.hpp"

// Chart-level alpha-geometry.
//
// Index conventions, fixed repo-wide:
//   gamma_lower(i,j,k)  = Gamma_{ijk} = E[(d_i d_j l)(d_k l)] + (1-alpha)/2 T_{ijk},
//                         symmetric in (i,j); k is the metric pairing slot.
//   gamma_mixed(k,i,j)  = Gamma^k_{ij} = Gamma_{ijs} g^{sk}   (upper index stored first).
//   curvature(i,j,k,l)  = R_{ijkl} = g(R(e_i,e_j) e_k, e_l) with
//                         R(X,Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z, i.e.
//     R_{ijkl} = (d_i Gamma^s_{jk} - d_j Gamma^s_{ik}) g_{sl}
//              + Gamma_{itl} Gamma^t_{jk} - Gamma_{jtl} Gamma^t_{ik}.
// This is the ordering under which the normal family has
// R_1212 = (1 - alpha^2)/sigma^4 and sectional curvature -(1-alpha^2)/2.

namespace alphabundle::manifold {

// Fisher information matrix; symmetrized, positive definite or throws.
Matrix fisher_metric(const StatisticalFamily& family, const Vector& theta,
                     const ExpectationStrategy& strategy);

// Totally symmetric third score moment T_{ijk}.
Tensor3 skewness_tensor(const StatisticalFamily& family, const Vector& theta,
                        const ExpectationStrategy& strategy);

Tensor3 christoffel_lower(const StatisticalFamily& family, const Vector& theta,
                          double alpha, const ExpectationStrategy& strategy);

Tensor3 christoffel_mixed(const StatisticalFamily& family, const Vector& theta,
                          double alpha, const ExpectationStrategy& strategy);

// Derivative step for the dGamma finite differences.
double curvature_step(double coordinate);

Tensor4 curvature_tensor(const StatisticalFamily& family, const Vector& theta,
                         double alpha, const ExpectationStrategy& strategy,
                         double h_scale = 1.0);

// -R_1212 / det g, n = 2 only.
double sectional_curvature(const StatisticalFamily& family, const Vector& theta,
                           double alpha, const ExpectationStrategy& strategy);

struct FlatnessReport {
  double max_abs_curvature = 0.0;
  double tolerance = 0.0;
  bool flat = false;
  Vector argmax_theta;
};

FlatnessReport alpha_flatness(const StatisticalFamily& family,
                              const std::vector<Vector>& grid, double alpha, double tol,
                              const ExpectationStrategy& strategy);

struct TrajectorySample {
  double t = 0.0;
  Vector theta;
  Vector velocity;
  // Step-doubling error estimate of the step that produced this sample
  // (0 for the initial sample).
  double step_error = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double alpha = 0.0;
  double dt = 0.0;
  bool early_exit = false;  // left the domain before t_end
  double exit_time = 0.0;

  const TrajectorySample& back() const { return samples.back(); }
  double max_step_error() const;
};

// Integrates dd(theta)^k + Gamma^k_ij d(theta)^i d(theta)^j = 0 with
// classical RK4 at fixed step dt. Stops early (flagged) if any stage
// leaves the domain.
Trajectory geodesic(const StatisticalFamily& family, const Vector& theta0,
                    const Vector& v0, double alpha, double t_end, double dt,
                    const ExpectationStrategy& strategy);

// Chart covariant derivative (nabla_X Y)^k = X^i d_i Y^k + Gamma^k_ij X^i Y^j
// for a vector field given by value and Jacobian at the point.
Vector covariant_derivative(const StatisticalFamily& family, const Vector& theta,
                            double alpha, const ExpectationStrategy& strategy,
                            const Vector& x_value, const Vector& y_value,
                            const Matrix& y_jacobian);

}  // namespace alphabundle::manifold
