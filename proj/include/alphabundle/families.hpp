#pragma once

#include <functional>
#include <string>

#include "alphabundle/expectation.hpp"
#include "alphabundle/expression.hpp"

namespace alphabundle::families {

using expr::DensityExpression;
using expr::parse_density;

// One-dimensional normal family, theta = (mu, sigma) on R x (0, inf),
// with closed-form score, metric, skewness, connection and d(connection)
// providers and an inverse CDF for Monte Carlo.
StatisticalFamily make_normal();

// Family backed by a parsed log-density; all derivatives come from finite
// differences of the expression.
StatisticalFamily make_family_from_expression(
    const DensityExpression& density, const SampleSpace& sample_space,
    const DomainBox& domain, std::function<QuadHint(const Vector&)> quad_hint,
    std::string name = "expression");

// Chart change theta' = forward(theta). `jacobian` is d(theta)/d(theta')
// evaluated at new coordinates; when absent it is differenced from
// `inverse`. `new_sample_box` bounds the test grid used to validate
// inverse(forward) = id and drives randomized checks on the new chart.
struct Reparameterization {
  std::function<Vector(const Vector&)> forward;
  std::function<Vector(const Vector&)> inverse;
  std::function<Matrix(const Vector&)> jacobian;
  DomainBox new_domain;
  std::optional<DomainBox> new_sample_box;

  Matrix jacobian_at(const Vector& new_theta) const;
};

// Same family in the new chart: log-density composed with the inverse map.
// Validates round-trip and Jacobian invertibility on the sample grid.
StatisticalFamily reparameterize(const StatisticalFamily& family,
                                 const Reparameterization& r);

// (mu, sigma) -> (mu, log sigma) with its analytic Jacobian.
Reparameterization log_sigma_reparam();

// Standard normal quantile (inverse CDF), |error| < 1e-14.
double normal_quantile(double u);

}  // namespace alphabundle::families
