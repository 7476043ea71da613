#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "alphabundle/types.hpp"

namespace alphabundle {

// Support of the sample variable x. Interval bounds may be infinite,
// which covers half-lines; the whole-real-line kind is the doubly
// infinite case and is integrated with Gauss-Hermite.
struct SampleSpace {
  enum class Kind { RealLine, Interval };
  Kind kind = Kind::RealLine;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  static SampleSpace real_line();
  static SampleSpace interval(double lo, double hi);
  bool contains(double x) const { return x > lower && x < upper; }
};

// Open box in parameter space.
struct DomainBox {
  Vector lower;
  Vector upper;

  static DomainBox unbounded(int n);
  bool contains(const Vector& theta, double margin = 0.0) const;
};

// Placement hint for quadrature nodes: x = loc + scale * (rule abscissa).
struct QuadHint {
  double loc = 0.0;
  double scale = 1.0;
};

struct MonteCarloConfig {
  long count = 10000;
  std::uint64_t seed = 0;
};

struct ExpectationStrategy {
  enum class Kind { ClosedForm, GaussHermite, MonteCarlo };
  Kind kind = Kind::GaussHermite;
  int nodes = 64;           // GaussHermite (and the interval rules)
  long count = 10000;       // MonteCarlo
  std::uint64_t seed = 0;   // MonteCarlo
  double tolerance = 1e-9;  // caller's accuracy target, recorded in reports

  static ExpectationStrategy closed_form();
  static ExpectationStrategy gauss_hermite(int nodes = 64);
  static ExpectationStrategy monte_carlo(long count, std::uint64_t seed);
};

// A parametric family p(x; theta) with theta in an open box of R^n.
// Everything beyond n, domain, sample_space and log_density is optional;
// missing pieces fall back to finite differences or are rejected where a
// fallback would be silently wrong (Monte Carlo without an inverse CDF).
struct StatisticalFamily {
  int n = 0;
  std::string name;
  DomainBox domain;
  SampleSpace sample_space;

  std::function<double(double x, const Vector& theta)> log_density;
  std::function<double(double x, const Vector& theta, int i)> analytic_score;
  std::function<double(double x, const Vector& theta, int i, int j)> analytic_score2;
  std::function<QuadHint(const Vector& theta)> quad_hint;
  std::function<double(double u, const Vector& theta)> inverse_cdf;
  MonteCarloConfig mc;

  // Closed-form tensor providers (all optional).
  std::function<Matrix(const Vector& theta)> metric_cf;
  std::function<Tensor3(const Vector& theta)> skewness_cf;
  std::function<Tensor3(const Vector& theta, double alpha)> christoffel_lower_cf;
  // d(Gamma^k_ij)/d(theta_w), layout (k,i,j) per component w.
  std::function<Tensor3(const Vector& theta, double alpha, int w)> dchristoffel_mixed_cf;

  // Box used when drawing random parameter points in tests and checks;
  // kept strictly inside `domain` so stencils never leave it.
  std::optional<DomainBox> sample_box;

  bool has_closed_form_tensors() const {
    return metric_cf && skewness_cf && static_cast<bool>(christoffel_lower_cf);
  }
  void require_in_domain(const Vector& theta, double margin = 0.0) const;
};

// E[integrand(x)] under p(x; theta), by the requested strategy.
// ClosedForm is not valid here: closed forms attach to the tensor
// operations through the family's providers, not to raw integrands.
double expect(const StatisticalFamily& family, const Vector& theta,
              const std::function<double(double)>& integrand,
              const ExpectationStrategy& strategy);

// d/dtheta_i log p(x; theta), analytic when available.
double score(const StatisticalFamily& family, const Vector& theta, double x, int i);

// Second parameter derivative of log p, symmetric in (i, j).
double score2(const StatisticalFamily& family, const Vector& theta, double x, int i,
              int j);

// Step policies, shared repo-wide.
double fd_step(double coordinate);         // first derivatives: 1e-5 * max(1, |c|)
double fd_step_second(double coordinate);  // second derivatives, see note in .cpp

}  // namespace alphabundle
