#include "alphabundle/expectation.hpp"

#include <cmath>
#include <random>

#include "alphabundle/errors.hpp"
#include "alphabundle/quadrature.hpp"

namespace alphabundle {

SampleSpace SampleSpace::real_line() { return SampleSpace{}; }

SampleSpace SampleSpace::interval(double lo, double hi) {
  if (!(lo < hi)) throw ConfigError("sample-space bounds must satisfy lower < upper");
  SampleSpace s;
  s.kind = Kind::Interval;
  s.lower = lo;
  s.upper = hi;
  return s;
}

DomainBox DomainBox::unbounded(int n) {
  DomainBox b;
  b.lower = Vector::Constant(n, -std::numeric_limits<double>::infinity());
  b.upper = Vector::Constant(n, std::numeric_limits<double>::infinity());
  return b;
}

bool DomainBox::contains(const Vector& theta, double margin) const {
  if (theta.size() != lower.size()) return false;
  for (int i = 0; i < theta.size(); ++i) {
    if (!(theta[i] > lower[i] + margin && theta[i] < upper[i] - margin)) return false;
  }
  return true;
}

ExpectationStrategy ExpectationStrategy::closed_form() {
  ExpectationStrategy s;
  s.kind = Kind::ClosedForm;
  return s;
}

ExpectationStrategy ExpectationStrategy::gauss_hermite(int nodes) {
  ExpectationStrategy s;
  s.kind = Kind::GaussHermite;
  s.nodes = nodes;
  return s;
}

ExpectationStrategy ExpectationStrategy::monte_carlo(long count, std::uint64_t seed) {
  ExpectationStrategy s;
  s.kind = Kind::MonteCarlo;
  s.count = count;
  s.seed = seed;
  s.tolerance = 1e-2;
  return s;
}

void StatisticalFamily::require_in_domain(const Vector& theta, double margin) const {
  if (!domain.contains(theta, margin)) {
    std::string msg = "parameter point outside its domain";
    if (margin > 0) msg += " (margin " + std::to_string(margin) + ")";
    throw DomainError(msg);
  }
}

namespace {

double check_node_value(double v, int node, double x) {
  if (!std::isfinite(v)) {
    throw EvaluationError("non-finite integrand value at node " + std::to_string(node) +
                          " (x = " + std::to_string(x) + ")");
  }
  return v;
}

// Gauss-Hermite over the whole real line with x = loc + sqrt(2)*scale*t.
// The e^{t^2} factor is folded into the density in log space so nothing
// overflows at the outer nodes.
double expect_hermite(const StatisticalFamily& f, const Vector& theta,
                      const std::function<double(double)>& integrand, int nodes) {
  const auto& rule = quadrature::hermite(nodes);
  QuadHint hint = f.quad_hint ? f.quad_hint(theta) : QuadHint{};
  if (!(hint.scale > 0)) throw NumericError("quadrature hint scale must be positive");
  const double width = std::sqrt(2.0) * hint.scale;
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double t = rule.nodes[i];
    const double x = hint.loc + width * t;
    const double lp = f.log_density(x, theta);
    const double factor = std::exp(lp + t * t) * width;
    const double v = check_node_value(integrand(x), i, x) * factor;
    sum += rule.weights[i] * check_node_value(v, i, x);
  }
  return sum;
}

// Finite interval: Gauss-Legendre mapped to [a, b], density included in
// the weight.
double expect_legendre(const StatisticalFamily& f, const Vector& theta,
                       const std::function<double(double)>& integrand, int nodes,
                       double a, double b) {
  const auto& rule = quadrature::legendre(nodes);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double x = mid + half * rule.nodes[i];
    const double p = std::exp(f.log_density(x, theta));
    const double v = check_node_value(integrand(x), i, x) * p * half;
    sum += rule.weights[i] * check_node_value(v, i, x);
  }
  return sum;
}

// Half-line: Gauss-Laguerre with x = a + scale*t (mirrored for upper
// half-lines); e^{t} folded into the density in log space.
double expect_laguerre(const StatisticalFamily& f, const Vector& theta,
                       const std::function<double(double)>& integrand, int nodes,
                       double endpoint, int direction) {
  const auto& rule = quadrature::laguerre(nodes);
  QuadHint hint = f.quad_hint ? f.quad_hint(theta) : QuadHint{};
  if (!(hint.scale > 0)) throw NumericError("quadrature hint scale must be positive");
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double t = rule.nodes[i];
    const double x = endpoint + direction * hint.scale * t;
    const double lp = f.log_density(x, theta);
    const double factor = std::exp(lp + t) * hint.scale;
    const double v = check_node_value(integrand(x), i, x) * factor;
    sum += rule.weights[i] * check_node_value(v, i, x);
  }
  return sum;
}

double expect_quadrature(const StatisticalFamily& f, const Vector& theta,
                         const std::function<double(double)>& integrand, int nodes) {
  const SampleSpace& s = f.sample_space;
  const bool lo_inf = std::isinf(s.lower), hi_inf = std::isinf(s.upper);
  if (s.kind == SampleSpace::Kind::RealLine || (lo_inf && hi_inf)) {
    return expect_hermite(f, theta, integrand, nodes);
  }
  if (!lo_inf && !hi_inf) {
    return expect_legendre(f, theta, integrand, nodes, s.lower, s.upper);
  }
  if (!lo_inf) return expect_laguerre(f, theta, integrand, nodes, s.lower, +1);
  return expect_laguerre(f, theta, integrand, nodes, s.upper, -1);
}

double expect_monte_carlo(const StatisticalFamily& f, const Vector& theta,
                          const std::function<double(double)>& integrand, long count,
                          std::uint64_t seed) {
  if (!f.inverse_cdf) {
    throw UnsupportedError(
        "Monte-Carlo expectation requires the family to supply an inverse CDF");
  }
  if (count < 1) throw ConfigError("Monte-Carlo sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double sum = 0.0;
  for (long i = 0; i < count; ++i) {
    double u = unif(rng);
    // keep away from the CDF tails where the inverse blows up
    u = std::min(std::max(u, 1e-15), 1.0 - 1e-15);
    const double x = f.inverse_cdf(u, theta);
    sum += check_node_value(integrand(x), static_cast<int>(i), x);
  }
  return sum / static_cast<double>(count);
}

}  // namespace

double expect(const StatisticalFamily& family, const Vector& theta,
              const std::function<double(double)>& integrand,
              const ExpectationStrategy& strategy) {
  family.require_in_domain(theta);
  switch (strategy.kind) {
    case ExpectationStrategy::Kind::ClosedForm:
      throw UnsupportedError(
          "closed-form strategy applies to tensor operations with closed-form "
          "providers, not to raw integrands");
    case ExpectationStrategy::Kind::GaussHermite:
      if (strategy.nodes < 2) throw ConfigError("quadrature node count must be >= 2");
      return expect_quadrature(family, theta, integrand, strategy.nodes);
    case ExpectationStrategy::Kind::MonteCarlo:
      return expect_monte_carlo(family, theta, integrand, strategy.count,
                                strategy.seed);
  }
  throw ConfigError("unknown expectation strategy");
}

double fd_step(double coordinate) { return 1e-5 * std::max(1.0, std::abs(coordinate)); }

// Second derivatives use a wider step with fourth-order stencils: the
// three-point rule at 1e-5 leaves ~1e-6 of cancellation noise on d2(log p),
// which is too coarse for the 1e-6 tensor agreement targets. The wide-step
// O(h^4) stencil keeps both truncation and round-off near 1e-9.
double fd_step_second(double coordinate) {
  return 1e-3 * std::max(1.0, std::abs(coordinate));
}

namespace {

double log_density_guarded(const StatisticalFamily& f, const Vector& theta, double x) {
  const double v = f.log_density(x, theta);
  if (!std::isfinite(v)) {
    throw EvaluationError("non-finite log-density at x = " + std::to_string(x));
  }
  return v;
}

}  // namespace

double score(const StatisticalFamily& family, const Vector& theta, double x, int i) {
  if (!family.sample_space.contains(x)) {
    throw DomainError("sample value outside the support");
  }
  if (family.analytic_score) return family.analytic_score(x, theta, i);
  const double h = fd_step(theta[i]);
  Vector tp = theta, tm = theta;
  tp[i] += h;
  tm[i] -= h;
  family.require_in_domain(tp);
  family.require_in_domain(tm);
  return (log_density_guarded(family, tp, x) - log_density_guarded(family, tm, x)) /
         (2.0 * h);
}

double score2(const StatisticalFamily& family, const Vector& theta, double x, int i,
              int j) {
  if (!family.sample_space.contains(x)) {
    throw DomainError("sample value outside the support");
  }
  if (family.analytic_score2) {
    return 0.5 *
           (family.analytic_score2(x, theta, i, j) + family.analytic_score2(x, theta, j, i));
  }
  if (family.analytic_score) {
    // One numeric differentiation of the exact first derivative, with the
    // wide-step O(h^4) stencil to keep the truncation near 1e-9.
    auto d4 = [&](int deriv, int of) {
      const double h = fd_step_second(theta[deriv]);
      Vector a = theta, b = theta, c = theta, d = theta;
      a[deriv] += 2 * h;
      b[deriv] += h;
      c[deriv] -= h;
      d[deriv] -= 2 * h;
      family.require_in_domain(a);
      family.require_in_domain(d);
      return (-family.analytic_score(x, a, of) + 8.0 * family.analytic_score(x, b, of) -
              8.0 * family.analytic_score(x, c, of) + family.analytic_score(x, d, of)) /
             (12.0 * h);
    };
    const double dij = d4(j, i);
    if (i == j) return dij;
    return 0.5 * (dij + d4(i, j));
  }

  auto l = [&](const Vector& t) { return log_density_guarded(family, t, x); };
  const double hi = fd_step_second(theta[i]);
  if (i == j) {
    // five-point O(h^4) second derivative
    Vector t1 = theta, t2 = theta, t3 = theta, t4 = theta;
    t1[i] += 2 * hi;
    t2[i] += hi;
    t3[i] -= hi;
    t4[i] -= 2 * hi;
    family.require_in_domain(t1);
    family.require_in_domain(t4);
    return (-l(t1) + 16.0 * l(t2) - 30.0 * l(theta) + 16.0 * l(t3) - l(t4)) /
           (12.0 * hi * hi);
  }
  // cross derivative as two nested O(h^4) first-derivative stencils
  const double hj = fd_step_second(theta[j]);
  auto d_j = [&](Vector t) {
    Vector a = t, b = t, c = t, d = t;
    a[j] += 2 * hj;
    b[j] += hj;
    c[j] -= hj;
    d[j] -= 2 * hj;
    family.require_in_domain(a);
    family.require_in_domain(d);
    return (-l(a) + 8.0 * l(b) - 8.0 * l(c) + l(d)) / (12.0 * hj);
  };
  Vector a = theta, b = theta, c = theta, d = theta;
  a[i] += 2 * hi;
  b[i] += hi;
  c[i] -= hi;
  d[i] -= 2 * hi;
  family.require_in_domain(a);
  family.require_in_domain(d);
  return (-d_j(a) + 8.0 * d_j(b) - 8.0 * d_j(c) + d_j(d)) / (12.0 * hi);
}

}  // namespace alphabundle
