#include "alphabundle/manifold.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "alphabundle/errors.hpp"

namespace alphabundle::manifold {

namespace {

Matrix inverse_metric(const Matrix& g) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < 1e-12) {
    std::ostringstream os;
    os << "singular Fisher metric, eigenvalues:";
    if (es.info() == Eigen::Success) {
      for (int i = 0; i < es.eigenvalues().size(); ++i) os << " " << es.eigenvalues()[i];
    }
    throw SingularMetricError(os.str());
  }
  return g.inverse();
}

void check_positive_definite(const Matrix& g) { (void)inverse_metric(g); }

}  // namespace

Matrix fisher_metric(const StatisticalFamily& family, const Vector& theta,
                     const ExpectationStrategy& strategy) {
  family.require_in_domain(theta);
  const int n = family.n;
  Matrix g(n, n);
  if (strategy.kind == ExpectationStrategy::Kind::ClosedForm) {
    if (!family.metric_cf) {
      throw UnsupportedError("family '" + family.name +
                             "' has no closed-form metric provider");
    }
    g = family.metric_cf(theta);
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        g(i, j) = expect(
            family, theta,
            [&](double x) { return score(family, theta, x, i) * score(family, theta, x, j); },
            strategy);
        g(j, i) = g(i, j);
      }
    }
  }
  g = 0.5 * (g + g.transpose()).eval();
  check_positive_definite(g);
  return g;
}

Tensor3 skewness_tensor(const StatisticalFamily& family, const Vector& theta,
                        const ExpectationStrategy& strategy) {
  family.require_in_domain(theta);
  const int n = family.n;
  if (strategy.kind == ExpectationStrategy::Kind::ClosedForm) {
    if (!family.skewness_cf) {
      throw UnsupportedError("family '" + family.name +
                             "' has no closed-form skewness provider");
    }
    return family.skewness_cf(theta);
  }
  Tensor3 T(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        const double v = expect(
            family, theta,
            [&](double x) {
              return score(family, theta, x, i) * score(family, theta, x, j) *
                     score(family, theta, x, k);
            },
            strategy);
        T(i, j, k) = T(i, k, j) = T(j, i, k) = T(j, k, i) = T(k, i, j) = T(k, j, i) = v;
      }
    }
  }
  return T;
}

Tensor3 christoffel_lower(const StatisticalFamily& family, const Vector& theta,
                          double alpha, const ExpectationStrategy& strategy) {
  family.require_in_domain(theta);
  const int n = family.n;
  if (strategy.kind == ExpectationStrategy::Kind::ClosedForm) {
    if (!family.christoffel_lower_cf) {
      throw UnsupportedError("family '" + family.name +
                             "' has no closed-form connection provider");
    }
    return family.christoffel_lower_cf(theta, alpha);
  }
  const Tensor3 T = skewness_tensor(family, theta, strategy);
  Tensor3 gamma(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double e2 = expect(
            family, theta,
            [&](double x) {
              return score2(family, theta, x, i, j) * score(family, theta, x, k);
            },
            strategy);
        const double v = e2 + 0.5 * (1.0 - alpha) * T(i, j, k);
        gamma(i, j, k) = v;
        gamma(j, i, k) = v;
      }
    }
  }
  return gamma;
}

Tensor3 christoffel_mixed(const StatisticalFamily& family, const Vector& theta,
                          double alpha, const ExpectationStrategy& strategy) {
  const Matrix g = fisher_metric(family, theta, strategy);
  const Matrix ginv = inverse_metric(g);
  const Tensor3 lower = christoffel_lower(family, theta, alpha, strategy);
  const int n = family.n;
  Tensor3 mixed(n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int t = 0; t < n; ++t) s += lower(i, j, t) * ginv(t, k);
        mixed(k, i, j) = s;
      }
    }
  }
  return mixed;
}

double curvature_step(double coordinate) {
  return 1e-4 * std::max(1.0, std::abs(coordinate));
}

Tensor4 curvature_tensor(const StatisticalFamily& family, const Vector& theta,
                         double alpha, const ExpectationStrategy& strategy,
                         double h_scale) {
  const int n = family.n;
  const Matrix g = fisher_metric(family, theta, strategy);
  const Tensor3 lower = christoffel_lower(family, theta, alpha, strategy);
  const Tensor3 mixed = christoffel_mixed(family, theta, alpha, strategy);

  // dGamma[w] = d(Gamma^k_ij)/d(theta_w), analytic when the family offers
  // it on the closed-form path, otherwise central differences.
  std::vector<Tensor3> dGamma;
  dGamma.reserve(n);
  const bool analytic = strategy.kind == ExpectationStrategy::Kind::ClosedForm &&
                        family.dchristoffel_mixed_cf;
  for (int w = 0; w < n; ++w) {
    if (analytic) {
      dGamma.push_back(family.dchristoffel_mixed_cf(theta, alpha, w));
      continue;
    }
    const double h = h_scale * curvature_step(theta[w]);
    Vector tp = theta, tm = theta;
    tp[w] += h;
    tm[w] -= h;
    if (!family.domain.contains(tp) || !family.domain.contains(tm)) {
      throw DomainError("parameter point too close to the domain boundary for the "
                        "curvature stencil");
    }
    const Tensor3 gp = christoffel_mixed(family, tp, alpha, strategy);
    const Tensor3 gm = christoffel_mixed(family, tm, alpha, strategy);
    Tensor3 d(n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d(k, i, j) = (gp(k, i, j) - gm(k, i, j)) / (2.0 * h);
    dGamma.push_back(std::move(d));
  }

  Tensor4 R(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          double deriv = 0.0, quad = 0.0;
          for (int s = 0; s < n; ++s) {
            deriv += (dGamma[i](s, j, k) - dGamma[j](s, i, k)) * g(s, l);
          }
          for (int t = 0; t < n; ++t) {
            quad += lower(i, t, l) * mixed(t, j, k) - lower(j, t, l) * mixed(t, i, k);
          }
          R(i, j, k, l) = deriv + quad;
        }
      }
    }
  }
  return R;
}

double sectional_curvature(const StatisticalFamily& family, const Vector& theta,
                           double alpha, const ExpectationStrategy& strategy) {
  if (family.n != 2) {
    throw UnsupportedError("sectional_curvature is defined here for n = 2 only");
  }
  const Matrix g = fisher_metric(family, theta, strategy);
  const Tensor4 R = curvature_tensor(family, theta, alpha, strategy);
  return -R(0, 1, 0, 1) / g.determinant();
}

FlatnessReport alpha_flatness(const StatisticalFamily& family,
                              const std::vector<Vector>& grid, double alpha, double tol,
                              const ExpectationStrategy& strategy) {
  if (grid.empty()) throw ConfigError("flatness grid must be non-empty");
  FlatnessReport rep;
  rep.tolerance = tol;
  for (const Vector& theta : grid) {
    const Tensor4 R = curvature_tensor(family, theta, alpha, strategy);
    const double m = R.max_abs();
    if (m >= rep.max_abs_curvature) {
      rep.max_abs_curvature = m;
      rep.argmax_theta = theta;
    }
  }
  rep.flat = rep.max_abs_curvature <= tol;
  return rep;
}

double Trajectory::max_step_error() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.step_error);
  return m;
}

namespace {

struct GeodesicState {
  Vector theta;
  Vector v;
};

// Right side of the first-order geodesic system.
GeodesicState geodesic_rhs(const StatisticalFamily& family, double alpha,
                           const ExpectationStrategy& strategy, const GeodesicState& s) {
  const int n = family.n;
  const Tensor3 gamma = christoffel_mixed(family, s.theta, alpha, strategy);
  GeodesicState d;
  d.theta = s.v;
  d.v = Vector::Zero(n);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc += gamma(k, i, j) * s.v[i] * s.v[j];
    d.v[k] = -acc;
  }
  return d;
}

bool state_ok(const StatisticalFamily& family, const GeodesicState& s) {
  return s.theta.allFinite() && s.v.allFinite() && family.domain.contains(s.theta);
}

// One classical RK4 step; returns false if any stage leaves the domain.
bool rk4_step(const StatisticalFamily& family, double alpha,
              const ExpectationStrategy& strategy, const GeodesicState& s, double dt,
              GeodesicState& out) {
  auto advance = [](const GeodesicState& a, double w, const GeodesicState& k) {
    return GeodesicState{a.theta + w * k.theta, a.v + w * k.v};
  };
  if (!state_ok(family, s)) return false;
  const GeodesicState k1 = geodesic_rhs(family, alpha, strategy, s);
  GeodesicState m = advance(s, 0.5 * dt, k1);
  if (!state_ok(family, m)) return false;
  const GeodesicState k2 = geodesic_rhs(family, alpha, strategy, m);
  m = advance(s, 0.5 * dt, k2);
  if (!state_ok(family, m)) return false;
  const GeodesicState k3 = geodesic_rhs(family, alpha, strategy, m);
  m = advance(s, dt, k3);
  if (!state_ok(family, m)) return false;
  const GeodesicState k4 = geodesic_rhs(family, alpha, strategy, m);
  out.theta = s.theta + (dt / 6.0) * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta);
  out.v = s.v + (dt / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
  return state_ok(family, out);
}

}  // namespace

Trajectory geodesic(const StatisticalFamily& family, const Vector& theta0,
                    const Vector& v0, double alpha, double t_end, double dt,
                    const ExpectationStrategy& strategy) {
  family.require_in_domain(theta0);
  if (!(dt > 0)) throw ConfigError("geodesic step dt must be positive");
  if (!(t_end >= 0)) throw ConfigError("geodesic t_end must be non-negative");

  Trajectory traj;
  traj.alpha = alpha;
  traj.dt = dt;
  GeodesicState s{theta0, v0};
  traj.samples.push_back({0.0, s.theta, s.v, 0.0});

  const long steps = std::lround(std::ceil(t_end / dt - 1e-12));
  double t = 0.0;
  for (long k = 0; k < steps; ++k) {
    const double step = std::min(dt, t_end - t);
    GeodesicState full, half, two;
    const bool ok = rk4_step(family, alpha, strategy, s, step, full) &&
                    rk4_step(family, alpha, strategy, s, 0.5 * step, half) &&
                    rk4_step(family, alpha, strategy, half, 0.5 * step, two);
    if (!ok) {
      traj.early_exit = true;
      traj.exit_time = t;
      return traj;
    }
    const double err = std::max((full.theta - two.theta).cwiseAbs().maxCoeff(),
                                (full.v - two.v).cwiseAbs().maxCoeff());
    s = full;  // fixed-step RK4; the half-step pair is diagnostic only
    t += step;
    traj.samples.push_back({t, s.theta, s.v, err});
  }
  return traj;
}

Vector covariant_derivative(const StatisticalFamily& family, const Vector& theta,
                            double alpha, const ExpectationStrategy& strategy,
                            const Vector& x_value, const Vector& y_value,
                            const Matrix& y_jacobian) {
  const int n = family.n;
  const Tensor3 gamma = christoffel_mixed(family, theta, alpha, strategy);
  Vector out = y_jacobian * x_value;
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc += gamma(k, i, j) * x_value[i] * y_value[j];
    out[k] += acc;
  }
  return out;
}

}  // namespace alphabundle::manifold
