#include "alphabundle/families.hpp"

#include <cmath>

#include "alphabundle/errors.hpp"

namespace alphabundle::families {

namespace {

constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log(sqrt(2*pi))

DomainBox normal_domain() {
  DomainBox b = DomainBox::unbounded(2);
  b.lower[1] = 0.0;
  return b;
}

DomainBox box2(double l0, double u0, double l1, double u1) {
  DomainBox b;
  b.lower = Vector(2);
  b.upper = Vector(2);
  b.lower << l0, l1;
  b.upper << u0, u1;
  return b;
}

}  // namespace

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile argument must lie in (0, 1)");
  // Acklam's rational approximation, then one Halley refinement.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (u < plow) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - plow) {
    const double q = u - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - u;
  const double v = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x = x - v / (1.0 + 0.5 * x * v);
  return x;
}

StatisticalFamily make_normal() {
  StatisticalFamily f;
  f.n = 2;
  f.name = "normal";
  f.domain = normal_domain();
  f.sample_space = SampleSpace::real_line();
  f.sample_box = box2(-2.0, 2.0, 0.5, 3.0);

  f.log_density = [](double x, const Vector& th) {
    const double mu = th[0], sigma = th[1];
    const double z = (x - mu) / sigma;
    return -0.5 * z * z - std::log(sigma) - kLogSqrt2Pi;
  };
  f.analytic_score = [](double x, const Vector& th, int i) {
    const double mu = th[0], sigma = th[1], d = x - mu;
    if (i == 0) return d / (sigma * sigma);
    return d * d / (sigma * sigma * sigma) - 1.0 / sigma;
  };
  f.analytic_score2 = [](double x, const Vector& th, int i, int j) {
    const double mu = th[0], sigma = th[1], d = x - mu;
    const double s2 = sigma * sigma;
    if (i == 0 && j == 0) return -1.0 / s2;
    if (i != j) return -2.0 * d / (s2 * sigma);
    return -3.0 * d * d / (s2 * s2) + 1.0 / s2;
  };
  f.quad_hint = [](const Vector& th) { return QuadHint{th[0], th[1]}; };
  f.inverse_cdf = [](double u, const Vector& th) {
    return th[0] + th[1] * normal_quantile(u);
  };

  f.metric_cf = [](const Vector& th) {
    const double s2 = th[1] * th[1];
    Matrix g = Matrix::Zero(2, 2);
    g(0, 0) = 1.0 / s2;
    g(1, 1) = 2.0 / s2;
    return g;
  };
  f.skewness_cf = [](const Vector& th) {
    const double s3 = th[1] * th[1] * th[1];
    Tensor3 t(2);
    t(0, 0, 1) = t(0, 1, 0) = t(1, 0, 0) = 2.0 / s3;
    t(1, 1, 1) = 8.0 / s3;
    return t;
  };
  f.christoffel_lower_cf = [](const Vector& th, double alpha) {
    const double s3 = th[1] * th[1] * th[1];
    Tensor3 g(2);
    g(0, 0, 1) = (1.0 - alpha) / s3;
    g(0, 1, 0) = g(1, 0, 0) = -(1.0 + alpha) / s3;
    g(1, 1, 1) = -(2.0 + 4.0 * alpha) / s3;
    return g;
  };
  f.dchristoffel_mixed_cf = [](const Vector& th, double alpha, int w) {
    Tensor3 d(2);
    if (w == 0) return d;  // no mu dependence
    const double s2 = th[1] * th[1];
    d(1, 0, 0) = -(1.0 - alpha) / (2.0 * s2);
    d(0, 0, 1) = d(0, 1, 0) = (1.0 + alpha) / s2;
    d(1, 1, 1) = (1.0 + 2.0 * alpha) / s2;
    return d;
  };
  return f;
}

StatisticalFamily make_family_from_expression(
    const DensityExpression& density, const SampleSpace& sample_space,
    const DomainBox& domain, std::function<QuadHint(const Vector&)> quad_hint,
    std::string name) {
  if (density.n() < 1) throw ConfigError("expression family has no parameters");
  if (domain.lower.size() != density.n()) {
    throw ConfigError("domain box dimension does not match the expression");
  }
  StatisticalFamily f;
  f.n = density.n();
  f.name = std::move(name);
  f.domain = domain;
  f.sample_space = sample_space;
  f.quad_hint = std::move(quad_hint);
  f.log_density = [density](double x, const Vector& th) { return density.eval(x, th); };
  return f;
}

Matrix Reparameterization::jacobian_at(const Vector& new_theta) const {
  if (jacobian) return jacobian(new_theta);
  const int n = static_cast<int>(new_theta.size());
  Matrix j(n, n);
  for (int i = 0; i < n; ++i) {
    const double h = fd_step(new_theta[i]);
    Vector tp = new_theta, tm = new_theta;
    tp[i] += h;
    tm[i] -= h;
    j.col(i) = (inverse(tp) - inverse(tm)) / (2.0 * h);
  }
  return j;
}

namespace {

// 3^n grid over a box, used to validate a reparameterization.
std::vector<Vector> probe_grid(const DomainBox& box) {
  const int n = static_cast<int>(box.lower.size());
  std::vector<Vector> pts;
  std::vector<int> idx(n, 0);
  for (;;) {
    Vector p(n);
    for (int i = 0; i < n; ++i) {
      const double f = 0.25 + 0.25 * idx[i];
      p[i] = box.lower[i] + f * (box.upper[i] - box.lower[i]);
    }
    pts.push_back(p);
    int k = 0;
    while (k < n && ++idx[k] == 3) idx[k++] = 0;
    if (k == n) break;
  }
  return pts;
}

}  // namespace

StatisticalFamily reparameterize(const StatisticalFamily& family,
                                 const Reparameterization& r) {
  if (!r.forward || !r.inverse) {
    throw ConfigError("reparameterization needs both forward and inverse maps");
  }
  DomainBox check_box;
  if (r.new_sample_box) {
    check_box = *r.new_sample_box;
  } else if (family.sample_box) {
    // image corners of a coordinate-wise monotone map; fall back to probing
    check_box.lower = r.forward(family.sample_box->lower);
    check_box.upper = r.forward(family.sample_box->upper);
    for (int i = 0; i < check_box.lower.size(); ++i) {
      if (check_box.lower[i] > check_box.upper[i]) {
        std::swap(check_box.lower[i], check_box.upper[i]);
      }
    }
  } else {
    throw ConfigError("reparameterize needs a sample box to validate against");
  }
  for (const Vector& p : probe_grid(check_box)) {
    const Vector back = r.forward(r.inverse(p));
    if ((back - p).cwiseAbs().maxCoeff() > 1e-8) {
      throw ConfigError("reparameterization round-trip failed on the test grid");
    }
    const Matrix j = r.jacobian_at(p);
    if (std::abs(j.determinant()) < 1e-12) {
      throw ConfigError("reparameterization Jacobian is singular on the test grid");
    }
  }

  StatisticalFamily f;
  f.n = family.n;
  f.name = family.name + "/rechart";
  f.domain = r.new_domain;
  f.sample_space = family.sample_space;
  f.sample_box = r.new_sample_box;
  f.mc = family.mc;

  const auto base_logp = family.log_density;
  const auto inv = r.inverse;
  f.log_density = [base_logp, inv](double x, const Vector& th) {
    return base_logp(x, inv(th));
  };
  if (family.quad_hint) {
    const auto hint = family.quad_hint;
    f.quad_hint = [hint, inv](const Vector& th) { return hint(inv(th)); };
  }
  if (family.inverse_cdf) {
    const auto icdf = family.inverse_cdf;
    f.inverse_cdf = [icdf, inv](double u, const Vector& th) { return icdf(u, inv(th)); };
  }
  if (family.analytic_score) {
    const auto sc = family.analytic_score;
    const Reparameterization rc = r;
    f.analytic_score = [sc, rc, n = family.n](double x, const Vector& th, int i) {
      const Vector old_theta = rc.inverse(th);
      const Matrix j = rc.jacobian_at(th);
      double acc = 0.0;
      for (int a = 0; a < n; ++a) acc += j(a, i) * sc(x, old_theta, a);
      return acc;
    };
  }
  // Closed-form tensor providers do not carry over; the new chart goes
  // through the quadrature path.
  return f;
}

Reparameterization log_sigma_reparam() {
  Reparameterization r;
  r.forward = [](const Vector& th) {
    Vector out(2);
    out << th[0], std::log(th[1]);
    return out;
  };
  r.inverse = [](const Vector& th) {
    Vector out(2);
    out << th[0], std::exp(th[1]);
    return out;
  };
  r.jacobian = [](const Vector& th) {
    Matrix j = Matrix::Identity(2, 2);
    j(1, 1) = std::exp(th[1]);
    return j;
  };
  r.new_domain = DomainBox::unbounded(2);
  r.new_sample_box = box2(-2.0, 2.0, std::log(0.5), std::log(3.0));
  return r;
}

}  // namespace alphabundle::families
