#include "alphabundle/verify.hpp"

#include <cmath>
#include <random>

#include "alphabundle/errors.hpp"

namespace alphabundle::verify {

namespace {

using bundle::BundleField;
using bundle::BundleTangent;
using bundle::FdSteps;
using bundle::Frame;

nlohmann::json vec_json(const Vector& v) {
  nlohmann::json j = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

nlohmann::json mat_json(const Matrix& m) {
  nlohmann::json j = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

struct Draw {
  std::mt19937_64 rng;
  explicit Draw(std::uint64_t seed) : rng(seed) {}

  double unit() {
    return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  }
  Vector vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = unit();
    return v;
  }
  Matrix matrix(int n) {
    Matrix m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(r, c) = unit();
    return m;
  }
  // Frame / group element: entries in [-1,1], |det| >= 0.1.
  Matrix gl(int n) {
    for (;;) {
      Matrix m = matrix(n);
      if (std::abs(m.determinant()) >= 0.1) return m;
    }
  }
  Vector theta(const StatisticalFamily& family) {
    if (!family.sample_box) {
      throw ConfigError("family '" + family.name +
                        "' has no sample box for randomized checks");
    }
    const DomainBox& b = *family.sample_box;
    Vector t(family.n);
    for (int i = 0; i < family.n; ++i) {
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      t[i] = b.lower[i] + u * (b.upper[i] - b.lower[i]);
    }
    return t;
  }
};

void finalize(CheckReport& rep) {
  rep.max_residual = 0.0;
  for (auto& s : rep.samples) {
    s.max_residual = 0.0;
    for (const auto& [k, v] : s.residuals) s.max_residual = std::max(s.max_residual, v);
    rep.max_residual = std::max(rep.max_residual, s.max_residual);
  }
  rep.pass = rep.max_residual <= rep.tolerance;
}

double inf_norm(const Vector& v) { return v.cwiseAbs().maxCoeff(); }
double inf_norm(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }
double inf_norm(const BundleTangent& t) {
  return std::max(inf_norm(t.base), inf_norm(t.mat));
}

// Chart side of Eq (5.3) by contracting the curvature tensor.
Vector chart_curvature_operator(const StatisticalFamily& family, const Vector& theta,
                                double alpha, const ExpectationStrategy& strategy,
                                const Vector& x, const Vector& y, const Vector& z) {
  const Matrix g = manifold::fisher_metric(family, theta, strategy);
  const Matrix ginv = g.inverse();
  const Tensor4 r = manifold::curvature_tensor(family, theta, alpha, strategy);
  const int n = family.n;
  Vector out = Vector::Zero(n);
  for (int m = 0; m < n; ++m) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int s = 0; s < n; ++s)
            acc += x[i] * y[j] * z[k] * r(i, j, k, s) * ginv(s, m);
    out[m] = acc;
  }
  return out;
}

}  // namespace

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["tolerance"] = tolerance;
  j["seed"] = seed;
  j["max_residual"] = max_residual;
  j["pass"] = pass;
  j["samples"] = nlohmann::json::array();
  for (const auto& s : samples) {
    nlohmann::json js;
    js["inputs"] = s.inputs;
    js["residuals"] = s.residuals;
    js["max_residual"] = s.max_residual;
    j["samples"].push_back(js);
  }
  return j;
}

CheckReport check_theorem_5_8(const StatisticalFamily& family, int samples,
                              const std::vector<double>& alphas, std::uint64_t seed,
                              double tol, const ExpectationStrategy& strategy,
                              ExecMode mode) {
  CheckReport rep;
  rep.name = "theorem_5_8";
  rep.tolerance = tol;
  rep.seed = seed;

  struct Input {
    double alpha;
    Vector theta;
    Matrix a;
    Vector x, y, z;  // constant vectors for 5.1/5.3
    Vector cx, cy;   // linear-field offsets for 5.2
    Matrix lx, ly;   // linear-field slopes
    bool identity_case;
    int coord_i = 0, coord_j = 0;
  };
  std::vector<Input> inputs;
  Draw draw(seed);
  const int n = family.n;
  for (double alpha : alphas) {
    for (int s = 0; s < samples; ++s) {
      Input in;
      in.alpha = alpha;
      in.theta = draw.theta(family);
      in.a = draw.gl(n);
      in.x = draw.vector(n);
      in.y = draw.vector(n);
      in.z = draw.vector(n);
      in.cx = draw.vector(n);
      in.cy = draw.vector(n);
      in.lx = draw.matrix(n);
      in.ly = draw.matrix(n);
      in.identity_case = false;
      inputs.push_back(std::move(in));
    }
    // identity-frame coordinate-field cases (the closed 6.4-6.6 values
    // when the family is the normal one)
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        Input in;
        in.alpha = alpha;
        in.theta = draw.theta(family);
        in.a = Matrix::Identity(n, n);
        in.identity_case = true;
        in.coord_i = i;
        in.coord_j = j;
        inputs.push_back(std::move(in));
      }
    }
  }

  rep.samples.resize(inputs.size());
  parallel_for(inputs.size(), mode, [&](std::size_t k) {
    const Input& in = inputs[k];
    CheckSample& out = rep.samples[k];
    const Frame u{in.theta, in.a};
    out.inputs["alpha"] = in.alpha;
    out.inputs["theta"] = vec_json(in.theta);
    out.inputs["frame"] = mat_json(in.a);

    if (in.identity_case) {
      out.inputs["kind"] = "identity_frame_coordinate_fields";
      out.inputs["i"] = in.coord_i;
      out.inputs["j"] = in.coord_j;
      const auto xf = bundle::VectorField::coordinate(in.coord_i, n);
      const auto yf = bundle::VectorField::coordinate(in.coord_j, n);
      const Vector lhs =
          bundle::bundle_covariant_derivative(family, xf, yf, u, in.alpha, strategy);
      const Tensor3 gamma =
          manifold::christoffel_mixed(family, in.theta, in.alpha, strategy);
      Vector rhs(n);
      for (int m = 0; m < n; ++m) rhs[m] = gamma(m, in.coord_i, in.coord_j);
      out.residuals["eq_5_1_identity_frame"] = inf_norm(Vector(lhs - rhs));
      return;
    }

    out.inputs["kind"] = "random";
    out.inputs["x"] = vec_json(in.x);
    out.inputs["y"] = vec_json(in.y);
    out.inputs["z"] = vec_json(in.z);

    // Eq 5.1: bundle derivative of a linear field vs chart Christoffels.
    {
      const auto xf = bundle::VectorField::constant(in.x);
      const auto yf = bundle::VectorField::linear(in.cy, in.ly);
      const Vector lhs =
          bundle::bundle_covariant_derivative(family, xf, yf, u, in.alpha, strategy);
      const Vector rhs = manifold::covariant_derivative(
          family, in.theta, in.alpha, strategy, in.x, yf.value(in.theta), in.ly);
      out.residuals["eq_5_1"] = inf_norm(Vector(lhs - rhs));
    }

    // Eq 5.2: u(Theta(X~, Y~)) vs nabla_X Y - nabla_Y X - [X, Y].
    {
      const auto xf = bundle::VectorField::linear(in.cx, in.lx);
      const auto yf = bundle::VectorField::linear(in.cy, in.ly);
      const BundleField xl = bundle::lift_field(family, xf, in.alpha, strategy);
      const BundleField yl = bundle::lift_field(family, yf, in.alpha, strategy);
      const Vector torsion =
          u.A * bundle::torsion_form_on_fields(xl, yl, u, FdSteps{});
      const Vector xv = xf.value(in.theta), yv = yf.value(in.theta);
      const Vector nxy = manifold::covariant_derivative(family, in.theta, in.alpha,
                                                        strategy, xv, yv, in.ly);
      const Vector nyx = manifold::covariant_derivative(family, in.theta, in.alpha,
                                                        strategy, yv, xv, in.lx);
      const Vector lie = in.ly * xv - in.lx * yv;
      out.residuals["eq_5_2"] = inf_norm(Vector(torsion - (nxy - nyx - lie)));
    }

    // Eq 5.3: curvature through the bundle vs the chart tensor.
    {
      const Vector lhs = bundle::curvature_via_bundle(family, u, in.x, in.y, in.z,
                                                      in.alpha, strategy);
      const Vector rhs = chart_curvature_operator(family, in.theta, in.alpha, strategy,
                                                  in.x, in.y, in.z);
      out.residuals["eq_5_3"] = inf_norm(Vector(lhs - rhs));
    }
  });
  finalize(rep);
  return rep;
}

CheckReport check_structure_equations(const StatisticalFamily& family, int samples,
                                      const std::vector<double>& alphas,
                                      std::uint64_t seed, double tol,
                                      const ExpectationStrategy& strategy, ExecMode mode,
                                      double step_scale) {
  CheckReport rep;
  rep.name = "structure_equations";
  rep.tolerance = tol;
  rep.seed = seed;
  // Wide enough that truncation, not round-off, sets the residual; the
  // step-halving convergence check relies on that.
  const FdSteps steps = FdSteps{1e-3, 1e-3}.scaled(step_scale);

  struct Input {
    double alpha;
    Vector theta;
    Matrix a;
    Vector xi, eta;
    Matrix c, d;
    int kind;  // 0: horizontal pair, 1: vertical/horizontal, 2: general sums
  };
  std::vector<Input> inputs;
  Draw draw(seed);
  const int n = family.n;
  for (double alpha : alphas) {
    for (int s = 0; s < samples; ++s) {
      Input in;
      in.alpha = alpha;
      in.theta = draw.theta(family);
      in.a = draw.gl(n);
      in.xi = draw.vector(n);
      in.eta = draw.vector(n);
      in.c = draw.matrix(n);
      in.d = draw.matrix(n);
      in.kind = s % 3;
      inputs.push_back(std::move(in));
    }
  }

  rep.samples.resize(inputs.size());
  parallel_for(inputs.size(), mode, [&](std::size_t k) {
    const Input& in = inputs[k];
    CheckSample& out = rep.samples[k];
    const Frame u{in.theta, in.a};
    out.inputs["alpha"] = in.alpha;
    out.inputs["theta"] = vec_json(in.theta);
    out.inputs["frame"] = mat_json(in.a);
    out.inputs["xi"] = vec_json(in.xi);
    out.inputs["eta"] = vec_json(in.eta);
    out.inputs["kind"] =
        in.kind == 0 ? "horizontal" : (in.kind == 1 ? "mixed" : "general");

    const BundleField h1 =
        bundle::fundamental_horizontal_field(family, in.xi, in.alpha, strategy);
    const BundleField h2 =
        bundle::fundamental_horizontal_field(family, in.eta, in.alpha, strategy);
    const BundleField v1 = bundle::fundamental_vertical_field(in.c);
    const BundleField v2 = bundle::fundamental_vertical_field(in.d);

    BundleField x, y;
    if (in.kind == 0) {
      x = h1;
      y = h2;
    } else if (in.kind == 1) {
      x = v1;
      y = h2;
    } else {
      x = [h1, v1](const Frame& w) { return h1(w) + v1(w); };
      y = [h2, v2](const Frame& w) { return h2(w) + v2(w); };
    }

    auto horizontal_part = [&](const BundleField& f) -> BundleField {
      return [&family, f, alpha = in.alpha, &strategy](const Frame& w) {
        return bundle::split(family, w, f(w), alpha, strategy).horizontal;
      };
    };
    const BundleField hx = horizontal_part(x);
    const BundleField hy = horizontal_part(y);

    const BundleTangent xu = x(u), yu = y(u);
    const Matrix omega_x = bundle::bundle_connection_form(family, u, xu, in.alpha, strategy);
    const Matrix omega_y = bundle::bundle_connection_form(family, u, yu, in.alpha, strategy);
    const Vector theta_x = bundle::canonical_form(u, xu);
    const Vector theta_y = bundle::canonical_form(u, yu);

    // First structure equation: d theta o h = d theta + omega~ ^ theta.
    {
      const Vector lhs = bundle::dtheta_on_fields(hx, hy, u, steps);
      const Vector rhs = bundle::dtheta_on_fields(x, y, u, steps) + omega_x * theta_y -
                         omega_y * theta_x;
      out.residuals["first_structure"] = inf_norm(Vector(lhs - rhs));
    }
    // Second structure equation: d omega~ o h = d omega~ + omega~ ^ omega~.
    {
      const Matrix lhs =
          bundle::domega_on_fields(family, hx, hy, u, in.alpha, strategy, steps);
      const Matrix rhs =
          bundle::domega_on_fields(family, x, y, u, in.alpha, strategy, steps) +
          omega_x * omega_y - omega_y * omega_x;
      out.residuals["second_structure"] = inf_norm(Matrix(lhs - rhs));
    }
  });
  finalize(rep);
  return rep;
}

CheckReport check_lemma_5_6(const StatisticalFamily& family, int samples,
                            const std::vector<double>& alphas, std::uint64_t seed,
                            double tol, const ExpectationStrategy& strategy,
                            ExecMode mode) {
  CheckReport rep;
  rep.name = "lemma_5_6";
  rep.tolerance = tol;
  rep.seed = seed;

  struct Input {
    double alpha;
    Vector theta;
    Matrix a;
    Vector xi;
    Matrix g, c;
  };
  std::vector<Input> inputs;
  Draw draw(seed);
  const int n = family.n;
  for (double alpha : alphas) {
    for (int s = 0; s < samples; ++s) {
      Input in;
      in.alpha = alpha;
      in.theta = draw.theta(family);
      in.a = draw.gl(n);
      in.xi = draw.vector(n);
      in.g = draw.gl(n);
      in.c = draw.matrix(n);
      inputs.push_back(std::move(in));
    }
  }

  rep.samples.resize(inputs.size());
  parallel_for(inputs.size(), mode, [&](std::size_t k) {
    const Input& in = inputs[k];
    CheckSample& out = rep.samples[k];
    const Frame u{in.theta, in.a};
    out.inputs["alpha"] = in.alpha;
    out.inputs["theta"] = vec_json(in.theta);
    out.inputs["frame"] = mat_json(in.a);
    out.inputs["xi"] = vec_json(in.xi);
    out.inputs["g"] = mat_json(in.g);
    out.inputs["C"] = mat_json(in.c);

    // (1) theta(H(xi)) = xi, algebraic.
    const BundleTangent h = bundle::fundamental_horizontal(family, u, in.xi, in.alpha,
                                                           strategy);
    out.residuals["property_1"] = inf_norm(Vector(bundle::canonical_form(u, h) - in.xi));

    // (2) R_g*(H(xi)_u) = H(g^{-1} xi)_{ug}, algebraic.
    const BundleTangent pushed{h.base, h.mat * in.g};
    const Frame ug{in.theta, in.a * in.g};
    const BundleTangent rhs = bundle::fundamental_horizontal(
        family, ug, in.g.inverse() * in.xi, in.alpha, strategy);
    out.residuals["property_2"] = inf_norm(pushed - rhs);

    // (3) [tau(C), H(xi)] = H(C xi), finite-difference bracket.
    const BundleField tau_c = bundle::fundamental_vertical_field(in.c);
    const BundleField h_xi =
        bundle::fundamental_horizontal_field(family, in.xi, in.alpha, strategy);
    const BundleTangent br = bundle::fd_bracket(tau_c, h_xi, u, 1e-4);
    const BundleTangent expect = bundle::fundamental_horizontal(
        family, u, in.c * in.xi, in.alpha, strategy);
    out.residuals["property_3"] = inf_norm(br - expect);
  });
  finalize(rep);
  return rep;
}

CheckReport check_bianchi(const StatisticalFamily& family, int samples,
                          const std::vector<double>& alphas, std::uint64_t seed,
                          double tol, const ExpectationStrategy& strategy, ExecMode mode,
                          double step_scale) {
  CheckReport rep;
  rep.name = "bianchi";
  rep.tolerance = tol;
  rep.seed = seed;

  struct Input {
    double alpha;
    Vector theta;
    Matrix a;
    Vector xi1, xi2, xi3;
  };
  std::vector<Input> inputs;
  Draw draw(seed);
  const int n = family.n;
  for (double alpha : alphas) {
    for (int s = 0; s < samples; ++s) {
      Input in;
      in.alpha = alpha;
      in.theta = draw.theta(family);
      in.a = draw.gl(n);
      in.xi1 = draw.vector(n);
      in.xi2 = draw.vector(n);
      in.xi3 = draw.vector(n);
      inputs.push_back(std::move(in));
    }
  }

  rep.samples.resize(inputs.size());
  parallel_for(inputs.size(), mode, [&](std::size_t k) {
    const Input& in = inputs[k];
    CheckSample& out = rep.samples[k];
    out.inputs["alpha"] = in.alpha;
    out.inputs["theta"] = vec_json(in.theta);
    out.inputs["frame"] = mat_json(in.a);
    out.inputs["xi1"] = vec_json(in.xi1);
    out.inputs["xi2"] = vec_json(in.xi2);
    out.inputs["xi3"] = vec_json(in.xi3);
    const Frame u{in.theta, in.a};
    const auto res = bundle::bianchi_residuals(family, u, in.xi1, in.xi2, in.xi3,
                                               in.alpha, strategy, step_scale);
    out.residuals["first_bianchi"] = res.first;
    out.residuals["second_bianchi"] = res.second;
  });
  finalize(rep);
  return rep;
}

CheckReport check_geodesic_criterion(const StatisticalFamily& family,
                                     const Vector& theta0, const Vector& v0,
                                     double alpha, double tol,
                                     const ExpectationStrategy& strategy, double t_end,
                                     double dt) {
  CheckReport rep;
  rep.name = "geodesic_criterion";
  rep.tolerance = tol;
  rep.seed = 0;

  auto lift_residual = [&](const manifold::Trajectory& traj) {
    const int n = family.n;
    const Frame start{traj.samples.front().theta, Matrix::Identity(n, n)};
    const auto lift = bundle::horizontal_lift_curve(family, traj, start, alpha, strategy);
    std::vector<Vector> s(lift.samples.size());
    for (size_t k = 0; k < lift.samples.size(); ++k) {
      s[k] = lift.samples[k].frame.A.inverse() * traj.samples[k].velocity;
    }
    double worst = 0.0;
    for (size_t k = 1; k + 1 < s.size(); ++k) {
      const double h = traj.samples[k + 1].t - traj.samples[k - 1].t;
      worst = std::max(worst, inf_norm(Vector((s[k + 1] - s[k - 1]) / h)));
    }
    return worst;
  };

  const manifold::Trajectory geo =
      manifold::geodesic(family, theta0, v0, alpha, t_end, dt, strategy);
  if (geo.early_exit) {
    throw NumericError("geodesic left the domain before t_end; criterion not evaluable");
  }
  const double geodesic_residual = lift_residual(geo);

  // Control: same endpoints, sinusoidally perturbed interior.
  manifold::Trajectory control = geo;
  const double amp = 0.1;
  Vector dir = Vector::Zero(family.n);
  dir[0] = 1.0;
  for (auto& smp : control.samples) {
    const double phase = M_PI * smp.t / t_end;
    smp.theta += amp * std::sin(phase) * dir;
    smp.velocity += amp * (M_PI / t_end) * std::cos(phase) * dir;
  }
  const double control_residual = lift_residual(control);

  CheckSample s;
  s.inputs["alpha"] = alpha;
  s.inputs["theta0"] = vec_json(theta0);
  s.inputs["v0"] = vec_json(v0);
  s.inputs["t_end"] = t_end;
  s.inputs["dt"] = dt;
  s.inputs["control_residual"] = control_residual;
  s.residuals["geodesic"] = geodesic_residual;
  // encoded so that `pass` also demands a clearly worse control curve
  const bool separated =
      control_residual >= 100.0 * geodesic_residual && control_residual >= 1e-2;
  s.residuals["control_separation"] = separated ? 0.0 : 2.0 * tol;
  rep.samples.push_back(std::move(s));
  finalize(rep);
  return rep;
}

}  // namespace alphabundle::verify
