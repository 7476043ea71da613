#pragma once

#include <functional>
#include <vector>

#include "alphabundle/expectation.hpp"
#include "alphabundle/manifold.hpp"
#include "alphabundle/types.hpp"

// Frame-bundle geometry over a statistical manifold.
//
// A frame u = (theta, A) stores the frame vectors as the COLUMNS of A, so
// u(xi) = A xi reads coordinates in the frame. The bundle connection form is
//
//   omega~(X) = A^{-1} omega(pi_* X) A + A^{-1} B,    X = (X_base, B),
//
// where omega is the chart connection form (omega(X))^k_j = Gamma^k_{ji} X^i.
// The adjoint twist A^{-1} (.) A is the ordering that satisfies
// omega~(tau(C)) = C and right-equivariance omega~(R_g* X) = g^{-1} omega~(X) g;
// the transposed ordering A (.) A^{-1} fails equivariance. Both agree at the
// identity frame. Horizontal tangents are ker omega~, i.e. B = -omega(X_base) A.

namespace alphabundle::bundle {

using LieAlgebraValue = Matrix;

struct Frame {
  Vector theta;
  Matrix A;
};

struct BundleTangent {
  Vector base;
  Matrix mat;

  static BundleTangent zero(int n) {
    return {Vector::Zero(n), Matrix::Zero(n, n)};
  }
  BundleTangent operator+(const BundleTangent& o) const {
    return {base + o.base, mat + o.mat};
  }
  BundleTangent operator-(const BundleTangent& o) const {
    return {base - o.base, mat - o.mat};
  }
  BundleTangent operator*(double s) const { return {s * base, s * mat}; }
};

// The chart connection form at a point: X |-> Gamma^k_{ji} X^i as a matrix.
class ConnectionFormLocal {
 public:
  ConnectionFormLocal() = default;
  explicit ConnectionFormLocal(std::vector<Matrix> coeff) : coeff_(std::move(coeff)) {}

  Matrix apply(const Vector& x) const;
  const Matrix& coefficient(int i) const { return coeff_[i]; }
  int dim() const { return static_cast<int>(coeff_.size()); }

 private:
  std::vector<Matrix> coeff_;  // coeff_[i](k, j) = Gamma^k_{ji}
};

struct BundleTrajectorySample {
  double t = 0.0;
  Frame frame;
};

struct BundleTrajectory {
  std::vector<BundleTrajectorySample> samples;
  manifold::Trajectory base;
  double alpha = 0.0;
};

// A vector field on the chart, with an optional analytic Jacobian
// (finite differences otherwise).
struct VectorField {
  std::function<Vector(const Vector&)> value;
  std::function<Matrix(const Vector&)> jacobian;

  static VectorField constant(const Vector& v);
  static VectorField coordinate(int i, int n);
  static VectorField linear(const Vector& c, const Matrix& l);  // c + L theta
  Matrix jacobian_at(const Vector& theta) const;
};

using BundleField = std::function<BundleTangent(const Frame&)>;

// Finite-difference steps on the bundle. `directional` drives first
// derivatives of functions along straight coordinate curves, `bracket`
// the componentwise Lie brackets (nested differentiation).
struct FdSteps {
  double directional = 1e-5;
  double bracket = 1e-4;

  FdSteps scaled(double s) const { return {directional * s, bracket * s}; }
};

void require_valid(const StatisticalFamily& family, const Frame& u);

ExpectationStrategy default_strategy(const StatisticalFamily& family);

// Gamma^(alpha)k_{ji} dtheta^i assembled from the mixed Christoffel symbols.
ConnectionFormLocal local_connection_form(const StatisticalFamily& family,
                                          const Vector& theta, double alpha,
                                          const ExpectationStrategy& strategy);

LieAlgebraValue bundle_connection_form(const StatisticalFamily& family, const Frame& u,
                                       const BundleTangent& x, double alpha,
                                       const ExpectationStrategy& strategy);

// theta(X) = u^{-1}(pi_* X) = A^{-1} X_base.
Vector canonical_form(const Frame& u, const BundleTangent& x);

struct SplitTangent {
  BundleTangent vertical;
  BundleTangent horizontal;
};

SplitTangent split(const StatisticalFamily& family, const Frame& u,
                   const BundleTangent& x, double alpha,
                   const ExpectationStrategy& strategy);

// tau(C) at u: tangent to t |-> (theta, A exp(tC)) at t = 0.
BundleTangent fundamental_vertical(const Frame& u, const LieAlgebraValue& c);

// H(xi) at u: horizontal lift of the base vector u(xi) = A xi.
BundleTangent fundamental_horizontal(const StatisticalFamily& family, const Frame& u,
                                     const Vector& xi, double alpha,
                                     const ExpectationStrategy& strategy);

BundleTangent horizontal_lift_vector(const StatisticalFamily& family, const Frame& u,
                                     const Vector& x_base, double alpha,
                                     const ExpectationStrategy& strategy);

// Integrates A'(t) = -omega(gamma'(t)) A(t) with RK4 on the curve's grid,
// cubic Hermite interpolation between samples.
BundleTrajectory horizontal_lift_curve(const StatisticalFamily& family,
                                       const manifold::Trajectory& gamma,
                                       const Frame& u0, double alpha,
                                       const ExpectationStrategy& strategy);

// Transport of v0 along gamma: A(t_end) A(0)^{-1} v0, frame independent.
Vector parallel_transport(const StatisticalFamily& family,
                          const manifold::Trajectory& gamma, const Vector& v0,
                          double alpha, const ExpectationStrategy& strategy);

// u(X~(theta(Y~))) via central differences along the straight bundle curve
// through u with velocity X~; equals the chart covariant derivative.
Vector bundle_covariant_derivative(const StatisticalFamily& family,
                                   const VectorField& x_field,
                                   const VectorField& y_field, const Frame& u,
                                   double alpha, const ExpectationStrategy& strategy,
                                   const FdSteps& steps = {});

// Field machinery ---------------------------------------------------------

// Horizontal lift of a chart vector field.
BundleField lift_field(const StatisticalFamily& family, const VectorField& x,
                       double alpha, const ExpectationStrategy& strategy);

BundleField fundamental_horizontal_field(const StatisticalFamily& family,
                                         const Vector& xi, double alpha,
                                         const ExpectationStrategy& strategy);

BundleField fundamental_vertical_field(const LieAlgebraValue& c);

// Componentwise finite-difference Lie bracket [X, Y] at u.
BundleTangent fd_bracket(const BundleField& x, const BundleField& y, const Frame& u,
                         double h);

// d(theta-form) and d(omega~-form) on fields, by the two-argument formula
// dH(X,Y) = X(H(Y)) - Y(H(X)) - H([X,Y]).
Vector dtheta_on_fields(const BundleField& x, const BundleField& y, const Frame& u,
                        const FdSteps& steps);
LieAlgebraValue domega_on_fields(const StatisticalFamily& family, const BundleField& x,
                                 const BundleField& y, const Frame& u, double alpha,
                                 const ExpectationStrategy& strategy,
                                 const FdSteps& steps);

// Torsion and curvature forms on horizontal-lift fields of constant base
// vectors (the tensorial values at u).
Vector torsion_form_eval(const StatisticalFamily& family, const Frame& u,
                         const Vector& x_base, const Vector& y_base, double alpha,
                         const ExpectationStrategy& strategy, const FdSteps& steps = {});
LieAlgebraValue curvature_form_eval(const StatisticalFamily& family, const Frame& u,
                                    const Vector& x_base, const Vector& y_base,
                                    double alpha, const ExpectationStrategy& strategy,
                                    const FdSteps& steps = {});

// Field variants used by the identity checks.
Vector torsion_form_on_fields(const BundleField& x, const BundleField& y, const Frame& u,
                              const FdSteps& steps);
LieAlgebraValue curvature_form_on_fields(const StatisticalFamily& family,
                                         const BundleField& x, const BundleField& y,
                                         const Frame& u, double alpha,
                                         const ExpectationStrategy& strategy,
                                         const FdSteps& steps);

// u(Omega(X~, Y~) u^{-1}(Z)): the chart curvature operator through the bundle.
Vector curvature_via_bundle(const StatisticalFamily& family, const Frame& u,
                            const Vector& x, const Vector& y, const Vector& z,
                            double alpha, const ExpectationStrategy& strategy,
                            const FdSteps& steps = {});

struct BianchiResiduals {
  double first = 0.0;   // |dTheta - Omega ^ theta + omega~ ^ Theta|
  double second = 0.0;  // |dOmega - Omega ^ omega~|
};

// Residuals of both Bianchi identities on the fundamental horizontal fields
// H(xi1), H(xi2), H(xi3), with all finite-difference steps scaled by
// step_scale (for convergence checks).
BianchiResiduals bianchi_residuals(const StatisticalFamily& family, const Frame& u,
                                   const Vector& xi1, const Vector& xi2,
                                   const Vector& xi3, double alpha,
                                   const ExpectationStrategy& strategy,
                                   double step_scale = 1.0);

// Matrix exponential by scaling and squaring with a truncated series;
// meant for the small gl(n) matrices that appear here.
Matrix expm(const Matrix& m);

}  // namespace alphabundle::bundle
