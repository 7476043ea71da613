#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "alphabundle/bundle.hpp"
#include "alphabundle/parallel.hpp"

// Named residual checks for the identities the library is built around:
// the bundle/chart agreement of nabla, T and R, the structure equations,
// the fundamental-field properties, the Bianchi identities and the
// geodesic criterion. Reports are bit-reproducible from their seed.

namespace alphabundle::verify {

struct CheckSample {
  nlohmann::json inputs;  // enough state to rerun the sample standalone
  std::map<std::string, double> residuals;
  double max_residual = 0.0;
};

struct CheckReport {
  std::string name;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  double max_residual = 0.0;
  bool pass = false;
  std::vector<CheckSample> samples;

  nlohmann::json to_json() const;
};

inline const std::vector<double> kDefaultAlphas = {-1.0, -0.5, 0.0, 0.5, 1.0};

// Bundle-vs-chart agreement of nabla (5.1), torsion (5.2) and curvature
// (5.3) at random (theta, frame, vectors), plus the identity-frame
// coordinate-field cases against the Christoffel contraction.
CheckReport check_theorem_5_8(const StatisticalFamily& family, int samples,
                              const std::vector<double>& alphas, std::uint64_t seed,
                              double tol, const ExpectationStrategy& strategy,
                              ExecMode mode = ExecMode::OpenMP);

// Both structure equations on horizontal pairs, mixed vertical/horizontal
// pairs and general sums. step_scale scales every finite-difference step.
CheckReport check_structure_equations(const StatisticalFamily& family, int samples,
                                      const std::vector<double>& alphas,
                                      std::uint64_t seed, double tol,
                                      const ExpectationStrategy& strategy,
                                      ExecMode mode = ExecMode::OpenMP,
                                      double step_scale = 1.0);

// The three fundamental-field properties: theta(H(xi)) = xi, right
// equivariance of H, and [tau(C), H(xi)] = H(C xi).
CheckReport check_lemma_5_6(const StatisticalFamily& family, int samples,
                            const std::vector<double>& alphas, std::uint64_t seed,
                            double tol, const ExpectationStrategy& strategy,
                            ExecMode mode = ExecMode::OpenMP);

CheckReport check_bianchi(const StatisticalFamily& family, int samples,
                          const std::vector<double>& alphas, std::uint64_t seed,
                          double tol, const ExpectationStrategy& strategy,
                          ExecMode mode = ExecMode::OpenMP, double step_scale = 1.0);

// Integrates the alpha-geodesic from (theta0, v0), lifts it and reports
// max |d/dt theta(gamma~')|; a sinusoidally perturbed control curve must
// come out at least 100x worse.
CheckReport check_geodesic_criterion(const StatisticalFamily& family,
                                     const Vector& theta0, const Vector& v0,
                                     double alpha, double tol,
                                     const ExpectationStrategy& strategy,
                                     double t_end = 1.0, double dt = 1e-3);

}  // namespace alphabundle::verify
