#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alphabundle/manifold.hpp"
#include "alphabundle/parallel.hpp"

namespace alphabundle::sweep {

struct GridPointTensors {
  Vector theta;
  double alpha = 0.0;
  Matrix g;
  Tensor3 skewness;
  Tensor3 gamma_lower;
  Tensor3 gamma_mixed;
  Tensor4 curvature;
  double r_1212 = 0.0;      // n = 2 convenience
  double sectional = 0.0;   // -R_1212 / det g, n = 2
};

// Cartesian product of per-coordinate axis values.
std::vector<Vector> make_grid(const std::vector<std::vector<double>>& axes);

// Full tensor set at every grid point. Grid points fill independent slots,
// so OpenMP and serial results are bit-identical.
std::vector<GridPointTensors> tensor_sweep(const StatisticalFamily& family,
                                           const std::vector<Vector>& grid, double alpha,
                                           const ExpectationStrategy& strategy,
                                           ExecMode mode = ExecMode::OpenMP);

manifold::FlatnessReport flatness_sweep(const StatisticalFamily& family,
                                        const std::vector<Vector>& grid, double alpha,
                                        double tol, const ExpectationStrategy& strategy,
                                        ExecMode mode = ExecMode::OpenMP);

}  // namespace alphabundle::sweep
