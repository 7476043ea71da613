// Serial-vs-OpenMP benchmark for the tensor grid sweep. The expression
// family drives the quadrature + finite-difference path, which is the
// compute-heavy configuration; results must match bitwise.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "alphabundle/families.hpp"
#include "alphabundle/sweep.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace alphabundle;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double run_sweep(const StatisticalFamily& family, const std::vector<Vector>& grid,
                 ExecMode mode, std::vector<sweep::GridPointTensors>& out) {
  const auto start = std::chrono::steady_clock::now();
  out = sweep::tensor_sweep(family, grid, 0.5, ExpectationStrategy::gauss_hermite(64),
                            mode);
  return seconds_since(start);
}

}  // namespace

int main(int argc, char** argv) {
  int side = 24;
  if (argc > 1) side = std::atoi(argv[1]);
  if (side < 2) side = 2;

  const auto density = families::parse_density(
      "-(x - th1)^2/(2*th2^2) - log(th2) - 0.5*log(2*pi)", 2);
  DomainBox dom = DomainBox::unbounded(2);
  dom.lower[1] = 0.0;
  const auto family = families::make_family_from_expression(
      density, SampleSpace::real_line(), dom,
      [](const Vector& th) { return QuadHint{th[0], th[1]}; }, "normal-expr");

  std::vector<std::vector<double>> axes(2);
  for (int i = 0; i < side; ++i) {
    axes[0].push_back(-2.0 + 4.0 * i / (side - 1));
    axes[1].push_back(0.5 + 2.5 * i / (side - 1));
  }
  const auto grid = sweep::make_grid(axes);

#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  std::printf("tensor sweep: %zu grid points, quadrature + finite differences, "
              "%d threads available\n",
              grid.size(), threads);

  std::vector<sweep::GridPointTensors> serial_out, parallel_out;
  const double warm = run_sweep(family, grid, ExecMode::Serial, serial_out);
  (void)warm;
  const double t_serial = run_sweep(family, grid, ExecMode::Serial, serial_out);
  const double t_openmp = run_sweep(family, grid, ExecMode::OpenMP, parallel_out);

  double max_diff = 0.0;
  for (size_t k = 0; k < grid.size(); ++k) {
    max_diff = std::max(max_diff,
                        (serial_out[k].g - parallel_out[k].g).cwiseAbs().maxCoeff());
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l)
          for (int m = 0; m < 2; ++m)
            max_diff = std::max(max_diff,
                                std::abs(serial_out[k].curvature(i, j, l, m) -
                                         parallel_out[k].curvature(i, j, l, m)));
  }

  std::printf("serial reference : %8.3f s  (%.2f ms/point)\n", t_serial,
              1e3 * t_serial / grid.size());
  std::printf("openmp           : %8.3f s  (%.2f ms/point)\n", t_openmp,
              1e3 * t_openmp / grid.size());
  std::printf("speedup          : %8.2fx\n", t_serial / t_openmp);
  std::printf("max |serial - openmp| = %.1f (must be exactly 0)\n", max_diff);
  return max_diff == 0.0 ? 0 : 1;
}
