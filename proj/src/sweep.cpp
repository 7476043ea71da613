#include "alphabundle/sweep.hpp"

#include <sstream>

#include "alphabundle/errors.hpp"

namespace alphabundle::sweep {

namespace {

std::string with_point(const char* what, const Vector& theta) {
  std::ostringstream os;
  os << what << " [theta = (";
  for (int i = 0; i < theta.size(); ++i) os << (i ? ", " : "") << theta[i];
  os << ")]";
  return os.str();
}

// Rethrows numeric failures with the grid point attached, keeping the type.
template <class F>
auto at_point(const Vector& theta, F&& body) {
  try {
    return body();
  } catch (const DomainError& e) {
    throw DomainError(with_point(e.what(), theta));
  } catch (const EvaluationError& e) {
    throw EvaluationError(with_point(e.what(), theta));
  } catch (const SingularMetricError& e) {
    throw SingularMetricError(with_point(e.what(), theta));
  } catch (const SingularFrameError& e) {
    throw SingularFrameError(with_point(e.what(), theta));
  } catch (const NumericError& e) {
    throw NumericError(with_point(e.what(), theta));
  }
}

}  // namespace

std::vector<Vector> make_grid(const std::vector<std::vector<double>>& axes) {
  if (axes.empty()) throw ConfigError("grid needs at least one axis");
  for (const auto& a : axes) {
    if (a.empty()) throw ConfigError("grid axes must be non-empty");
  }
  const int n = static_cast<int>(axes.size());
  std::vector<Vector> grid;
  std::vector<size_t> idx(n, 0);
  for (;;) {
    Vector p(n);
    for (int i = 0; i < n; ++i) p[i] = axes[i][idx[i]];
    grid.push_back(p);
    int k = n - 1;  // last axis fastest
    while (k >= 0 && ++idx[k] == axes[k].size()) idx[k--] = 0;
    if (k < 0) break;
  }
  return grid;
}

std::vector<GridPointTensors> tensor_sweep(const StatisticalFamily& family,
                                           const std::vector<Vector>& grid, double alpha,
                                           const ExpectationStrategy& strategy,
                                           ExecMode mode) {
  std::vector<GridPointTensors> out(grid.size());
  parallel_for(grid.size(), mode, [&](std::size_t k) {
    at_point(grid[k], [&] {
      GridPointTensors& p = out[k];
      p.theta = grid[k];
      p.alpha = alpha;
      p.g = manifold::fisher_metric(family, p.theta, strategy);
      p.skewness = manifold::skewness_tensor(family, p.theta, strategy);
      p.gamma_lower = manifold::christoffel_lower(family, p.theta, alpha, strategy);
      p.gamma_mixed = manifold::christoffel_mixed(family, p.theta, alpha, strategy);
      p.curvature = manifold::curvature_tensor(family, p.theta, alpha, strategy);
      if (family.n == 2) {
        p.r_1212 = p.curvature(0, 1, 0, 1);
        p.sectional = -p.r_1212 / p.g.determinant();
      }
      return 0;
    });
  });
  return out;
}

manifold::FlatnessReport flatness_sweep(const StatisticalFamily& family,
                                        const std::vector<Vector>& grid, double alpha,
                                        double tol, const ExpectationStrategy& strategy,
                                        ExecMode mode) {
  if (grid.empty()) throw ConfigError("flatness grid must be non-empty");
  std::vector<double> maxima(grid.size(), 0.0);
  parallel_for(grid.size(), mode, [&](std::size_t k) {
    maxima[k] = at_point(grid[k], [&] {
      return manifold::curvature_tensor(family, grid[k], alpha, strategy).max_abs();
    });
  });
  manifold::FlatnessReport rep;
  rep.tolerance = tol;
  for (size_t k = 0; k < grid.size(); ++k) {
    if (maxima[k] >= rep.max_abs_curvature) {
      rep.max_abs_curvature = maxima[k];
      rep.argmax_theta = grid[k];
    }
  }
  rep.flat = rep.max_abs_curvature <= tol;
  return rep;
}

}  // namespace alphabundle::sweep
