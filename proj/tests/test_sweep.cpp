#include <doctest.h>

#include "alphabundle/errors.hpp"
#include "alphabundle/families.hpp"
#include "alphabundle/sweep.hpp"

using namespace alphabundle;

namespace {

const ExpectationStrategy kQuad = ExpectationStrategy::gauss_hermite(64);

StatisticalFamily expression_normal() {
  const auto density = families::parse_density(
      "-(x - th1)^2/(2*th2^2) - log(th2) - 0.5*log(2*pi)", 2);
  DomainBox dom = DomainBox::unbounded(2);
  dom.lower[1] = 0.0;
  return families::make_family_from_expression(
      density, SampleSpace::real_line(), dom,
      [](const Vector& th) { return QuadHint{th[0], th[1]}; }, "normal-expr");
}

}  // namespace

TEST_CASE("make_grid builds the cartesian product, last axis fastest") {
  const auto grid = sweep::make_grid({{0.0, 1.0}, {5.0, 6.0, 7.0}});
  REQUIRE(grid.size() == 6);
  CHECK(grid[0][0] == 0.0);
  CHECK(grid[0][1] == 5.0);
  CHECK(grid[1][1] == 6.0);
  CHECK(grid[3][0] == 1.0);
  CHECK(grid[3][1] == 5.0);
  CHECK_THROWS_AS(sweep::make_grid({}), ConfigError);
  CHECK_THROWS_AS(sweep::make_grid({{1.0}, {}}), ConfigError);
}

TEST_CASE("OpenMP sweep is bit-identical to the serial reference") {
  const auto family = expression_normal();
  const auto grid = sweep::make_grid({{-1.0, 0.0, 1.0}, {0.5, 1.0, 2.0}});
  const auto serial = sweep::tensor_sweep(family, grid, 0.5, kQuad, ExecMode::Serial);
  const auto parallel = sweep::tensor_sweep(family, grid, 0.5, kQuad, ExecMode::OpenMP);
  REQUIRE(serial.size() == parallel.size());
  for (size_t k = 0; k < serial.size(); ++k) {
    CHECK((serial[k].g - parallel[k].g).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) {
          CHECK(serial[k].gamma_lower(i, j, l) == parallel[k].gamma_lower(i, j, l));
          CHECK(serial[k].gamma_mixed(i, j, l) == parallel[k].gamma_mixed(i, j, l));
          for (int m = 0; m < 2; ++m)
            CHECK(serial[k].curvature(i, j, l, m) == parallel[k].curvature(i, j, l, m));
        }
    CHECK(serial[k].r_1212 == parallel[k].r_1212);
    CHECK(serial[k].sectional == parallel[k].sectional);
  }
}

TEST_CASE("flatness sweep matches the per-point evaluation") {
  const auto normal = families::make_normal();
  const auto grid = sweep::make_grid({{-1.0, 0.0, 1.0, 2.0}, {0.5, 1.0, 1.5, 2.0}});
  const auto flat = sweep::flatness_sweep(normal, grid, 1.0, 1e-6,
                                          ExpectationStrategy::closed_form());
  CHECK(flat.flat);
  const auto curved = sweep::flatness_sweep(normal, grid, 0.0, 1e-6,
                                            ExpectationStrategy::closed_form());
  CHECK_FALSE(curved.flat);
  CHECK(curved.max_abs_curvature == doctest::Approx(16.0));
}

TEST_CASE("sweep errors are deterministic and carry the failing point") {
  const auto normal = families::make_normal();
  std::vector<Vector> grid;
  Vector good(2), bad(2);
  good << 0.0, 1.0;
  bad << 0.0, -1.0;
  grid.push_back(good);
  grid.push_back(bad);
  for (ExecMode mode : {ExecMode::Serial, ExecMode::OpenMP}) {
    CHECK_THROWS_AS(
        sweep::tensor_sweep(normal, grid, 0.0, ExpectationStrategy::closed_form(), mode),
        DomainError);
  }
}
