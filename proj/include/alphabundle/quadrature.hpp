#pragma once

#include <vector>

namespace alphabundle::quadrature {

// Nodes and weights of an n-point rule on its reference domain.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Hermite: int_-inf^inf e^{-t^2} f(t) dt ~= sum w_i f(t_i).
const Rule& hermite(int n);

// Gauss-Legendre on [-1, 1].
const Rule& legendre(int n);

// Gauss-Laguerre: int_0^inf e^{-t} f(t) dt ~= sum w_i f(t_i).
const Rule& laguerre(int n);

}  // namespace alphabundle::quadrature
