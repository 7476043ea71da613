#include "alphabundle/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace alphabundle::quadrature {

namespace {

constexpr double kEps = 1e-14;
constexpr int kMaxIter = 100;

// Hermite nodes by Newton iteration on the normalized recurrence,
// largest root first, mirrored for the negative half.
Rule make_hermite(int n) {
  if (n < 2) throw std::invalid_argument("hermite rule needs n >= 2");
  Rule r;
  r.nodes.assign(n, 0.0);
  r.weights.assign(n, 0.0);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(n, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * r.nodes[n - 1];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * r.nodes[n - 2];
    } else {
      z = 2.0 * z - r.nodes[n - i + 1];
    }
    double pp = 0.0;
    for (int it = 0; it < kMaxIter; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(double(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= kEps) break;
    }
    r.nodes[n - 1 - i] = z;
    r.nodes[i] = -z;
    r.weights[n - 1 - i] = 2.0 / (pp * pp);
    r.weights[i] = r.weights[n - 1 - i];
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;  // kill the -0.0 from mirroring
  return r;
}

Rule make_legendre(int n) {
  if (n < 2) throw std::invalid_argument("legendre rule needs n >= 2");
  Rule r;
  r.nodes.assign(n, 0.0);
  r.weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < kMaxIter; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= kEps) break;
    }
    r.nodes[i] = -z;
    r.nodes[n - 1 - i] = z;
    r.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    r.weights[n - 1 - i] = r.weights[i];
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

Rule make_laguerre(int n) {
  if (n < 2) throw std::invalid_argument("laguerre rule needs n >= 2");
  Rule r;
  r.nodes.assign(n, 0.0);
  r.weights.assign(n, 0.0);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * n);
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * n);
    } else {
      double ai = i - 1;
      z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - r.nodes[i - 2]);
    }
    double pp = 0.0, p2 = 0.0;
    for (int it = 0; it < kMaxIter; ++it) {
      double p1 = 1.0;
      p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0 - z) * p2 - j * p3) / (j + 1);
      }
      pp = n * (p1 - p2) / z;
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= kEps * std::max(1.0, z)) break;
    }
    r.nodes[i] = z;
    r.weights[i] = -1.0 / (pp * n * p2);
  }
  return r;
}

const Rule& cached(int n, std::map<int, Rule>& cache, std::mutex& mu, Rule (*make)(int)) {
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make(n)).first;
  return it->second;
}

}  // namespace

const Rule& hermite(int n) {
  static std::map<int, Rule> cache;
  static std::mutex mu;
  return cached(n, cache, mu, make_hermite);
}

const Rule& legendre(int n) {
  static std::map<int, Rule> cache;
  static std::mutex mu;
  return cached(n, cache, mu, make_legendre);
}

const Rule& laguerre(int n) {
  static std::map<int, Rule> cache;
  static std::mutex mu;
  return cached(n, cache, mu, make_laguerre);
}

}  // namespace alphabundle::quadrature
