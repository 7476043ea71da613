#pragma once

#include <Eigen/Dense>
#include <vector>

namespace alphabundle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Dense rank-3 array, row-major in (i,j,k).
class Tensor3 {
 public:
  Tensor3() : n_(0) {}
  explicit Tensor3(int n) : n_(n), v_(static_cast<size_t>(n) * n * n, 0.0) {}

  int dim() const { return n_; }
  double& operator()(int i, int j, int k) { return v_[idx(i, j, k)]; }
  double operator()(int i, int j, int k) const { return v_[idx(i, j, k)]; }

  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }
  const std::vector<double>& data() const { return v_; }

 private:
  size_t idx(int i, int j, int k) const {
    return (static_cast<size_t>(i) * n_ + j) * n_ + k;
  }
  int n_;
  std::vector<double> v_;
};

// Dense rank-4 array, row-major in (i,j,k,l).
class Tensor4 {
 public:
  Tensor4() : n_(0) {}
  explicit Tensor4(int n) : n_(n), v_(static_cast<size_t>(n) * n * n * n, 0.0) {}

  int dim() const { return n_; }
  double& operator()(int i, int j, int k, int l) { return v_[idx(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return v_[idx(i, j, k, l)]; }

  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }
  const std::vector<double>& data() const { return v_; }

 private:
  size_t idx(int i, int j, int k, int l) const {
    return ((static_cast<size_t>(i) * n_ + j) * n_ + k) * n_ + l;
  }
  int n_;
  std::vector<double> v_;
};

}  // namespace alphabundle
