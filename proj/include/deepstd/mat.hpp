#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace deepstd {

/// Dense row-major matrix of doubles. The only tensor type used by the
/// differentiable kernels; vectors are 1xN or Nx1 as convenient.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

  size_t size() const { return a.size(); }
  double* data() { return a.data(); }
  const double* data() const { return a.data(); }
  double* row(int i) { return a.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return a.data() + static_cast<size_t>(i) * cols; }

  double& operator()(int i, int j) {
    assert(i >= 0 && i < rows && j >= 0 && j < cols);
    return a[static_cast<size_t>(i) * cols + j];
  }
  double operator()(int i, int j) const {
    assert(i >= 0 && i < rows && j >= 0 && j < cols);
    return a[static_cast<size_t>(i) * cols + j];
  }

  void zero() { std::fill(a.begin(), a.end(), 0.0); }

  bool all_finite() const {
    for (double v : a)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline bool same_shape(const Mat& x, const Mat& y) {
  return x.rows == y.rows && x.cols == y.cols;
}

}  // namespace deepstd
