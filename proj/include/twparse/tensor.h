#ifndef TWPARSE_TENSOR_H
#define TWPARSE_TENSOR_H

#include <cmath>
#include <initializer_list>
#include <vector>

namespace twparse {

// Dense row-major matrix; column vectors have cols == 1. Values are held in
// doubles at runtime, model files store 32-bit floats (see ModelParams).
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0) {}

  static Tensor vec(std::initializer_list<double> xs) {
    Tensor t(static_cast<int>(xs.size()), 1);
    int i = 0;
    for (double x : xs) t.v[i++] = x;
    return t;
  }

  double& operator()(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
  double& operator[](size_t i) { return v[i]; }
  double operator[](size_t i) const { return v[i]; }

  size_t size() const { return v.size(); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

  void fill(double x) { std::fill(v.begin(), v.end(), x); }

  bool finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }

  bool operator==(const Tensor&) const = default;
};

// Softmax over the `support` subset of a logit vector (all entries when
// support is empty); returns probabilities indexed like the input.
std::vector<double> softmax_over(const Tensor& logits, const std::vector<int>& support);

}  // namespace twparse

#endif
