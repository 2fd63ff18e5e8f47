#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "deepstd/mat.hpp"

namespace deepstd {

/// Reverse-mode tape. Forward ops push their backward closure; backward()
/// replays them in reverse. One tape per forward pass; passing a null Tape*
/// to a layer runs plain inference with no recording.
class Tape {
 public:
  void push(std::function<void()> op) { ops_.push_back(std::move(op)); }
  void backward() {
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
    ops_.clear();
  }
  size_t size() const { return ops_.size(); }

 private:
  std::vector<std::function<void()>> ops_;
};

/// A value flowing through the forward pass: shared data plus, when a tape
/// is recording, a gradient buffer that downstream closures accumulate into.
struct Var {
  std::shared_ptr<Mat> v;
  std::shared_ptr<Mat> g;  // null when not recording

  static Var make(int rows, int cols, bool grad) {
    Var x;
    x.v = std::make_shared<Mat>(rows, cols);
    if (grad) x.g = std::make_shared<Mat>(rows, cols);
    return x;
  }
  static Var wrap(Mat m, bool grad) {
    Var x;
    x.v = std::make_shared<Mat>(std::move(m));
    if (grad) x.g = std::make_shared<Mat>(x.v->rows, x.v->cols);
    return x;
  }
  int rows() const { return v->rows; }
  int cols() const { return v->cols; }
};

}  // namespace deepstd
