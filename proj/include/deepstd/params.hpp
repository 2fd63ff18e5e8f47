#pragma once

#include <random>
#include <string>
#include <vector>

#include "deepstd/common.hpp"
#include "deepstd/mat.hpp"

namespace deepstd {

/// A named trainable tensor with its gradient accumulator.
struct ParamTensor {
  std::string name;
  Mat v;
  Mat g;

  ParamTensor(std::string n, int rows, int cols)
      : name(std::move(n)), v(rows, cols), g(rows, cols) {}

  size_t size() const { return v.size(); }

  void init_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    for (auto& x : v.a) x = d(rng);
  }
};

/// Ordered, non-owning registry of a model's parameters. Registration order
/// is the canonical order for initialization, optimizer steps and
/// checkpoint layout, which keeps them deterministic.
class ParamSet {
 public:
  void add(ParamTensor* p) {
    for (auto* q : params_)
      if (q->name == p->name) throw ConfigError("duplicate parameter name: " + p->name);
    params_.push_back(p);
  }

  const std::vector<ParamTensor*>& all() const { return params_; }

  ParamTensor* find(const std::string& name) const {
    for (auto* p : params_)
      if (p->name == name) return p;
    return nullptr;
  }

  void zero_grad() {
    for (auto* p : params_) p->g.zero();
  }

  size_t total_size() const {
    size_t n = 0;
    for (auto* p : params_) n += p->size();
    return n;
  }

 private:
  std::vector<ParamTensor*> params_;
};

}  // namespace deepstd
