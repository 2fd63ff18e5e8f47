#pragma once

#include <cstdint>
#include <vector>

#include "deepstd/params.hpp"

namespace deepstd {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected ADAM over a ParamSet. Moments live here, ordered like the
/// ParamSet, and are serialized with checkpoints so training can resume.
class Adam {
 public:
  Adam(const ParamSet& ps, AdamConfig cfg);

  /// One update from the gradients currently held in the ParamSet.
  /// Throws NumericError naming the parameter if a gradient is non-finite.
  void step(ParamSet& ps);

  uint64_t step_count() const { return t_; }
  void set_step_count(uint64_t t) { t_ = t; }
  std::vector<Mat>& moments1() { return m_; }
  std::vector<Mat>& moments2() { return v_; }
  const AdamConfig& config() const { return cfg_; }
  void set_lr(double lr) { cfg_.lr = lr; }

 private:
  AdamConfig cfg_;
  uint64_t t_ = 0;
  std::vector<Mat> m_, v_;
};

}  // namespace deepstd
