#pragma once

#include <functional>
#include <string>
#include <vector>

#include "deepstd/params.hpp"
#include "deepstd/tape.hpp"

namespace deepstd {

struct GradCheckEntry {
  std::string param;
  double max_rel_err;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double worst = 0.0;
  bool passed(double tol) const { return worst < tol; }
};

/// Compares reverse-mode gradients of a scalar loss against central finite
/// differences with the given step. loss_fn must rebuild the forward pass
/// from the current parameter values on every call; it receives a tape only
/// for the analytic pass.
GradCheckReport grad_check(ParamSet& ps, const std::function<Var(Tape*)>& loss_fn,
                           double fd_step = 1e-4);

}  // namespace deepstd
