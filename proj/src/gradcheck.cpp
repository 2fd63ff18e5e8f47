#include "deepstd/gradcheck.hpp"

#include <cmath>

namespace deepstd {

GradCheckReport grad_check(ParamSet& ps, const std::function<Var(Tape*)>& loss_fn,
                           double fd_step) {
  ps.zero_grad();
  Tape tape;
  Var loss = loss_fn(&tape);
  (*loss.g)(0, 0) = 1.0;
  tape.backward();

  GradCheckReport report;
  for (auto* p : ps.all()) {
    double worst = 0.0;
    for (size_t i = 0; i < p->size(); ++i) {
      const double saved = p->v.a[i];
      p->v.a[i] = saved + fd_step;
      const double lp = (*loss_fn(nullptr).v)(0, 0);
      p->v.a[i] = saved - fd_step;
      const double lm = (*loss_fn(nullptr).v)(0, 0);
      p->v.a[i] = saved;
      const double numeric = (lp - lm) / (2.0 * fd_step);
      const double analytic = p->g.a[i];
      const double denom = std::max({std::fabs(numeric), std::fabs(analytic), 1e-6});
      worst = std::max(worst, std::fabs(numeric - analytic) / denom);
    }
    report.entries.push_back({p->name, worst});
    report.worst = std::max(report.worst, worst);
  }
  return report;
}

}  // namespace deepstd
