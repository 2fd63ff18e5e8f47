#include "deepstd/optim.hpp"

#include <cmath>

#include "deepstd/common.hpp"

namespace deepstd {

Adam::Adam(const ParamSet& ps, AdamConfig cfg) : cfg_(cfg) {
  for (const auto* p : ps.all()) {
    m_.emplace_back(p->v.rows, p->v.cols);
    v_.emplace_back(p->v.rows, p->v.cols);
  }
}

void Adam::step(ParamSet& ps) {
  const auto& params = ps.all();
  if (params.size() != m_.size()) throw ConfigError("Adam: parameter set changed size");
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (size_t pi = 0; pi < params.size(); ++pi) {
    ParamTensor& p = *params[pi];
    double* m = m_[pi].data();
    double* v = v_[pi].data();
    for (size_t i = 0; i < p.size(); ++i) {
      const double g = p.g.a[i];
      if (!std::isfinite(g))
        throw NumericError("non-finite gradient in parameter " + p.name);
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      p.v.a[i] -= cfg_.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg_.eps);
    }
  }
}

}  // namespace deepstd
