#include "deepstd/layers.hpp"

#include <cmath>

#include "deepstd/common.hpp"
#include "deepstd/kernels.hpp"

namespace deepstd {

using kernels::axpy;
using kernels::col_sum;
using kernels::dot;
using kernels::fast_tanh;
using kernels::mm_nn;
using kernels::mm_nt;
using kernels::mm_tn;

void Dense::init(std::mt19937_64& rng) {
  double s = 1.0 / std::sqrt(static_cast<double>(W.v.rows));
  W.init_uniform(rng, -s, s);
}

Var Dense::forward(const Var& x, Tape* tape) {
  if (x.cols() != W.v.rows) throw DataError("Dense: input dim mismatch for " + W.name);
  const int t = x.rows(), out_dim = W.v.cols;
  Var out = Var::make(t, out_dim, tape != nullptr);
  for (int i = 0; i < t; ++i)
    std::copy(b.v.row(0), b.v.row(0) + out_dim, out.v->row(i));
  mm_nn(*out.v, *x.v, W.v);
  if (act == Activation::Tanh) kernels::tanh_inplace(out.v->data(), static_cast<int>(out.v->size()));
  if (tape) {
    Var xin = x;
    Var y = out;
    tape->push([this, xin, y]() {
      const int rows = y.rows(), cols = y.cols();
      Mat dpre(rows, cols);
      if (act == Activation::Tanh) {
        for (size_t i = 0; i < dpre.size(); ++i) {
          double yv = y.v->a[i];
          dpre.a[i] = y.g->a[i] * (1.0 - yv * yv);
        }
      } else {
        dpre.a = y.g->a;
      }
      mm_tn(W.g, *xin.v, dpre);
      col_sum(b.g.row(0), dpre);
      if (xin.g) mm_nt(*xin.g, dpre, W.v);
    });
  }
  return out;
}

Var Embedding::forward(const std::vector<int>& ids, Tape* tape) {
  const int dim = table.v.cols;
  Var out = Var::make(static_cast<int>(ids.size()), dim, tape != nullptr);
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table.v.rows)
      throw DataError("Embedding: index out of range in " + table.name);
    std::copy(table.v.row(ids[i]), table.v.row(ids[i]) + dim, out.v->row(static_cast<int>(i)));
  }
  if (tape) {
    Var y = out;
    std::vector<int> idv = ids;
    tape->push([this, y, idv]() {
      for (size_t i = 0; i < idv.size(); ++i)
        axpy(table.g.row(idv[i]), 1.0, y.g->row(static_cast<int>(i)), table.v.cols);
    });
  }
  return out;
}

void LstmDir::init(std::mt19937_64& rng) {
  double sx = 1.0 / std::sqrt(static_cast<double>(in_dim));
  double sh = 1.0 / std::sqrt(static_cast<double>(hidden));
  Wx.init_uniform(rng, -sx, sx);
  Wh.init_uniform(rng, -sh, sh);
  // forget-gate bias starts at 1
  for (int j = hidden; j < 2 * hidden; ++j) b.v(0, j) = 1.0;
}

Var LstmDir::forward(const Var& x, Tape* tape) {
  const int t_len = x.rows(), h = hidden;
  if (t_len < 1) throw DataError("LstmDir: empty sequence");
  if (x.cols() != in_dim) throw DataError("LstmDir: input dim mismatch for " + Wx.name);

  Var out = Var::make(t_len, h, tape != nullptr);
  // input contribution for all steps at once: G = b + x Wx
  auto gates = std::make_shared<Mat>(t_len, 4 * h);
  for (int t = 0; t < t_len; ++t)
    std::copy(b.v.row(0), b.v.row(0) + 4 * h, gates->row(t));
  mm_nn(*gates, *x.v, Wx.v);

  auto cells = std::make_shared<Mat>(t_len, h);
  std::vector<double> hv(h, 0.0), cv(h, 0.0);
  for (int s = 0; s < t_len; ++s) {
    const int t = reverse ? t_len - 1 - s : s;
    double* g = gates->row(t);
    if (s > 0)
      for (int k = 0; k < h; ++k) axpy(g, hv[k], Wh.v.row(k), 4 * h);
    kernels::sigmoid_inplace(g, h);              // input gate
    kernels::sigmoid_inplace(g + h, h);          // forget gate
    kernels::tanh_inplace(g + 2 * h, h);         // candidate
    kernels::sigmoid_inplace(g + 3 * h, h);      // output gate
    double* crow = cells->row(t);
    double* hrow = out.v->row(t);
    for (int j = 0; j < h; ++j) {
      cv[j] = g[h + j] * cv[j] + g[j] * g[2 * h + j];
      crow[j] = cv[j];
      hv[j] = g[3 * h + j] * fast_tanh(cv[j]);
      hrow[j] = hv[j];
    }
  }

  if (tape) {
    Var xin = x;
    Var y = out;
    tape->push([this, xin, y, gates, cells]() {
      const int t_len = xin.rows(), h = hidden;
      Mat dgates(t_len, 4 * h);
      std::vector<double> dh(h, 0.0), dc(h, 0.0);
      for (int s = t_len - 1; s >= 0; --s) {
        const int t = reverse ? t_len - 1 - s : s;
        const int t_prev = reverse ? t + 1 : t - 1;
        const double* g = gates->row(t);
        const double* crow = cells->row(t);
        const double* cprev = s > 0 ? cells->row(t_prev) : nullptr;
        const double* dout = y.g->row(t);
        double* dg = dgates.row(t);
        for (int j = 0; j < h; ++j) {
          double gi = g[j], gf = g[h + j], gg = g[2 * h + j], go = g[3 * h + j];
          double tc = fast_tanh(crow[j]);
          double dhj = dh[j] + dout[j];
          double dcj = dc[j] + dhj * go * (1.0 - tc * tc);
          double cp = cprev ? cprev[j] : 0.0;
          dg[j] = dcj * gg * gi * (1.0 - gi);
          dg[h + j] = dcj * cp * gf * (1.0 - gf);
          dg[2 * h + j] = dcj * gi * (1.0 - gg * gg);
          dg[3 * h + j] = dhj * tc * go * (1.0 - go);
          dc[j] = dcj * gf;
        }
        for (int k = 0; k < h; ++k) dh[k] = dot(dg, Wh.v.row(k), 4 * h);
      }
      mm_tn(Wx.g, *xin.v, dgates);
      col_sum(b.g.row(0), dgates);
      // previous-step outputs, aligned with each step's time index
      Mat hprev(t_len, h);
      for (int s = 1; s < t_len; ++s) {
        const int t = reverse ? t_len - 1 - s : s;
        const int tp = reverse ? t + 1 : t - 1;
        std::copy(y.v->row(tp), y.v->row(tp) + h, hprev.row(t));
      }
      mm_tn(Wh.g, hprev, dgates);
      if (xin.g) mm_nt(*xin.g, dgates, Wx.v);
    });
  }
  return out;
}

Var BiLstm::forward(const Var& x, Tape* tape) {
  Var yf = fw.forward(x, tape);
  Var yb = bw.forward(x, tape);
  return concat_cols({yf, yb}, tape);
}

SkipStack::SkipStack(const std::string& prefix, int n_layers, int d) : dim(d) {
  if (d % 2 != 0) throw ConfigError("SkipStack: dimension must be even, got " + std::to_string(d));
  for (int i = 0; i < n_layers; ++i)
    layers.push_back(std::make_unique<BiLstm>(prefix + ".l" + std::to_string(i), d, d / 2));
}

Var SkipStack::forward(const Var& x, Tape* tape) {
  if (x.cols() != dim) throw DataError("SkipStack: input dim mismatch");
  Var cur = x;
  for (auto& l : layers) {
    Var y = l->forward(cur, tape);
    cur = add(y, cur, tape);
  }
  return cur;
}

Var MaxPoolTime::forward(const Var& x, Tape* tape) const {
  const int t_len = x.rows(), d = x.cols();
  if (pool < 1 || stride < 1) throw ConfigError("MaxPoolTime: pool and stride must be >= 1");
  if (pool > t_len) throw DataError("MaxPoolTime: pool window larger than sequence");
  const int k_len = out_len(t_len);
  Var out = Var::make(k_len, d, tape != nullptr);
  auto arg = std::make_shared<std::vector<int>>(static_cast<size_t>(k_len) * d);
  for (int k = 0; k < k_len; ++k) {
    const int t0 = k * stride;
    for (int j = 0; j < d; ++j) {
      double best = (*x.v)(t0, j);
      int besti = t0;
      for (int t = t0 + 1; t < t0 + pool; ++t) {
        double v = (*x.v)(t, j);
        if (v > best) {
          best = v;
          besti = t;
        }
      }
      (*out.v)(k, j) = best;
      (*arg)[static_cast<size_t>(k) * d + j] = besti;
    }
  }
  if (tape) {
    Var xin = x, y = out;
    tape->push([xin, y, arg, d]() {
      for (int k = 0; k < y.rows(); ++k)
        for (int j = 0; j < d; ++j)
          (*xin.g)((*arg)[static_cast<size_t>(k) * d + j], j) += (*y.g)(k, j);
    });
  }
  return out;
}

Var concat_cols(const std::vector<Var>& xs, Tape* tape) {
  const int rows = xs.at(0).rows();
  int total = 0;
  for (const auto& x : xs) {
    if (x.rows() != rows) throw DataError("concat_cols: row count mismatch");
    total += x.cols();
  }
  Var out = Var::make(rows, total, tape != nullptr);
  int off = 0;
  for (const auto& x : xs) {
    for (int i = 0; i < rows; ++i)
      std::copy(x.v->row(i), x.v->row(i) + x.cols(), out.v->row(i) + off);
    off += x.cols();
  }
  if (tape) {
    std::vector<Var> ins = xs;
    Var y = out;
    tape->push([ins, y]() {
      int off = 0;
      for (const auto& x : ins) {
        if (x.g)
          for (int i = 0; i < x.rows(); ++i)
            axpy(x.g->row(i), 1.0, y.g->row(i) + off, x.cols());
        off += x.cols();
      }
    });
  }
  return out;
}

Var add(const Var& a, const Var& b, Tape* tape) {
  if (!same_shape(*a.v, *b.v)) throw DataError("add: shape mismatch");
  Var out = Var::make(a.rows(), a.cols(), tape != nullptr);
  for (size_t i = 0; i < out.v->size(); ++i) out.v->a[i] = a.v->a[i] + b.v->a[i];
  if (tape) {
    Var av = a, bv = b, y = out;
    tape->push([av, bv, y]() {
      if (av.g)
        for (size_t i = 0; i < y.g->size(); ++i) av.g->a[i] += y.g->a[i];
      if (bv.g)
        for (size_t i = 0; i < y.g->size(); ++i) bv.g->a[i] += y.g->a[i];
    });
  }
  return out;
}

Var bilstm_finals(const Var& y, int hidden, Tape* tape) {
  const int t_len = y.rows();
  if (y.cols() != 2 * hidden) throw DataError("bilstm_finals: dim mismatch");
  Var out = Var::make(1, 2 * hidden, tape != nullptr);
  std::copy(y.v->row(t_len - 1), y.v->row(t_len - 1) + hidden, out.v->row(0));
  std::copy(y.v->row(0) + hidden, y.v->row(0) + 2 * hidden, out.v->row(0) + hidden);
  if (tape) {
    Var yin = y, o = out;
    tape->push([yin, o, hidden, t_len]() {
      axpy(yin.g->row(t_len - 1), 1.0, o.g->row(0), hidden);
      axpy(yin.g->row(0) + hidden, 1.0, o.g->row(0) + hidden, hidden);
    });
  }
  return out;
}

namespace {
constexpr double kBceClampLo = 1e-7;
constexpr double kBceClampHi = 1.0 - 1e-7;
}  // namespace

Var bce_loss(const Var& p, const std::vector<double>& targets, Tape* tape) {
  const int n = p.rows();
  if (p.cols() != 1 || static_cast<size_t>(n) != targets.size())
    throw DataError("bce_loss: length mismatch");
  Var out = Var::make(1, 1, tape != nullptr);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double ph = std::min(kBceClampHi, std::max(kBceClampLo, (*p.v)(i, 0)));
    acc -= targets[i] * std::log(ph) + (1.0 - targets[i]) * std::log(1.0 - ph);
  }
  (*out.v)(0, 0) = acc / n;
  if (tape) {
    Var pin = p, o = out;
    std::vector<double> t = targets;
    tape->push([pin, o, t, n]() {
      double d = (*o.g)(0, 0) / n;
      for (int i = 0; i < n; ++i) {
        double pv = (*pin.v)(i, 0);
        if (pv < kBceClampLo || pv > kBceClampHi) continue;  // clamped: no gradient
        (*pin.g)(i, 0) += d * (pv - t[i]) / (pv * (1.0 - pv));
      }
    });
  }
  return out;
}

Var mse_loss(const Var& y, const std::vector<double>& targets, Tape* tape) {
  const int n = y.rows();
  if (y.cols() != 1 || static_cast<size_t>(n) != targets.size())
    throw DataError("mse_loss: length mismatch");
  Var out = Var::make(1, 1, tape != nullptr);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double e = (*y.v)(i, 0) - targets[i];
    acc += e * e;
  }
  (*out.v)(0, 0) = acc / n;
  if (tape) {
    Var yin = y, o = out;
    std::vector<double> t = targets;
    tape->push([yin, o, t, n]() {
      double d = (*o.g)(0, 0);
      for (int i = 0; i < n; ++i)
        (*yin.g)(i, 0) += d * 2.0 * ((*yin.v)(i, 0) - t[i]) / n;
    });
  }
  return out;
}

Var scale(const Var& x, double s, Tape* tape) {
  Var out = Var::make(x.rows(), x.cols(), tape != nullptr);
  for (size_t i = 0; i < out.v->size(); ++i) out.v->a[i] = s * x.v->a[i];
  if (tape) {
    Var xin = x, o = out;
    tape->push([xin, o, s]() {
      for (size_t i = 0; i < o.g->size(); ++i) xin.g->a[i] += s * o.g->a[i];
    });
  }
  return out;
}

}  // namespace deepstd
