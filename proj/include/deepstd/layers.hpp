#pragma once

#include <memory>
#include <string>
#include <vector>

#include "deepstd/params.hpp"
#include "deepstd/tape.hpp"

namespace deepstd {

enum class Activation { Tanh, Linear };

/// Fully connected layer, y = act(x W + b), applied row-wise to [T x in].
struct Dense {
  ParamTensor W;  // [in x out]
  ParamTensor b;  // [1 x out]
  Activation act;

  Dense(const std::string& prefix, int in, int out, Activation a)
      : W(prefix + ".W", in, out), b(prefix + ".b", 1, out), act(a) {}

  void register_params(ParamSet& ps) {
    ps.add(&W);
    ps.add(&b);
  }
  void init(std::mt19937_64& rng);

  Var forward(const Var& x, Tape* tape);
};

/// Lookup table; forward maps a list of row indices to stacked rows.
struct Embedding {
  ParamTensor table;  // [vocab x dim]

  Embedding(const std::string& name, int vocab, int dim) : table(name, vocab, dim) {}

  void register_params(ParamSet& ps) { ps.add(&table); }

  Var forward(const std::vector<int>& ids, Tape* tape);
};

/// One LSTM direction (standard non-peephole cell, gate order i,f,g,o).
/// With reverse=true the sequence is processed back to front; outputs stay
/// at their original time indices.
struct LstmDir {
  ParamTensor Wx;  // [in x 4H]
  ParamTensor Wh;  // [H x 4H]
  ParamTensor b;   // [1 x 4H]
  int in_dim, hidden;
  bool reverse;

  LstmDir(const std::string& prefix, int in, int h, bool rev)
      : Wx(prefix + ".Wx", in, 4 * h),
        Wh(prefix + ".Wh", h, 4 * h),
        b(prefix + ".b", 1, 4 * h),
        in_dim(in),
        hidden(h),
        reverse(rev) {}

  void register_params(ParamSet& ps) {
    ps.add(&Wx);
    ps.add(&Wh);
    ps.add(&b);
  }
  void init(std::mt19937_64& rng);

  Var forward(const Var& x, Tape* tape);
};

/// Bidirectional LSTM; output is [T x 2H], forward half then backward half.
struct BiLstm {
  LstmDir fw, bw;

  BiLstm(const std::string& prefix, int in, int h)
      : fw(prefix + ".fw", in, h, false), bw(prefix + ".bw", in, h, true) {}

  void register_params(ParamSet& ps) {
    fw.register_params(ps);
    bw.register_params(ps);
  }
  void init(std::mt19937_64& rng) {
    fw.init(rng);
    bw.init(rng);
  }
  int out_dim() const { return 2 * fw.hidden; }

  Var forward(const Var& x, Tape* tape);
};

/// Stack of bidirectional LSTM layers with additive skip connections,
/// y_l = BiLSTM_l(x_l) + x_l. Requires in/out dims to match (D = 2H).
struct SkipStack {
  std::vector<std::unique_ptr<BiLstm>> layers;
  int dim;

  SkipStack(const std::string& prefix, int n_layers, int d);

  void register_params(ParamSet& ps) {
    for (auto& l : layers) l->register_params(ps);
  }
  void init(std::mt19937_64& rng) {
    for (auto& l : layers) l->init(rng);
  }

  Var forward(const Var& x, Tape* tape);
};

/// Max pooling over the time axis, per feature dimension.
/// K = floor((T - pool) / stride) + 1; gradient goes to the argmax position,
/// ties broken toward the lowest time index.
struct MaxPoolTime {
  int pool, stride;

  Var forward(const Var& x, Tape* tape) const;
  int out_len(int t) const { return (t - pool) / stride + 1; }
};

// --- free-standing differentiable ops -------------------------------------

/// Column-wise concatenation of sequences with equal row counts.
Var concat_cols(const std::vector<Var>& xs, Tape* tape);

/// y = a + b (same shape).
Var add(const Var& a, const Var& b, Tape* tape);

/// Final outputs of a bidirectional layer: [y[T-1][0:H], y[0][H:2H]] as 1x2H.
Var bilstm_finals(const Var& y, int hidden, Tape* tape);

/// Mean binary cross-entropy; p is [N x 1] in [0,1], clamped to
/// [1e-7, 1-1e-7] before the logs. Returns a 1x1 Var.
Var bce_loss(const Var& p, const std::vector<double>& targets, Tape* tape);

/// Mean squared error over [N x 1] predictions. Returns a 1x1 Var.
Var mse_loss(const Var& y, const std::vector<double>& targets, Tape* tape);

/// loss_scale * loss; used to weight per-example losses within a batch.
Var scale(const Var& x, double s, Tape* tape);

}  // namespace deepstd
