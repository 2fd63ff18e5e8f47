#pragma once

#include <memory>
#include <string>
#include <vector>

#include "deepstd/confnet.hpp"
#include "deepstd/layers.hpp"
#include "deepstd/optim.hpp"

namespace deepstd {

/// The characters queries may be written in. PAD gets the id one past the
/// last real grapheme.
class GraphemeSet {
 public:
  GraphemeSet() = default;
  explicit GraphemeSet(std::string chars);

  int id(char c) const;  // -1 when unknown
  int size() const { return static_cast<int>(chars_.size()); }
  int pad_id() const { return size(); }
  const std::string& chars() const { return chars_; }
  bool operator==(const GraphemeSet& o) const { return chars_ == o.chars_; }

 private:
  std::string chars_;
  std::array<int, 256> lookup_{};
};

/// Architecture knobs. Defaults are the production configuration
/// (300-dimensional embeddings from 15+15+3x90 features, six skip-connected
/// bi-LSTM layers); tests shrink them for fast gradient checks.
struct ModelConfig {
  int phone_emb_dim = 90;
  int mlp_hidden = 15;
  int stack_layers = 6;
  int minlen_hidden = 20;
  int max_query_len = 16;   // M
  int min_query_len = 5;
  int pool = 8;
  int stride = 4;
  double duration_scale = 1.0;  // scale applied to the raw duration feature

  int dim() const { return 2 * mlp_hidden + 3 * phone_emb_dim; }
  int k_outputs() const { return (max_query_len - pool) / stride + 1; }
};

/// Per-segment feature extraction: duration MLP (1->h->h, tanh), transition
/// probability MLP (3->h->h, tanh) and one shared phoneme embedding applied
/// to the three transition symbols; outputs are concatenated in that order.
struct SegmentFeaturizer {
  Embedding phone_emb;
  Dense dur1, dur2, prob1, prob2;
  double duration_scale;

  SegmentFeaturizer(const ModelConfig& cfg, int phoneme_count);
  void register_params(ParamSet& ps);
  void init(std::mt19937_64& rng);

  Var forward(const ConfusionNetwork& net, Tape* tape);
};

/// Query pipeline outputs: pooled embeddings Q [K x D], the minimum-length
/// estimate (1x1), and the input grapheme embeddings G the estimate is
/// computed from.
struct QueryEncoding {
  Var q;
  Var min_len;
  Var graphemes;
};

/// The full trainable model: both processing pipelines plus the calibration
/// parameters of the per-segment scoring.
class Model {
 public:
  Model(const ModelConfig& cfg, PhonemeAlphabet phonemes, GraphemeSet graphemes,
        uint64_t init_seed);

  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }
  const ModelConfig& config() const { return cfg_; }
  const PhonemeAlphabet& phonemes() const { return phonemes_; }
  const GraphemeSet& graphemes() const { return graphemes_; }

  /// Segments -> pronunciation embeddings P, one row per segment.
  /// Independent of any query.
  Var encode_document(const ConfusionNetwork& net, Tape* tape);

  /// Grapheme string -> (Q, L_min, G). Validates length bounds and the
  /// grapheme set; the query is right-padded with PAD to max_query_len.
  QueryEncoding encode_query(const std::string& term, Tape* tape);

  /// Query validation + padding only.
  std::vector<int> query_ids(const std::string& term) const;

  double alpha_value() const { return cal_alpha_.v(0, 0); }
  double beta_value() const { return cal_beta_.v(0, 0); }
  ParamTensor& cal_alpha() { return cal_alpha_; }
  ParamTensor& cal_beta() { return cal_beta_; }

 private:
  ModelConfig cfg_;
  PhonemeAlphabet phonemes_;
  GraphemeSet graphemes_;

  SegmentFeaturizer featurizer_;
  SkipStack doc_stack_;
  Embedding graph_emb_;
  SkipStack query_stack_;
  MaxPoolTime pool_;
  BiLstm minlen_rnn_;
  Dense minlen_out_;
  ParamTensor cal_alpha_, cal_beta_;

  ParamSet params_;
};

}  // namespace deepstd
