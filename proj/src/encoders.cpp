#include "deepstd/encoders.hpp"

#include <algorithm>

namespace deepstd {

GraphemeSet::GraphemeSet(std::string chars) : chars_(std::move(chars)) {
  lookup_.fill(-1);
  for (size_t i = 0; i < chars_.size(); ++i) {
    auto& slot = lookup_[static_cast<unsigned char>(chars_[i])];
    if (slot != -1) throw ConfigError("duplicate grapheme in set");
    slot = static_cast<int>(i);
  }
}

int GraphemeSet::id(char c) const { return lookup_[static_cast<unsigned char>(c)]; }

SegmentFeaturizer::SegmentFeaturizer(const ModelConfig& cfg, int phoneme_count)
    : phone_emb("feat.phone_emb", phoneme_count, cfg.phone_emb_dim),
      dur1("feat.dur1", 1, cfg.mlp_hidden, Activation::Tanh),
      dur2("feat.dur2", cfg.mlp_hidden, cfg.mlp_hidden, Activation::Tanh),
      prob1("feat.prob1", 3, cfg.mlp_hidden, Activation::Tanh),
      prob2("feat.prob2", cfg.mlp_hidden, cfg.mlp_hidden, Activation::Tanh),
      duration_scale(cfg.duration_scale) {}

void SegmentFeaturizer::register_params(ParamSet& ps) {
  phone_emb.register_params(ps);
  dur1.register_params(ps);
  dur2.register_params(ps);
  prob1.register_params(ps);
  prob2.register_params(ps);
}

void SegmentFeaturizer::init(std::mt19937_64& rng) {
  phone_emb.table.init_uniform(rng, -0.05, 0.05);
  dur1.init(rng);
  dur2.init(rng);
  prob1.init(rng);
  prob2.init(rng);
}

Var SegmentFeaturizer::forward(const ConfusionNetwork& net, Tape* tape) {
  const int n = static_cast<int>(net.segments.size());
  if (n < 1) throw DataError("featurizer: empty confusion network " + net.utterance_id);

  Mat durations(n, 1);
  Mat probs(n, 3);
  std::vector<int> sym0(n), sym1(n), sym2(n);
  for (int i = 0; i < n; ++i) {
    const Segment& s = net.segments[i];
    durations(i, 0) = s.duration_s() * duration_scale;
    for (int a = 0; a < 3; ++a) probs(i, a) = s.transitions[a].prob;
    sym0[i] = s.transitions[0].symbol;
    sym1[i] = s.transitions[1].symbol;
    sym2[i] = s.transitions[2].symbol;
  }

  Var dur_in = Var::wrap(std::move(durations), false);
  Var prob_in = Var::wrap(std::move(probs), false);
  Var d = dur2.forward(dur1.forward(dur_in, tape), tape);
  Var p = prob2.forward(prob1.forward(prob_in, tape), tape);
  Var e0 = phone_emb.forward(sym0, tape);
  Var e1 = phone_emb.forward(sym1, tape);
  Var e2 = phone_emb.forward(sym2, tape);
  return concat_cols({d, p, e0, e1, e2}, tape);
}

Model::Model(const ModelConfig& cfg, PhonemeAlphabet phonemes, GraphemeSet graphemes,
             uint64_t init_seed)
    : cfg_(cfg),
      phonemes_(std::move(phonemes)),
      graphemes_(std::move(graphemes)),
      featurizer_(cfg, phonemes_.size()),
      doc_stack_("doc", cfg.stack_layers, cfg.dim()),
      graph_emb_("qry.graph_emb", graphemes_.size() + 1, cfg.dim()),
      query_stack_("qry", cfg.stack_layers, cfg.dim()),
      pool_{cfg.pool, cfg.stride},
      minlen_rnn_("minlen.rnn", cfg.dim(), cfg.minlen_hidden),
      minlen_out_("minlen.out", 2 * cfg.minlen_hidden, 1, Activation::Linear),
      cal_alpha_("cal.alpha", 1, 1),
      cal_beta_("cal.beta", 1, 1) {
  if (cfg.pool > cfg.max_query_len)
    throw ConfigError("pool size exceeds the maximum query length");
  featurizer_.register_params(params_);
  doc_stack_.register_params(params_);
  graph_emb_.register_params(params_);
  query_stack_.register_params(params_);
  minlen_rnn_.register_params(params_);
  minlen_out_.register_params(params_);
  params_.add(&cal_alpha_);
  params_.add(&cal_beta_);

  std::mt19937_64 rng(init_seed);
  featurizer_.init(rng);
  doc_stack_.init(rng);
  graph_emb_.table.init_uniform(rng, -0.05, 0.05);
  query_stack_.init(rng);
  minlen_rnn_.init(rng);
  minlen_out_.init(rng);
  cal_alpha_.v(0, 0) = 1.0;
  cal_beta_.v(0, 0) = 0.0;
}

Var Model::encode_document(const ConfusionNetwork& net, Tape* tape) {
  Var feats = featurizer_.forward(net, tape);
  return doc_stack_.forward(feats, tape);
}

std::vector<int> Model::query_ids(const std::string& term) const {
  const int len = static_cast<int>(term.size());
  if (len < cfg_.min_query_len || len > cfg_.max_query_len)
    throw DataError("query '" + term + "' has length " + std::to_string(len) +
                    ", allowed range is " + std::to_string(cfg_.min_query_len) + ".." +
                    std::to_string(cfg_.max_query_len));
  std::vector<int> ids(static_cast<size_t>(cfg_.max_query_len), graphemes_.pad_id());
  for (int i = 0; i < len; ++i) {
    const int id = graphemes_.id(term[i]);
    if (id < 0)
      throw DataError("query '" + term + "' contains unknown grapheme '" +
                      std::string(1, term[i]) + "'");
    ids[i] = id;
  }
  return ids;
}

QueryEncoding Model::encode_query(const std::string& term, Tape* tape) {
  const auto ids = query_ids(term);
  Var g = graph_emb_.forward(ids, tape);
  Var stacked = query_stack_.forward(g, tape);
  Var q = pool_.forward(stacked, tape);
  Var rnn = minlen_rnn_.forward(g, tape);
  Var finals = bilstm_finals(rnn, cfg_.minlen_hidden, tape);
  Var min_len = minlen_out_.forward(finals, tape);
  return {q, min_len, g};
}

}  // namespace deepstd
