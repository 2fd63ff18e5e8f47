#include "deepstd/scorer.hpp"

#include <algorithm>
#include <cmath>

#include "deepstd/kernels.hpp"

namespace deepstd {

using kernels::dot;

ScoreTrace score_segments(const Mat& p_rows, const Mat& q_rows, const Calibration& cal,
                          const std::string& utterance_id) {
  if (p_rows.cols != q_rows.cols) throw DataError("score_segments: dimension mismatch");
  if (q_rows.rows < 1) throw DataError("score_segments: no query embeddings");
  ScoreTrace trace;
  trace.utterance_id = utterance_id;
  trace.p.resize(p_rows.rows);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < p_rows.rows; ++i) {
    double best = dot(p_rows.row(i), q_rows.row(0), p_rows.cols);
    for (int k = 1; k < q_rows.rows; ++k)
      best = std::max(best, dot(p_rows.row(i), q_rows.row(k), p_rows.cols));
    trace.p[i] = kernels::sigmoid(cal.alpha * best + cal.beta);
  }
  return trace;
}

Var score_segments_var(const Var& p_rows, const Var& q_rows, ParamTensor& alpha,
                       ParamTensor& beta, Tape* tape) {
  if (p_rows.cols() != q_rows.cols()) throw DataError("score_segments: dimension mismatch");
  const int n = p_rows.rows(), k_count = q_rows.rows(), d = p_rows.cols();
  Var out = Var::make(n, 1, tape != nullptr);
  auto best_k = std::make_shared<std::vector<int>>(n);
  auto best_dot = std::make_shared<std::vector<double>>(n);
  const double a = alpha.v(0, 0), b = beta.v(0, 0);
  for (int i = 0; i < n; ++i) {
    double best = dot(p_rows.v->row(i), q_rows.v->row(0), d);
    int arg = 0;
    for (int k = 1; k < k_count; ++k) {
      double val = dot(p_rows.v->row(i), q_rows.v->row(k), d);
      if (val > best) {  // ties keep the lowest k
        best = val;
        arg = k;
      }
    }
    (*best_k)[i] = arg;
    (*best_dot)[i] = best;
    (*out.v)(i, 0) = kernels::sigmoid(a * best + b);
  }
  if (tape) {
    Var pin = p_rows, qin = q_rows, o = out;
    ParamTensor* ap = &alpha;
    ParamTensor* bp = &beta;
    tape->push([pin, qin, o, ap, bp, best_k, best_dot, a, d]() {
      const int n = o.rows();
      for (int i = 0; i < n; ++i) {
        const double pv = (*o.v)(i, 0);
        const double dz = (*o.g)(i, 0) * pv * (1.0 - pv);
        ap->g(0, 0) += dz * (*best_dot)[i];
        bp->g(0, 0) += dz;
        const int k = (*best_k)[i];
        if (pin.g) kernels::axpy(pin.g->row(i), dz * a, qin.v->row(k), d);
        if (qin.g) kernels::axpy(qin.g->row(k), dz * a, pin.v->row(i), d);
      }
    });
  }
  return out;
}

ScoreTrace smooth(const ScoreTrace& trace, int w) {
  if (w < 1 || w % 2 == 0) throw ConfigError("smoothing window must be odd and >= 1");
  ScoreTrace out;
  out.utterance_id = trace.utterance_id;
  const int n = static_cast<int>(trace.p.size());
  out.p.resize(n);
  const int half = w / 2;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += trace.p[j];
    out.p[i] = acc / (hi - lo + 1);
  }
  return out;
}

int effective_min_length(double min_len_estimate) {
  const int len = static_cast<int>(std::ceil(min_len_estimate));
  return std::max(1, len);
}

std::vector<Hit> extract_hits(const ScoreTrace& trace, double min_len_estimate,
                              const std::vector<TimeSpan>& segment_times,
                              const SearchConfig& cfg, const std::string& term,
                              const std::vector<double>* raw_scores) {
  const int n = static_cast<int>(trace.p.size());
  if (segment_times.size() != trace.p.size())
    throw DataError("extract_hits: trace length does not match the segment count");
  if (raw_scores && static_cast<int>(raw_scores->size()) != n)
    throw DataError("extract_hits: raw trace length mismatch");
  if (cfg.threshold_step <= 0.0 || cfg.threshold_step > 1.0)
    throw ConfigError("threshold_step must be in (0, 1]");

  const int min_len = effective_min_length(min_len_estimate);
  std::vector<double> p = trace.p;
  std::vector<Hit> hits;
  const int n_steps = static_cast<int>(std::ceil(1.0 / cfg.threshold_step));
  for (int si = 0; si <= n_steps; ++si) {
    const double theta = std::max(0.0, 1.0 - si * cfg.threshold_step);
    int i = 0;
    while (i < n) {
      if (!(p[i] > theta)) {
        ++i;
        continue;
      }
      int j = i;
      double acc = 0.0;
      while (j < n && p[j] > theta) acc += p[j++];
      const int run = j - i;
      if (run >= min_len) {
        Hit h;
        h.utterance_id = trace.utterance_id;
        h.term = term;
        h.first_segment = i;
        h.last_segment = j - 1;
        h.span = {segment_times[i].start_s, segment_times[j - 1].end_s};
        if (raw_scores) {
          double racc = 0.0;
          for (int t = i; t < j; ++t) racc += (*raw_scores)[t];
          h.score = racc / run;
        } else {
          h.score = acc / run;
        }
        hits.push_back(h);
        std::fill(p.begin() + i, p.begin() + j, 0.0);
      }
      i = j;
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.first_segment < b.first_segment;
  });
  return hits;
}

EncodedUtterance encode_for_search(Model& model, const ConfusionNetwork& net) {
  EncodedUtterance enc;
  enc.utterance_id = net.utterance_id;
  Var p = model.encode_document(net, nullptr);
  enc.p = std::move(*p.v);
  // quantize like the precomputed-embedding files so both search paths agree
  for (auto& x : enc.p.a) x = static_cast<double>(static_cast<float>(x));
  enc.times.reserve(net.segments.size());
  for (const auto& s : net.segments) enc.times.push_back({s.start_s, s.end_s});
  return enc;
}

std::vector<Hit> search_term(Model& model, const std::vector<EncodedUtterance>& utts,
                             const std::string& term, const SearchConfig& cfg) {
  QueryEncoding enc = model.encode_query(term, nullptr);
  const Mat& q = *enc.q.v;
  const double min_len = (*enc.min_len.v)(0, 0);
  const Calibration cal{model.alpha_value(), model.beta_value()};

  std::vector<std::vector<Hit>> per_utt(utts.size());
#pragma omp parallel for schedule(dynamic)
  for (size_t u = 0; u < utts.size(); ++u) {
    if (utts[u].p.rows == 0) continue;
    ScoreTrace raw = score_segments(utts[u].p, q, cal, utts[u].utterance_id);
    ScoreTrace smoothed = smooth(raw, cfg.smooth_w);
    per_utt[u] = extract_hits(smoothed, min_len, utts[u].times, cfg, term,
                              cfg.score_on_raw ? &raw.p : nullptr);
  }

  std::vector<Hit> hits;
  for (auto& v : per_utt)
    for (auto& h : v) hits.push_back(std::move(h));
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.utterance_id != b.utterance_id) return a.utterance_id < b.utterance_id;
    return a.span.start_s < b.span.start_s;
  });
  return hits;
}

}  // namespace deepstd
