#pragma once

#include <string>
#include <vector>

#include "deepstd/confnet.hpp"
#include "deepstd/encoders.hpp"
#include "deepstd/tape.hpp"

namespace deepstd {

struct Calibration {
  double alpha = 1.0;
  double beta = 0.0;
};

/// Per-segment occurrence probabilities for one utterance.
struct ScoreTrace {
  std::string utterance_id;
  std::vector<double> p;
};

/// One putative hit of a term.
struct Hit {
  std::string utterance_id;
  std::string term;
  TimeSpan span;
  int first_segment = 0;
  int last_segment = 0;
  double score = 0.0;
};

struct SearchConfig {
  int smooth_w = 5;              // moving-average window, odd
  double threshold_step = 0.01;  // gradual-thresholding step
  bool score_on_raw = false;     // hit scores from the raw trace instead of the smoothed one
};

/// p_i = sigmoid(alpha * max_k(P_i . Q_k) + beta).
ScoreTrace score_segments(const Mat& p_rows, const Mat& q_rows, const Calibration& cal,
                          const std::string& utterance_id);

/// Differentiable version used in training.
Var score_segments_var(const Var& p_rows, const Var& q_rows, ParamTensor& alpha,
                       ParamTensor& beta, Tape* tape);

/// Centered moving average of width w (odd). At the edges the window
/// truncates to the available samples and renormalizes.
ScoreTrace smooth(const ScoreTrace& trace, int w);

/// Gradual thresholding: theta walks from 1.0 down to 0.0 in steps; every
/// maximal run of p > theta at least min_len segments long becomes a hit
/// scored by the arithmetic mean of its trace values, and its entries are
/// zeroed. raw_scores, when given, supplies the values hits are scored by
/// (detection still runs on `trace`). Hits come back sorted by descending
/// score, ties by first segment.
std::vector<Hit> extract_hits(const ScoreTrace& trace, double min_len_estimate,
                              const std::vector<TimeSpan>& segment_times,
                              const SearchConfig& cfg, const std::string& term,
                              const std::vector<double>* raw_scores = nullptr);

/// A document ready for scoring: pronunciation embeddings quantized to
/// 32-bit floats (shared with the precomputed-embedding files, so searching
/// fresh encodings and searching precomputed ones give identical hits) plus
/// the segment time table.
struct EncodedUtterance {
  std::string utterance_id;
  Mat p;  // [N x D], f32-quantized values
  std::vector<TimeSpan> times;
};

EncodedUtterance encode_for_search(Model& model, const ConfusionNetwork& net);

/// Full STD pipeline for one term over a set of encoded utterances.
/// Utterances are processed independently (in parallel when OpenMP is
/// enabled); the merged result is sorted by descending score, ties by
/// (utterance_id, start_s).
std::vector<Hit> search_term(Model& model, const std::vector<EncodedUtterance>& utts,
                             const std::string& term, const SearchConfig& cfg);

/// Effective minimum run length: ceil of the estimate, floored at 1.
int effective_min_length(double min_len_estimate);

}  // namespace deepstd
