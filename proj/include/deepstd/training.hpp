#pragma once

#include <iosfwd>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "deepstd/eval.hpp"
#include "deepstd/scorer.hpp"

namespace deepstd {

struct AlignedWord {
  std::string word;
  double confidence = 0.0;
  int first_segment = 0;
  int last_segment = 0;
};

/// Word-level recognizer hypothesis aligned to confusion-network segments.
struct WordAlignment {
  std::string utterance_id;
  std::vector<AlignedWord> words;
};

struct SamplerConfig {
  double confidence_threshold = 0.95;
  int max_words = 4;  // P(m) = 2^-m for m = 1..max_words, renormalized
  int min_query_len = 5;
  int max_query_len = 16;
};

/// Per-word 5th percentile (nearest rank) of observed segment counts.
struct SegmentCountStats {
  std::vector<std::string> vocabulary;  // sorted, unique
  std::unordered_map<std::string, int> percentile5;
};

SegmentCountStats collect_segment_stats(const std::vector<WordAlignment>& alignments);

/// A training chunk: at most max_segments consecutive segments of one
/// utterance plus the hypothesis words lying entirely inside it,
/// re-indexed to chunk-local segment positions.
struct Chunk {
  ConfusionNetwork net;
  std::vector<AlignedWord> words;
};

std::vector<Chunk> build_chunks(const std::vector<ConfusionNetwork>& nets,
                                const std::vector<WordAlignment>& alignments,
                                int max_segments);

struct TrainingExample {
  const Chunk* chunk = nullptr;
  std::string query;
  std::vector<double> targets;  // one {0,1} per chunk segment
  double minlen_target = 0.0;
  bool negative = false;
};

/// Draws a query from the chunk's confident word runs; when none qualifies,
/// falls back to a random vocabulary word as a negative example (preferring
/// words that do not occur in the chunk).
TrainingExample sample_example(const Chunk& chunk, const SegmentCountStats& stats,
                               const SamplerConfig& cfg, std::mt19937_64& rng);

struct TrainConfig {
  uint64_t seed = 1;
  int epochs = 8;
  int batches_per_epoch = 500;
  int batch_size = 16;
  double lr = 1e-3;
  double lambda_min = 1.0;
  int max_segments = 256;
  SamplerConfig sampler;
  SearchConfig search;  // used for the per-checkpoint dev evaluation
  int log_every = 50;
};

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double negative_rate = 0.0;
  std::string checkpoint_path;
  double dev_mtwv = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> epochs;
  int selected_epoch = 0;
  std::string selected_path;
  double selected_mtwv = 0.0;
};

struct DevSet {
  std::vector<ConfusionNetwork> nets;
  std::vector<TermEntry> terms;
  std::vector<ReferenceOccurrence> refs;
};

/// Runs the self-supervised training loop: per batch, mean BCE over the
/// per-segment probabilities plus lambda_min times the masked min-length
/// MSE (positives only), optimized with ADAM. One checkpoint per epoch;
/// afterwards every checkpoint is scored by dev MTWV and the best one
/// (earliest epoch on ties) is reloaded into the model and reported.
TrainResult train(Model& model, Adam& adam, const std::vector<ConfusionNetwork>& train_nets,
                  const std::vector<WordAlignment>& train_alignments, const DevSet& dev,
                  const TrainConfig& cfg, const std::string& out_dir, std::ostream& log,
                  int start_epoch = 0, std::mt19937_64* resume_rng = nullptr);

/// Dev-set MTWV of the model's current weights.
TWVReport evaluate_model(Model& model, const DevSet& dev, const SearchConfig& cfg);

double total_speech_seconds(const std::vector<ConfusionNetwork>& nets);

}  // namespace deepstd
