#pragma once

#include <optional>
#include <string>
#include <vector>

#include "deepstd/scorer.hpp"

namespace deepstd {

struct ReferenceOccurrence {
  std::string term;
  std::string utterance_id;
  TimeSpan span;
};

struct TermEntry {
  std::string term;
  bool oov = false;
};

/// Threshold-independent alignment of one term's hits against its
/// references: matched hit scores (one per reference at most) and the
/// scores of unmatched hits, which become false alarms once the decision
/// threshold drops to them.
struct TermAlignment {
  std::string term;
  int n_true = 0;
  std::vector<double> matched_scores;    // descending
  std::vector<double> unmatched_scores;  // descending
};

/// Greedy one-to-one matching in descending score order. A hit can match a
/// same-term reference iff its midpoint falls inside the reference span
/// extended by tol_s on both sides; among candidates the nearest reference
/// midpoint wins.
std::vector<TermAlignment> align_hits(const std::vector<Hit>& hits,
                                      const std::vector<ReferenceOccurrence>& refs,
                                      double tol_s = 0.5);

constexpr double kTwvBeta = 999.9;

/// Term-weighted value at threshold theta (decision: score >= theta).
/// Terms without references are skipped. t_speech_s is the searched speech
/// duration in seconds; one second is one false-alarm trial.
double twv(const std::vector<TermAlignment>& alignments, double theta, double t_speech_s,
           double beta = kTwvBeta);

struct TWVReport {
  double mtwv = 0.0;
  double theta_star = 0.0;  // highest threshold attaining the maximum
  double t_speech_s = 0.0;
  std::vector<TermAlignment> alignments;
  std::vector<TermEntry> terms;  // empty when no term list was supplied

  double atwv(double theta) const { return twv(alignments, theta, t_speech_s); }
};

/// Sweeps the decision threshold over all distinct hit scores plus {0, 1}
/// and records the maximum TWV. When a term list is given it defines the
/// term universe (terms without hits still count their misses).
TWVReport mtwv(const std::vector<Hit>& hits, const std::vector<ReferenceOccurrence>& refs,
               double t_speech_s, const std::vector<TermEntry>* terms = nullptr,
               double tol_s = 0.5);

/// Human-readable report plus a machine-readable per-term TSV block,
/// including IV/OOV breakdown rows when the term list carries tags.
std::string format_twv_report(const TWVReport& report);

}  // namespace deepstd
