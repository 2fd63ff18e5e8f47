#include "deepstd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace deepstd {

namespace {

double midpoint(const TimeSpan& s) { return 0.5 * (s.start_s + s.end_s); }

struct Sweep {
  double best = 0.0;
  double theta = 1.0;
};

// Highest threshold attaining the maximum TWV over the candidate set.
Sweep sweep_thresholds(const std::vector<TermAlignment>& alignments, double t_speech_s) {
  std::set<double, std::greater<double>> candidates{0.0, 1.0};
  for (const auto& a : alignments) {
    for (double s : a.matched_scores) candidates.insert(s);
    for (double s : a.unmatched_scores) candidates.insert(s);
  }
  Sweep out;
  out.best = -1e300;
  for (double theta : candidates) {
    const double v = twv(alignments, theta, t_speech_s);
    if (v > out.best) {
      out.best = v;
      out.theta = theta;
    }
  }
  return out;
}

}  // namespace

std::vector<TermAlignment> align_hits(const std::vector<Hit>& hits,
                                      const std::vector<ReferenceOccurrence>& refs,
                                      double tol_s) {
  struct RefSlot {
    const ReferenceOccurrence* ref;
    bool matched = false;
  };
  std::map<std::string, std::vector<RefSlot>> refs_by_term;
  for (const auto& r : refs) refs_by_term[r.term].push_back({&r, false});

  std::map<std::string, std::vector<const Hit*>> hits_by_term;
  for (const auto& h : hits) hits_by_term[h.term].push_back(&h);

  std::vector<TermAlignment> out;
  std::set<std::string> all_terms;
  for (const auto& [t, _] : refs_by_term) all_terms.insert(t);
  for (const auto& [t, _] : hits_by_term) all_terms.insert(t);

  for (const auto& term : all_terms) {
    TermAlignment a;
    a.term = term;
    auto rit = refs_by_term.find(term);
    a.n_true = rit == refs_by_term.end() ? 0 : static_cast<int>(rit->second.size());

    auto hit_list = hits_by_term.count(term) ? hits_by_term[term] : std::vector<const Hit*>{};
    std::stable_sort(hit_list.begin(), hit_list.end(),
                     [](const Hit* x, const Hit* y) { return x->score > y->score; });
    for (const Hit* h : hit_list) {
      int best = -1;
      double best_dist = 0.0;
      if (rit != refs_by_term.end()) {
        const double mid = midpoint(h->span);
        for (size_t i = 0; i < rit->second.size(); ++i) {
          auto& slot = rit->second[i];
          if (slot.matched || slot.ref->utterance_id != h->utterance_id) continue;
          if (mid < slot.ref->span.start_s - tol_s || mid > slot.ref->span.end_s + tol_s)
            continue;
          const double dist = std::fabs(mid - midpoint(slot.ref->span));
          if (best < 0 || dist < best_dist) {
            best = static_cast<int>(i);
            best_dist = dist;
          }
        }
      }
      if (best >= 0) {
        rit->second[best].matched = true;
        a.matched_scores.push_back(h->score);
      } else {
        a.unmatched_scores.push_back(h->score);
      }
    }
    std::sort(a.matched_scores.rbegin(), a.matched_scores.rend());
    std::sort(a.unmatched_scores.rbegin(), a.unmatched_scores.rend());
    out.push_back(std::move(a));
  }
  return out;
}

double twv(const std::vector<TermAlignment>& alignments, double theta, double t_speech_s,
           double beta) {
  double acc = 0.0;
  int n_terms = 0;
  for (const auto& a : alignments) {
    if (a.n_true == 0) continue;  // false-alarm-only terms are reported, not averaged
    const double trials = t_speech_s - a.n_true;
    if (trials <= 0.0)
      throw DataError("speech duration too small for term '" + a.term + "'");
    int tp = 0, fa = 0;
    for (double s : a.matched_scores) tp += s >= theta;
    for (double s : a.unmatched_scores) fa += s >= theta;
    const double p_miss = 1.0 - static_cast<double>(tp) / a.n_true;
    const double p_fa = static_cast<double>(fa) / trials;
    acc += p_miss + beta * p_fa;
    ++n_terms;
  }
  if (n_terms == 0) return 0.0;
  return 1.0 - acc / n_terms;
}

TWVReport mtwv(const std::vector<Hit>& hits, const std::vector<ReferenceOccurrence>& refs,
               double t_speech_s, const std::vector<TermEntry>* terms, double tol_s) {
  TWVReport report;
  report.t_speech_s = t_speech_s;
  report.alignments = align_hits(hits, refs, tol_s);
  if (terms) {
    report.terms = *terms;
    for (const auto& t : *terms) {
      bool present = false;
      for (const auto& a : report.alignments) present |= a.term == t.term;
      if (!present) report.alignments.push_back({t.term, 0, {}, {}});
    }
    std::sort(report.alignments.begin(), report.alignments.end(),
              [](const TermAlignment& a, const TermAlignment& b) { return a.term < b.term; });
  }
  const Sweep s = sweep_thresholds(report.alignments, t_speech_s);
  report.mtwv = s.best;
  report.theta_star = s.theta;
  return report;
}

std::string format_twv_report(const TWVReport& report) {
  std::string out;
  char buf[256];
  std::map<std::string, std::string> tags;
  bool have_tags = false;
  for (const auto& t : report.terms) {
    tags[t.term] = t.oov ? "OOV" : "IV";
    have_tags = true;
  }

  out += "#term\ttag\tn_true\ttp\tmiss\tfa\tp_miss\tp_fa\n";
  for (const auto& a : report.alignments) {
    int tp = 0, fa = 0;
    for (double s : a.matched_scores) tp += s >= report.theta_star;
    for (double s : a.unmatched_scores) fa += s >= report.theta_star;
    const double p_miss = a.n_true ? 1.0 - static_cast<double>(tp) / a.n_true : 0.0;
    const double trials = report.t_speech_s - a.n_true;
    const double p_fa = trials > 0 ? fa / trials : 0.0;
    std::snprintf(buf, sizeof buf, "%s\t%s\t%d\t%d\t%d\t%d\t%.6f\t%.6f\n", a.term.c_str(),
                  have_tags && tags.count(a.term) ? tags[a.term].c_str() : "-", a.n_true, tp,
                  a.n_true - tp, fa, p_miss, p_fa);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "mtwv\t%.6f\ntheta_star\t%.6f\nt_speech_s\t%.3f\n",
                report.mtwv, report.theta_star, report.t_speech_s);
  out += buf;

  if (have_tags) {
    for (const bool oov : {false, true}) {
      std::vector<TermAlignment> group;
      for (const auto& a : report.alignments) {
        auto it = tags.find(a.term);
        if (it != tags.end() && (it->second == "OOV") == oov) group.push_back(a);
      }
      const char* name = oov ? "oov" : "iv";
      if (group.empty()) continue;
      const double at_star = twv(group, report.theta_star, report.t_speech_s);
      const Sweep s = sweep_thresholds(group, report.t_speech_s);
      std::snprintf(buf, sizeof buf, "%s_atwv\t%.6f\n%s_mtwv\t%.6f\n", name, at_star, name,
                    s.best);
      out += buf;
    }
  }
  return out;
}

}  // namespace deepstd
