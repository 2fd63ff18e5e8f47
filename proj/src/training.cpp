#include "deepstd/training.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <ostream>

#include "deepstd/io.hpp"

namespace deepstd {

SegmentCountStats collect_segment_stats(const std::vector<WordAlignment>& alignments) {
  std::map<std::string, std::vector<int>> counts;
  for (const auto& utt : alignments)
    for (const auto& w : utt.words)
      counts[w.word].push_back(w.last_segment - w.first_segment + 1);
  SegmentCountStats stats;
  for (auto& [word, c] : counts) {
    std::sort(c.begin(), c.end());
    const int n = static_cast<int>(c.size());
    const int rank = std::max(1, static_cast<int>(std::ceil(0.05 * n)));
    stats.vocabulary.push_back(word);
    stats.percentile5[word] = c[rank - 1];
  }
  return stats;
}

std::vector<Chunk> build_chunks(const std::vector<ConfusionNetwork>& nets,
                                const std::vector<WordAlignment>& alignments,
                                int max_segments) {
  std::unordered_map<std::string, const WordAlignment*> by_id;
  for (const auto& a : alignments) by_id[a.utterance_id] = &a;

  std::vector<Chunk> chunks;
  for (const auto& net : nets) {
    auto it = by_id.find(net.utterance_id);
    const WordAlignment* align = it == by_id.end() ? nullptr : it->second;
    int offset = 0;
    for (auto& piece : chunk(net, max_segments)) {
      if (piece.segments.empty()) continue;
      Chunk c;
      const int len = static_cast<int>(piece.segments.size());
      c.net = std::move(piece);
      if (align) {
        for (const auto& w : align->words) {
          if (w.first_segment < offset || w.last_segment >= offset + len) continue;
          AlignedWord local = w;
          local.first_segment -= offset;
          local.last_segment -= offset;
          c.words.push_back(local);
        }
      }
      offset += len;
      chunks.push_back(std::move(c));
    }
  }
  return chunks;
}

TrainingExample sample_example(const Chunk& chunk, const SegmentCountStats& stats,
                               const SamplerConfig& cfg, std::mt19937_64& rng) {
  TrainingExample ex;
  ex.chunk = &chunk;
  ex.targets.assign(chunk.net.segments.size(), 0.0);

  // P(m) = 2^-m truncated at max_words, renormalized
  double norm = 0.0;
  for (int m = 1; m <= cfg.max_words; ++m) norm += std::pow(0.5, m);
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * norm;
  int m = cfg.max_words;
  for (int cand = 1; cand <= cfg.max_words; ++cand) {
    u -= std::pow(0.5, cand);
    if (u < 0.0) {
      m = cand;
      break;
    }
  }

  struct Run {
    int first_word, last_word;
    std::string query;
  };
  std::vector<Run> eligible;
  const int n_words = static_cast<int>(chunk.words.size());
  for (int i = 0; i + m <= n_words; ++i) {
    bool ok = true;
    std::string q;
    for (int j = i; j < i + m; ++j) {
      if (!(chunk.words[j].confidence > cfg.confidence_threshold)) {
        ok = false;
        break;
      }
      q += chunk.words[j].word;  // joined without space
    }
    const int len = static_cast<int>(q.size());
    if (ok && len >= cfg.min_query_len && len <= cfg.max_query_len)
      eligible.push_back({i, i + m - 1, std::move(q)});
  }

  if (!eligible.empty()) {
    const auto& run =
        eligible[std::uniform_int_distribution<size_t>(0, eligible.size() - 1)(rng)];
    ex.query = run.query;
    for (int j = run.first_word; j <= run.last_word; ++j) {
      const auto& w = chunk.words[j];
      for (int s = w.first_segment; s <= w.last_segment; ++s) ex.targets[s] = 1.0;
      auto it = stats.percentile5.find(w.word);
      ex.minlen_target += it == stats.percentile5.end()
                              ? static_cast<double>(w.last_segment - w.first_segment + 1)
                              : it->second;
    }
    return ex;
  }

  // negative example: sample the vocabulary, preferring words absent from
  // the chunk so the all-zero target is actually correct
  ex.negative = true;
  std::unordered_set<std::string> present;
  for (const auto& w : chunk.words) present.insert(w.word);
  std::vector<const std::string*> candidates;
  for (const auto& w : stats.vocabulary) {
    const int len = static_cast<int>(w.size());
    if (len < cfg.min_query_len || len > cfg.max_query_len) continue;
    if (!present.count(w)) candidates.push_back(&w);
  }
  if (candidates.empty())
    for (const auto& w : stats.vocabulary) {
      const int len = static_cast<int>(w.size());
      if (len >= cfg.min_query_len && len <= cfg.max_query_len) candidates.push_back(&w);
    }
  if (candidates.empty()) throw DataError("sampler: vocabulary has no usable query words");
  ex.query = *candidates[std::uniform_int_distribution<size_t>(0, candidates.size() - 1)(rng)];
  return ex;
}

double total_speech_seconds(const std::vector<ConfusionNetwork>& nets) {
  double total = 0.0;
  for (const auto& n : nets)
    if (!n.segments.empty()) total += n.segments.back().end_s;
  return total;
}

TWVReport evaluate_model(Model& model, const DevSet& dev, const SearchConfig& cfg) {
  std::vector<EncodedUtterance> encoded(dev.nets.size());
#pragma omp parallel for schedule(dynamic)
  for (size_t i = 0; i < dev.nets.size(); ++i)
    encoded[i] = encode_for_search(model, dev.nets[i]);
  std::vector<Hit> hits;
  for (const auto& term : dev.terms) {
    auto term_hits = search_term(model, encoded, term.term, cfg);
    hits.insert(hits.end(), term_hits.begin(), term_hits.end());
  }
  return mtwv(hits, dev.refs, total_speech_seconds(dev.nets), &dev.terms);
}

TrainResult train(Model& model, Adam& adam, const std::vector<ConfusionNetwork>& train_nets,
                  const std::vector<WordAlignment>& train_alignments, const DevSet& dev,
                  const TrainConfig& cfg, const std::string& out_dir, std::ostream& log,
                  int start_epoch, std::mt19937_64* resume_rng) {
  if (train_nets.empty()) throw DataError("train: empty corpus");
  std::filesystem::create_directories(out_dir);

  auto chunks = build_chunks(train_nets, train_alignments, cfg.max_segments);
  if (chunks.empty()) throw DataError("train: corpus has no non-empty chunks");
  auto stats = collect_segment_stats(train_alignments);

  std::mt19937_64 rng =
      resume_rng ? *resume_rng : std::mt19937_64(derive_seed(cfg.seed, 0x5a3f9e1d));

  TrainResult result;
  for (int epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    long negatives = 0;
    for (int batch = 0; batch < cfg.batches_per_epoch; ++batch) {
      std::vector<TrainingExample> examples;
      examples.reserve(cfg.batch_size);
      int positives = 0;
      for (int e = 0; e < cfg.batch_size; ++e) {
        const size_t ci = std::uniform_int_distribution<size_t>(0, chunks.size() - 1)(rng);
        examples.push_back(sample_example(chunks[ci], stats, cfg.sampler, rng));
        positives += !examples.back().negative;
        negatives += examples.back().negative;
      }

      model.params().zero_grad();
      double batch_loss = 0.0;
      for (const auto& ex : examples) {
        Tape tape;
        Var p_doc = model.encode_document(ex.chunk->net, &tape);
        QueryEncoding q = model.encode_query(ex.query, &tape);
        Var probs = score_segments_var(p_doc, q.q, model.cal_alpha(), model.cal_beta(), &tape);
        Var bce = bce_loss(probs, ex.targets, &tape);
        (*bce.g)(0, 0) = 1.0 / cfg.batch_size;
        batch_loss += (*bce.v)(0, 0) / cfg.batch_size;
        if (!ex.negative && cfg.lambda_min > 0.0) {
          Var mse = mse_loss(q.min_len, {ex.minlen_target}, &tape);
          const double w = cfg.lambda_min / positives;
          (*mse.g)(0, 0) = w;
          batch_loss += (*mse.v)(0, 0) * w;
        }
        tape.backward();
      }
      if (!std::isfinite(batch_loss))
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + " batch " +
                           std::to_string(batch));
      adam.step(model.params());
      loss_sum += batch_loss;
      if (cfg.log_every > 0 && (batch + 1) % cfg.log_every == 0)
        log << "epoch " << epoch << " batch " << batch + 1 << "/" << cfg.batches_per_epoch
            << " loss " << batch_loss << "\n"
            << std::flush;
    }

    EpochStats es;
    es.epoch = epoch;
    es.mean_loss = loss_sum / cfg.batches_per_epoch;
    es.negative_rate = static_cast<double>(negatives) /
                       (static_cast<double>(cfg.batches_per_epoch) * cfg.batch_size);
    es.checkpoint_path = out_dir + "/checkpoint_epoch" + std::to_string(epoch) + ".bin";
    save_training_checkpoint(es.checkpoint_path, model, adam, cfg, epoch, rng);
    log << "epoch " << epoch << " done: mean loss " << es.mean_loss << ", negative rate "
        << es.negative_rate << "\n"
        << std::flush;
    result.epochs.push_back(es);
  }

  // score every stored checkpoint on the dev set, keep the best
  double best = -1e300;
  for (auto& es : result.epochs) {
    auto loaded = load_checkpoint(es.checkpoint_path);
    apply_checkpoint_params(model, loaded);
    es.dev_mtwv = evaluate_model(model, dev, cfg.search).mtwv;
    log << "checkpoint epoch " << es.epoch << " dev MTWV " << es.dev_mtwv << "\n" << std::flush;
    if (es.dev_mtwv > best) {
      best = es.dev_mtwv;
      result.selected_epoch = es.epoch;
      result.selected_path = es.checkpoint_path;
      result.selected_mtwv = es.dev_mtwv;
    }
  }
  if (!result.epochs.empty()) {
    auto loaded = load_checkpoint(result.selected_path);
    apply_checkpoint_params(model, loaded);
  }
  return result;
}

}  // namespace deepstd
