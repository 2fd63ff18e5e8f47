#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "deepstd/training.hpp"

namespace deepstd {

// --- checkpoints -----------------------------------------------------------
// Binary layout (little-endian), see docs/formats.md:
//   magic "DSTDCKP1", u32 version, u64 meta length + meta text,
//   u32 record count, records (u32 name length, name, u32 rows, u32 cols,
//   row-major f64 data), u64 FNV-1a checksum of everything before it.
// Records hold the model parameters in registration order followed by the
// ADAM moments as "adam.m:<name>" / "adam.v:<name>".

struct LoadedCheckpoint {
  std::map<std::string, std::string> meta;
  std::vector<std::pair<std::string, Mat>> records;

  const Mat* find(const std::string& name) const;
  const std::string& meta_at(const std::string& key) const;
};

void save_checkpoint(const std::string& path, const ParamSet& params,
                     const std::map<std::string, std::string>& meta, const Adam* adam);

LoadedCheckpoint load_checkpoint(const std::string& path);

/// Metadata snapshot + save for the training loop.
void save_training_checkpoint(const std::string& path, Model& model, const Adam& adam,
                              const TrainConfig& cfg, int epoch, const std::mt19937_64& rng);

/// Rebuilds a model (architecture + alphabets + weights) from a checkpoint.
Model model_from_checkpoint(const LoadedCheckpoint& ckpt);

/// Copies parameter records into an existing, compatible model.
void apply_checkpoint_params(Model& model, const LoadedCheckpoint& ckpt);

Adam adam_from_checkpoint(const LoadedCheckpoint& ckpt, const ParamSet& params);
std::mt19937_64 sampler_rng_from_checkpoint(const LoadedCheckpoint& ckpt);

// --- precomputed embeddings --------------------------------------------------
// Binary layout: magic "DSTDEMB1", u32 version, u32 dim, u32 utterance
// count, per utterance (u32 id length, id, u32 segment count, f32 rows,
// f64 start/end seconds per segment), u64 FNV-1a checksum.

void save_embeddings(const std::string& path, const std::vector<EncodedUtterance>& utts,
                     int dim);
std::vector<EncodedUtterance> load_embeddings(const std::string& path);

// --- TSV files ---------------------------------------------------------------

void save_alignments(const std::string& path, const std::vector<WordAlignment>& alignments);
std::vector<WordAlignment> load_alignments(const std::string& path);

void save_references(const std::string& path, const std::vector<ReferenceOccurrence>& refs);
std::vector<ReferenceOccurrence> load_references(const std::string& path);

void save_terms(const std::string& path, const std::vector<TermEntry>& terms);
std::vector<TermEntry> load_terms(const std::string& path);

/// Hits TSV: term, utterance, start_s, duration_s, score with 6-decimal
/// fixed formatting, in the order produced by the search. `notes` lines are
/// written as comments (per-term error rows).
void save_hits(const std::string& path, const std::vector<Hit>& hits,
               const std::vector<std::string>& notes = {});
std::vector<Hit> load_hits(const std::string& path);

// --- config files -------------------------------------------------------------

/// Line-oriented `key = value` text; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);
std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path);

}  // namespace deepstd
