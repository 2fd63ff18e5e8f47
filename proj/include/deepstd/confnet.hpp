#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "deepstd/common.hpp"

namespace deepstd {

/// Phoneme symbol table. Ids 0 and 1 are reserved in every alphabet:
/// PAD (padding transition, probability always 0) and EPS (transition
/// without any phoneme). Non-reserved symbols follow in declaration order,
/// so ids are stable between training and search as long as the same
/// alphabet line is used.
class PhonemeAlphabet {
 public:
  static constexpr int kPad = 0;
  static constexpr int kEps = 1;
  static constexpr const char* kEpsString = "<eps>";
  static constexpr const char* kPadString = "<pad>";

  PhonemeAlphabet() = default;
  explicit PhonemeAlphabet(const std::vector<std::string>& symbols);

  int id(const std::string& s) const;  // throws DataError on unknown symbol
  const std::string& str(int id) const;
  int size() const { return static_cast<int>(strings_.size()); }

  /// Non-reserved symbols in id order, as they appear on the #ALPHABET line.
  std::vector<std::string> symbols() const;

  bool operator==(const PhonemeAlphabet& other) const { return strings_ == other.strings_; }

 private:
  std::vector<std::string> strings_;
  std::unordered_map<std::string, int> ids_;
};

struct Transition {
  int symbol = PhonemeAlphabet::kPad;
  double prob = 0.0;
};

/// One confusion-network segment: exactly three transitions after
/// normalization (descending probability, PAD-filled), plus its time span.
struct Segment {
  std::array<Transition, 3> transitions;
  double start_s = 0.0;
  double end_s = 0.0;

  double duration_s() const { return end_s - start_s; }
};

struct TimeSpan {
  double start_s = 0.0;
  double end_s = 0.0;
};

struct ConfusionNetwork {
  std::string utterance_id;
  std::vector<Segment> segments;
};

/// A parsed confnet file: the declared alphabet plus its utterances.
struct ConfnetFile {
  PhonemeAlphabet alphabet;
  std::vector<ConfusionNetwork> utterances;
};

/// Keeps the k most probable arcs (descending probability, ties by symbol
/// id, PAD last) and pads with (PAD, 0) up to k.
std::vector<Transition> normalize_top_k(std::vector<Transition> arcs, int k = 3);

/// Builds a Segment from raw arcs; validates probabilities (values in
/// [0, 1+1e-6] clamp to 1, larger are errors) and the time span.
Segment make_segment(std::vector<Transition> arcs, double start_s, double end_s);

/// Splits into pieces of at most max_segments segments; concatenating the
/// pieces reproduces the input. Only the last piece may be shorter.
std::vector<ConfusionNetwork> chunk(const ConfusionNetwork& net, int max_segments = 256);

ConfnetFile parse_confnet(std::istream& in, const std::string& source_name);
ConfnetFile parse_confnet_file(const std::string& path);

void serialize_confnet(std::ostream& out, const ConfnetFile& file);
void serialize_confnet_file(const std::string& path, const ConfnetFile& file);

}  // namespace deepstd
