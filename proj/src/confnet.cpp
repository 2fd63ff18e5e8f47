#include "deepstd/confnet.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace deepstd {

namespace {

constexpr double kProbTol = 1e-6;
constexpr double kTimeTol = 1e-6;

double parse_number(const std::string& tok, const std::string& where, int line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw DataError(where + ":" + std::to_string(line_no) + ": bad number '" + tok + "'");
  return value;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

void check_network(const ConfusionNetwork& net, const std::string& where, int line_no) {
  for (size_t i = 1; i < net.segments.size(); ++i) {
    if (net.segments[i - 1].end_s > net.segments[i].start_s + kTimeTol)
      throw DataError(where + ":" + std::to_string(line_no) + ": overlapping segments in " +
                      net.utterance_id);
  }
}

}  // namespace

PhonemeAlphabet::PhonemeAlphabet(const std::vector<std::string>& symbols) {
  strings_ = {kPadString, kEpsString};
  for (const auto& s : symbols) {
    if (s == kEpsString) continue;  // reserved, position fixed
    if (s == kPadString) throw DataError("alphabet declares the reserved padding symbol");
    strings_.push_back(s);
  }
  for (size_t i = 0; i < strings_.size(); ++i) {
    if (!ids_.emplace(strings_[i], static_cast<int>(i)).second)
      throw DataError("duplicate phoneme symbol '" + strings_[i] + "'");
  }
}

int PhonemeAlphabet::id(const std::string& s) const {
  auto it = ids_.find(s);
  if (it == ids_.end()) throw DataError("unknown phoneme symbol '" + s + "'");
  return it->second;
}

const std::string& PhonemeAlphabet::str(int id) const {
  if (id < 0 || id >= size()) throw DataError("phoneme id out of range");
  return strings_[id];
}

std::vector<std::string> PhonemeAlphabet::symbols() const {
  return {strings_.begin() + 2, strings_.end()};
}

std::vector<Transition> normalize_top_k(std::vector<Transition> arcs, int k) {
  if (k < 1) throw ConfigError("normalize_top_k: k must be >= 1");
  std::sort(arcs.begin(), arcs.end(), [](const Transition& a, const Transition& b) {
    const bool pa = a.symbol == PhonemeAlphabet::kPad;
    const bool pb = b.symbol == PhonemeAlphabet::kPad;
    if (pa != pb) return pb;  // PAD entries last
    if (a.prob != b.prob) return a.prob > b.prob;
    return a.symbol < b.symbol;
  });
  arcs.resize(static_cast<size_t>(k), Transition{PhonemeAlphabet::kPad, 0.0});
  return arcs;
}

Segment make_segment(std::vector<Transition> arcs, double start_s, double end_s) {
  if (start_s < 0.0) throw DataError("segment start time is negative");
  if (end_s < start_s) throw DataError("segment end time precedes start time");
  double sum = 0.0;
  for (auto& a : arcs) {
    if (a.prob < 0.0 || a.prob > 1.0 + kProbTol)
      throw DataError("transition probability out of range: " + std::to_string(a.prob));
    a.prob = std::min(a.prob, 1.0);
    if (a.symbol == PhonemeAlphabet::kPad && a.prob != 0.0)
      throw DataError("padding transition with nonzero probability");
  }
  auto top = normalize_top_k(std::move(arcs), 3);
  for (const auto& a : top)
    if (a.symbol != PhonemeAlphabet::kPad) sum += a.prob;
  if (sum > 1.0 + kProbTol)
    throw DataError("transition probabilities sum to " + std::to_string(sum));
  Segment seg;
  std::copy_n(top.begin(), 3, seg.transitions.begin());
  seg.start_s = start_s;
  seg.end_s = end_s;
  return seg;
}

std::vector<ConfusionNetwork> chunk(const ConfusionNetwork& net, int max_segments) {
  if (max_segments < 1) throw ConfigError("chunk: max_segments must be >= 1");
  std::vector<ConfusionNetwork> out;
  for (size_t off = 0; off < net.segments.size(); off += max_segments) {
    ConfusionNetwork piece;
    piece.utterance_id = net.utterance_id;
    const size_t end = std::min(net.segments.size(), off + max_segments);
    piece.segments.assign(net.segments.begin() + off, net.segments.begin() + end);
    out.push_back(std::move(piece));
  }
  if (out.empty()) out.push_back({net.utterance_id, {}});
  return out;
}

ConfnetFile parse_confnet(std::istream& in, const std::string& source_name) {
  ConfnetFile file;
  std::string line;
  int line_no = 0;
  bool have_alphabet = false;
  bool in_utt = false;

  auto finish_utt = [&]() {
    if (!in_utt) return;
    check_network(file.utterances.back(), source_name, line_no);
    in_utt = false;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      finish_utt();
      continue;
    }
    auto toks = split_ws(line);
    if (toks[0] == "#ALPHABET") {
      if (have_alphabet)
        throw DataError(source_name + ":" + std::to_string(line_no) + ": duplicate #ALPHABET");
      file.alphabet = PhonemeAlphabet({toks.begin() + 1, toks.end()});
      have_alphabet = true;
      continue;
    }
    if (!have_alphabet)
      throw DataError(source_name + ":" + std::to_string(line_no) +
                      ": #ALPHABET must appear before any data");
    if (toks[0] == "#UTT") {
      if (toks.size() != 2)
        throw DataError(source_name + ":" + std::to_string(line_no) + ": malformed #UTT line");
      finish_utt();
      for (const auto& u : file.utterances)
        if (u.utterance_id == toks[1])
          throw DataError(source_name + ":" + std::to_string(line_no) + ": duplicate utterance '" +
                          toks[1] + "'");
      file.utterances.push_back({toks[1], {}});
      in_utt = true;
      continue;
    }
    if (!in_utt)
      throw DataError(source_name + ":" + std::to_string(line_no) +
                      ": segment line outside an utterance");
    if (toks.size() < 2)
      throw DataError(source_name + ":" + std::to_string(line_no) + ": malformed segment line");
    const double start = parse_number(toks[0], source_name, line_no);
    const double end = parse_number(toks[1], source_name, line_no);
    std::vector<Transition> arcs;
    for (size_t i = 2; i < toks.size(); ++i) {
      const auto colon = toks[i].rfind(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == toks[i].size())
        throw DataError(source_name + ":" + std::to_string(line_no) + ": malformed arc '" +
                        toks[i] + "'");
      Transition t;
      try {
        t.symbol = file.alphabet.id(toks[i].substr(0, colon));
      } catch (const DataError& e) {
        throw DataError(source_name + ":" + std::to_string(line_no) + ": " + e.what());
      }
      t.prob = parse_number(toks[i].substr(colon + 1), source_name, line_no);
      arcs.push_back(t);
    }
    auto& utt = file.utterances.back();
    Segment seg;
    try {
      seg = make_segment(std::move(arcs), start, end);
    } catch (const DataError& e) {
      throw DataError(source_name + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!utt.segments.empty() && utt.segments.back().start_s > seg.start_s + kTimeTol)
      throw DataError(source_name + ":" + std::to_string(line_no) +
                      ": segment start times must be non-decreasing");
    utt.segments.push_back(seg);
  }
  finish_utt();
  if (!have_alphabet) throw DataError(source_name + ": missing #ALPHABET header");
  return file;
}

ConfnetFile parse_confnet_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open confnet file: " + path);
  return parse_confnet(in, path);
}

void serialize_confnet(std::ostream& out, const ConfnetFile& file) {
  out << "#ALPHABET " << PhonemeAlphabet::kEpsString;
  for (const auto& s : file.alphabet.symbols()) out << ' ' << s;
  out << '\n';
  char buf[64];
  for (const auto& utt : file.utterances) {
    out << "#UTT " << utt.utterance_id << '\n';
    for (const auto& seg : utt.segments) {
      std::snprintf(buf, sizeof buf, "%.6f %.6f", seg.start_s, seg.end_s);
      out << buf;
      for (const auto& t : seg.transitions) {
        if (t.symbol == PhonemeAlphabet::kPad) continue;
        std::snprintf(buf, sizeof buf, " %s:%.6f", file.alphabet.str(t.symbol).c_str(), t.prob);
        out << buf;
      }
      out << '\n';
    }
    out << '\n';
  }
}

void serialize_confnet_file(const std::string& path, const ConfnetFile& file) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write confnet file: " + path);
  serialize_confnet(out, file);
}

}  // namespace deepstd
