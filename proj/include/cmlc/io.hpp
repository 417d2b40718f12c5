#pragma once

// Text interchange: measure files (counting / Moebius / capacity forms),
// label-distribution files, and loss-specification strings.
//
// Measure file grammar (line oriented, '#' comments and blank lines
// ignored):
//   format=1                      optional, must be 1 if present
//   K=<int>                       required before any body line
//   counting: v0 v1 ... vK        exactly one body form per file
//   subset <labels> mass <real>   labels comma-separated, 1-based
//   capacity <mask-hex> <real>    unlisted subsets default to 0
//
// Distribution file grammar:
//   format=1                      optional
//   K=<int>
//   <y_1> ... <y_K> <prob>        unlisted labelings have mass 0

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "cmlc/bayes.hpp"
#include "cmlc/common.hpp"
#include "cmlc/dataset.hpp"
#include "cmlc/loss.hpp"
#include "cmlc/measure.hpp"

namespace cmlc {

using MeasureFile =
    std::variant<Capacity, MoebiusRepresentation, CountingProfile>;

namespace detail {

inline std::vector<std::string> split_whitespace(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

inline Mask parse_subset_mask(const std::string& text, int label_count,
                              const std::string& path, int line) {
  Mask mask = 0;
  for (const auto& field : split(text, ',')) {
    const std::string t = trim(field);
    int label = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), label);
    if (ec != std::errc{} || ptr != t.data() + t.size() || label < 1 ||
        label > label_count)
      throw ParseError(path, line, "bad label '" + t + "'");
    mask |= Mask{1} << (label - 1);
  }
  if (mask == 0) throw ParseError(path, line, "empty subset");
  return mask;
}

inline Mask parse_hex_mask(std::string text, const std::string& path,
                           int line) {
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X'))
    text = text.substr(2);
  std::uint32_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value, 16);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ParseError(path, line, "bad subset mask '" + text + "'");
  return value;
}

inline std::string hex_mask(Mask m) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%x", m);
  return buf;
}

// Header lines shared by the measure and distribution readers. Returns
// true when the line was consumed as a header.
struct TextHeader {
  int format = 1;
  int label_count = 0;
};

inline bool consume_header_line(const std::string& text, TextHeader& header,
                                const std::string& path, int line) {
  if (text.rfind("format=", 0) == 0) {
    header.format = static_cast<int>(parse_double(text.substr(7), path, line));
    if (header.format != 1)
      throw ParseError(path, line,
                       "unsupported format " + std::to_string(header.format));
    return true;
  }
  if (text.rfind("K=", 0) == 0) {
    if (header.label_count != 0)
      throw ParseError(path, line, "duplicate K= line");
    const double k = parse_double(text.substr(2), path, line);
    if (k < 1 || k != static_cast<int>(k))
      throw ParseError(path, line, "K must be a positive integer");
    header.label_count = static_cast<int>(k);
    return true;
  }
  return false;
}

}  // namespace detail

// Parses one measure file; the three body forms must not be mixed. The
// returned object is structurally sound but not validated against the
// measure axioms -- run validate_capacity (or capacity_of) for that.
inline MeasureFile read_measure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");

  detail::TextHeader header;
  enum class Form { None, Counting, Moebius, Cap } form = Form::None;
  std::vector<double> counting;
  std::map<Mask, double> moebius;
  std::vector<double> capacity;
  int counting_line = 0;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (detail::consume_header_line(text, header, path, line_no)) continue;
    if (header.label_count == 0)
      throw ParseError(path, line_no, "K=<int> must precede the measure body");

    const int K = header.label_count;
    if (text.rfind("counting:", 0) == 0) {
      if (form != Form::None)
        throw ParseError(path, line_no, "mixed measure forms");
      form = Form::Counting;
      counting_line = line_no;
      for (const auto& tok : detail::split_whitespace(text.substr(9)))
        counting.push_back(detail::parse_double(tok, path, line_no));
      if (counting.size() != static_cast<std::size_t>(K) + 1)
        throw ParseError(path, line_no,
                         "counting form needs K+1 values, got " +
                             std::to_string(counting.size()));
      continue;
    }
    const auto tokens = detail::split_whitespace(text);
    if (tokens.size() == 4 && tokens[0] == "subset" && tokens[2] == "mass") {
      if (form == Form::Counting || form == Form::Cap)
        throw ParseError(path, line_no, "mixed measure forms");
      if (K > kMaxSparseLabels)
        throw ParseError(path, line_no, "too many labels for subset masks");
      form = Form::Moebius;
      const Mask subset =
          detail::parse_subset_mask(tokens[1], K, path, line_no);
      moebius[subset] += detail::parse_double(tokens[3], path, line_no);
      continue;
    }
    if (tokens.size() == 3 && tokens[0] == "capacity") {
      if (form == Form::Counting || form == Form::Moebius)
        throw ParseError(path, line_no, "mixed measure forms");
      if (K > kMaxDenseLabels)
        throw ParseError(path, line_no,
                         "label count exceeds the dense capacity cap");
      if (form == Form::None) capacity.assign(subset_count(K), 0.0);
      form = Form::Cap;
      const Mask subset = detail::parse_hex_mask(tokens[1], path, line_no);
      if (subset > full_mask(K))
        throw ParseError(path, line_no, "subset mask outside the label set");
      capacity[subset] = detail::parse_double(tokens[2], path, line_no);
      continue;
    }
    throw ParseError(path, line_no, "unrecognized line: '" + text + "'");
  }

  if (header.label_count == 0) throw ParseError(path, line_no, "missing K=");
  try {
    switch (form) {
      case Form::Counting:
        return CountingProfile(header.label_count, std::move(counting));
      case Form::Moebius:
        return MoebiusRepresentation(header.label_count, std::move(moebius));
      case Form::Cap:
        return Capacity(header.label_count, std::move(capacity));
      case Form::None:
        break;
    }
  } catch (const std::invalid_argument& e) {
    const std::string where =
        counting_line > 0 ? path + ":" + std::to_string(counting_line) : path;
    throw ValidationError(where + ": " + e.what());
  }
  throw ParseError(path, line_no, "file has no measure body");
}

inline void write_measure_file(std::ostream& out, const CountingProfile& p) {
  out << "format=1\nK=" << p.label_count() << "\ncounting:";
  for (double v : p.values()) out << ' ' << format_significant(v, 17);
  out << '\n';
}

inline void write_measure_file(std::ostream& out,
                               const MoebiusRepresentation& m) {
  out << "format=1\nK=" << m.label_count() << '\n';
  std::vector<std::pair<Mask, double>> entries(m.masses().begin(),
                                               m.masses().end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return cardinality(a.first) != cardinality(b.first)
               ? cardinality(a.first) < cardinality(b.first)
               : a.first < b.first;
  });
  for (const auto& [subset, mass] : entries) {
    out << "subset ";
    bool first = true;
    for (int i = 0; i < m.label_count(); ++i) {
      if (!(subset & (Mask{1} << i))) continue;
      if (!first) out << ',';
      out << (i + 1);
      first = false;
    }
    out << " mass " << format_significant(mass, 17) << '\n';
  }
}

inline void write_measure_file(std::ostream& out, const Capacity& c) {
  out << "format=1\nK=" << c.label_count() << '\n';
  for (Mask m = 0; m < c.values().size(); ++m)
    out << "capacity " << detail::hex_mask(m) << ' '
        << format_significant(c[m], 17) << '\n';
}

template <typename Measure>
void write_measure_file(const std::string& path, const Measure& measure) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_measure_file(out, measure);
  if (!out) throw std::runtime_error("failed writing " + path);
}

// Distribution files list one labeling per line followed by its mass;
// duplicate labelings accumulate.
inline LabelDistribution read_distribution_file(
    const std::string& path,
    LabelDistribution::Mode mode = LabelDistribution::Mode::Strict) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");

  detail::TextHeader header;
  std::map<Mask, double> mass;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (detail::consume_header_line(text, header, path, line_no)) continue;
    if (header.label_count == 0)
      throw ParseError(path, line_no, "K=<int> must precede the labelings");
    const int K = header.label_count;
    const auto tokens = detail::split_whitespace(text);
    if (tokens.size() != static_cast<std::size_t>(K) + 1)
      throw ParseError(path, line_no,
                       "expected " + std::to_string(K) +
                           " labels and one probability");
    Mask labeling = 0;
    for (int i = 0; i < K; ++i) {
      const std::string& tok = tokens[static_cast<std::size_t>(i)];
      if (tok == "1")
        labeling |= Mask{1} << i;
      else if (tok != "0")
        throw ParseError(path, line_no, "label must be 0 or 1, got '" + tok + "'");
    }
    const double p = detail::parse_double(tokens.back(), path, line_no);
    if (p < 0.0) throw ParseError(path, line_no, "negative probability");
    mass[labeling] += p;
  }
  if (header.label_count == 0) throw ParseError(path, line_no, "missing K=");
  try {
    return LabelDistribution(header.label_count, mass, mode);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline void write_distribution_file(const std::string& path,
                                    const LabelDistribution& dist) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "format=1\nK=" << dist.label_count() << '\n';
  for (const auto& [labeling, p] : dist.support()) {
    for (int i = 0; i < dist.label_count(); ++i)
      out << ((labeling >> i) & 1) << ' ';
    out << format_significant(p, 17) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

// Loss specification strings, as accepted by the CLI and config files:
//   hamming | subset01 | fmeasure | poly:<alpha> | binom:<k>
//   counting:@<file> | measure:@<file>
inline LossSpec parse_loss_spec(const std::string& text) {
  if (text == "hamming") return HammingSpec{};
  if (text == "subset01") return Subset01Spec{};
  if (text == "fmeasure") return FMeasureSpec{};
  if (text.rfind("poly:", 0) == 0) {
    const std::string arg = text.substr(5);
    double alpha = 0.0;
    const auto [ptr, ec] =
        std::from_chars(arg.data(), arg.data() + arg.size(), alpha);
    if (ec != std::errc{} || ptr != arg.data() + arg.size())
      throw std::invalid_argument("bad alpha in loss spec '" + text + "'");
    if (!(alpha >= 1.0))
      throw std::invalid_argument("polynomial exponent must be >= 1");
    return PolynomialSpec{alpha};
  }
  if (text.rfind("binom:", 0) == 0) {
    const std::string arg = text.substr(6);
    int k = 0;
    const auto [ptr, ec] =
        std::from_chars(arg.data(), arg.data() + arg.size(), k);
    if (ec != std::errc{} || ptr != arg.data() + arg.size() || k < 1)
      throw std::invalid_argument("bad k in loss spec '" + text + "'");
    return BinomialSpec{k};
  }
  if (text.rfind("counting:@", 0) == 0) {
    const auto measure = read_measure_file(text.substr(10));
    if (const auto* profile = std::get_if<CountingProfile>(&measure))
      return CountingSpec{*profile};
    throw std::invalid_argument("'" + text.substr(10) +
                                "' is not a counting-form measure file");
  }
  if (text.rfind("measure:@", 0) == 0) {
    const std::string file = text.substr(9);
    const auto measure = read_measure_file(file);
    // Capacities straight from disk are checked against the measure
    // axioms before they back a loss; Moebius forms are checked through
    // their induced capacity when the dense cap allows it.
    if (const auto* cap = std::get_if<Capacity>(&measure)) {
      const auto report = validate_capacity(*cap);
      if (!report.ok())
        throw ValidationError(file + ": not a valid measure\n" +
                              report.to_string());
      return CapacitySpec{*cap};
    }
    if (const auto* moeb = std::get_if<MoebiusRepresentation>(&measure)) {
      if (moeb->label_count() <= kMaxDenseLabels) {
        const auto with_report = capacity_of(*moeb);
        if (!with_report.report.ok())
          throw ValidationError(file + ": not a valid measure\n" +
                                with_report.report.to_string());
      }
      return MoebiusSpec{*moeb};
    }
    return CountingSpec{std::get<CountingProfile>(measure)};
  }
  throw std::invalid_argument("unknown loss spec '" + text + "'");
}

}  // namespace cmlc
