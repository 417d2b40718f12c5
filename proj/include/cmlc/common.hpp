#pragma once

// Shared primitives: subset bitmask encoding, numeric tolerances, and the
// small helpers every other header relies on.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace cmlc {

// Subsets of the label set {1..K} are encoded as bitmasks with label i
// mapped to bit i-1. This encoding is part of the on-disk measure format
// and must never change.
using Mask = std::uint32_t;

// Dense capacities and the Bayes enumeration materialize 2^K entries;
// 2^20 doubles is 8 MiB, which is where we draw the line. Counting
// profiles carry K+1 values and have no such limit.
inline constexpr int kMaxDenseLabels = 20;

// Sparse Moebius representations only need the mask to fit.
inline constexpr int kMaxSparseLabels = 31;

inline constexpr double kDefaultValidationTol = 1e-9;  // axioms of file-loaded measures
inline constexpr double kMoebiusDropTol = 1e-14;       // transform noise cutoff
inline constexpr double kScoreClampTol = 1e-12;        // score overshoot tolerance
inline constexpr double kWeightNoiseTol = 1e-15;       // OWA weight noise clamp
inline constexpr double kDistributionSumTol = 1e-9;    // strict-mode mass total
inline constexpr double kDefaultCrossingTol = 1e-6;    // diagonal-crossing dead band

inline constexpr std::uint32_t subset_count(int label_count) {
  return std::uint32_t{1} << label_count;
}

inline constexpr Mask full_mask(int label_count) {
  return subset_count(label_count) - 1;
}

inline int cardinality(Mask subset) { return std::popcount(subset); }

// "{1,3,4}" -- for diagnostics and the violation report.
inline std::string subset_to_string(Mask subset) {
  std::string out = "{";
  bool first = true;
  for (int i = 0; subset >> i; ++i) {
    if (!(subset & (Mask{1} << i))) continue;
    if (!first) out += ',';
    out += std::to_string(i + 1);
    first = false;
  }
  out += '}';
  return out;
}

// Left-to-right compensated (Kahan) accumulator. Used for every reduction
// whose result must not depend on chunking or thread count.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double result() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Locale-independent formatting with a fixed number of significant digits.
inline std::string format_significant(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

// A structurally well-formed input that violates a domain contract
// (measure axioms, probability normalization, profile monotonicity).
// Distinct from ParseError so callers can map the two to different exit
// codes.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Error raised by the text-format readers; carries file and line context.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, int line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const { return path_; }
  int line() const { return line_; }

 private:
  std::string path_;
  int line_;
};

}  // namespace cmlc
