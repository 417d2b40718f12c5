#pragma once

// Ingestion of ground-truth/prediction files produced by external
// multi-label learners, dataset statistics, and the deterministic results
// CSV writer.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cmlc/common.hpp"
#include "cmlc/loss.hpp"

namespace cmlc {

// Out-of-sample predictions of one method on one dataset: an N x K truth
// matrix and an N x K score matrix, row-aligned.
struct PredictionSet {
  std::string method;
  std::string dataset;
  int label_count = 0;
  std::vector<LabelVector> truth;
  std::vector<ScoreVector> scores;

  int size() const { return static_cast<int>(truth.size()); }
};

struct DatasetMeta {
  std::string name;
  int instances = 0;
  int labels = 0;
  double label_to_instance_ratio = 0.0;
  int unique_label_combinations = 0;
  double cardinality = 0.0;  // mean number of relevant labels per instance
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

inline double parse_double(const std::string& field, const std::string& path,
                           int line) {
  const std::string text = trim(field);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ParseError(path, line, "not a number: '" + text + "'");
  return value;
}

// Shortest representation that parses back to the same double.
inline std::string format_roundtrip(double value) {
  return format_significant(value, 17);
}

}  // namespace detail

// Reads the prediction CSV (header y_1..y_K,s_1..s_K, one instance per
// row). Method and dataset names default to the file stem and the parent
// directory name. Every schema violation names its line.
inline PredictionSet load_predictions(const std::string& path,
                                      std::string method = "",
                                      std::string dataset = "") {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");

  PredictionSet ps;
  const std::filesystem::path p(path);
  ps.method = method.empty() ? p.stem().string() : std::move(method);
  if (dataset.empty()) {
    const std::string parent = p.parent_path().filename().string();
    ps.dataset = parent.empty() || parent == "." ? "default" : parent;
  } else {
    ps.dataset = std::move(dataset);
  }

  std::string line;
  int line_no = 0;
  int K = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = detail::split(text, ',');
    if (!header_seen) {
      if (fields.size() < 2 || fields.size() % 2 != 0)
        throw ParseError(path, line_no, "header must list y_1..y_K,s_1..s_K");
      K = static_cast<int>(fields.size()) / 2;
      for (int i = 0; i < K; ++i) {
        const std::string y_name = "y_" + std::to_string(i + 1);
        const std::string s_name = "s_" + std::to_string(i + 1);
        if (detail::trim(fields[static_cast<std::size_t>(i)]) != y_name ||
            detail::trim(fields[static_cast<std::size_t>(K + i)]) != s_name)
          throw ParseError(path, line_no,
                           "header must list y_1..y_K,s_1..s_K");
      }
      ps.label_count = K;
      header_seen = true;
      continue;
    }
    if (fields.size() != static_cast<std::size_t>(2 * K))
      throw ParseError(path, line_no,
                       "expected " + std::to_string(2 * K) + " fields, got " +
                           std::to_string(fields.size()));
    std::vector<int> y(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) {
      const double v =
          detail::parse_double(fields[static_cast<std::size_t>(i)], path, line_no);
      if (v != 0.0 && v != 1.0)
        throw ParseError(path, line_no,
                         "truth value in column " + std::to_string(i + 1) +
                             " must be 0 or 1");
      y[static_cast<std::size_t>(i)] = static_cast<int>(v);
    }
    std::vector<double> s(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) {
      const double v = detail::parse_double(
          fields[static_cast<std::size_t>(K + i)], path, line_no);
      if (!(v >= -kScoreClampTol && v <= 1.0 + kScoreClampTol))
        throw ParseError(path, line_no,
                         "score in column " + std::to_string(K + i + 1) +
                             " outside [0,1]");
      s[static_cast<std::size_t>(i)] = v;
    }
    ps.truth.emplace_back(std::move(y));
    ps.scores.emplace_back(std::move(s));
  }
  if (!header_seen) throw ParseError(path, line_no, "missing header");
  return ps;
}

inline void save_predictions(const std::string& path, const PredictionSet& ps) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# format=1\n";
  for (int i = 0; i < ps.label_count; ++i) out << "y_" << (i + 1) << ',';
  for (int i = 0; i < ps.label_count; ++i)
    out << "s_" << (i + 1) << (i + 1 < ps.label_count ? ',' : '\n');
  for (int n = 0; n < ps.size(); ++n) {
    for (int i = 0; i < ps.label_count; ++i)
      out << ps.truth[static_cast<std::size_t>(n)][i] << ',';
    for (int i = 0; i < ps.label_count; ++i)
      out << detail::format_roundtrip(ps.scores[static_cast<std::size_t>(n)][i])
          << (i + 1 < ps.label_count ? "," : "\n");
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

// Statistics of the truth matrix; instance order does not matter.
inline DatasetMeta compute_meta(const PredictionSet& ps) {
  DatasetMeta meta;
  meta.name = ps.dataset;
  meta.instances = ps.size();
  meta.labels = ps.label_count;
  meta.label_to_instance_ratio =
      meta.instances == 0 ? 0.0
                          : static_cast<double>(meta.labels) / meta.instances;
  std::set<std::vector<int>> combinations;
  KahanSum relevant;
  for (const auto& row : ps.truth) {
    std::vector<int> bits(static_cast<std::size_t>(ps.label_count));
    for (int i = 0; i < ps.label_count; ++i)
      bits[static_cast<std::size_t>(i)] = row[i];
    combinations.insert(std::move(bits));
    relevant.add(row.relevant_count());
  }
  meta.unique_label_combinations = static_cast<int>(combinations.size());
  meta.cardinality =
      meta.instances == 0 ? 0.0 : relevant.result() / meta.instances;
  return meta;
}

// One evaluated cell of a parameter sweep.
struct ResultRow {
  double parameter = 0.0;
  std::string method;
  std::string dataset;
  double mean_loss = 0.0;
};

// Results CSV: stable column order, 6 significant digits, byte-identical
// across runs for identical inputs.
inline void write_results(const std::string& path,
                          const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "# format=1\n";
  out << "parameter,method,dataset,mean_loss\n";
  for (const auto& row : rows)
    out << format_significant(row.parameter, 6) << ',' << row.method << ','
        << row.dataset << ',' << format_significant(row.mean_loss, 6) << '\n';
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  file << out.str();
  if (!file) throw std::runtime_error("failed writing " + path);
}

}  // namespace cmlc
