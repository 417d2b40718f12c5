#pragma once

// Parameter-sweep evaluation and pairwise-comparison analytics: mean loss
// per (method, parameter) cell, aligned two-method traces, diagonal
// crossings, and the signed-area curvature summary.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cmlc/common.hpp"
#include "cmlc/dataset.hpp"
#include "cmlc/loss.hpp"

namespace cmlc {

inline constexpr int kDefaultAlphaGridSize = 50;
inline constexpr double kAlphaMin = 1.0;
inline constexpr double kAlphaMax = 1000.0;

struct SweepSpec {
  enum class Family { Binomial, Polynomial };

  Family family = Family::Binomial;
  std::vector<double> parameters;  // ascending

  // k = lo..hi, one integer step at a time.
  static SweepSpec binomial_range(int lo, int hi) {
    if (lo < 1 || hi < lo)
      throw std::invalid_argument("binomial range must satisfy 1 <= lo <= hi");
    SweepSpec spec;
    spec.family = Family::Binomial;
    for (int k = lo; k <= hi; ++k)
      spec.parameters.push_back(static_cast<double>(k));
    return spec;
  }

  // Log-spaced alpha grid over [1, 1000]; the low-alpha region is where
  // the loss changes fastest, so linear spacing would waste points.
  static SweepSpec polynomial_log_grid(int points = kDefaultAlphaGridSize) {
    if (points < 2) throw std::invalid_argument("grid needs >= 2 points");
    SweepSpec spec;
    spec.family = Family::Polynomial;
    spec.parameters.resize(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
      spec.parameters[static_cast<std::size_t>(i)] =
          std::pow(kAlphaMax, static_cast<double>(i) / (points - 1));
    spec.parameters.front() = kAlphaMin;
    spec.parameters.back() = kAlphaMax;
    return spec;
  }

  static SweepSpec polynomial_grid(std::vector<double> alphas) {
    SweepSpec spec;
    spec.family = Family::Polynomial;
    spec.parameters = std::move(alphas);
    spec.validate(0);
    return spec;
  }

  // label_count = 0 skips the binomial upper-bound check.
  void validate(int label_count) const {
    if (parameters.empty()) throw std::invalid_argument("empty parameter list");
    if (!std::is_sorted(parameters.begin(), parameters.end()))
      throw std::invalid_argument("parameters must be sorted ascending");
    for (double p : parameters) {
      if (family == Family::Binomial) {
        if (p != std::floor(p) || p < 1.0)
          throw std::invalid_argument("binomial parameters must be integers >= 1");
        if (label_count > 0 && p > label_count)
          throw std::invalid_argument("binomial parameter exceeds label count");
      } else if (!(p >= kAlphaMin && p <= kAlphaMax)) {
        throw std::invalid_argument("alpha must lie in [1, 1000]");
      }
    }
  }

  LossSpec loss_at(double parameter) const {
    if (family == Family::Binomial)
      return BinomialSpec{static_cast<int>(parameter)};
    return PolynomialSpec{parameter};
  }

  static std::string family_name(Family f) {
    return f == Family::Binomial ? "binomial" : "polynomial";
  }
};

struct SweepRow {
  double parameter = 0.0;
  std::string method;
  double mean_loss = 0.0;
};

struct SweepResult {
  std::string dataset;
  SweepSpec::Family family = SweepSpec::Family::Binomial;
  std::vector<SweepRow> rows;  // ordered by (parameter, method)
};

struct TracePoint {
  double parameter = 0.0;
  double loss_a = 0.0;
  double loss_b = 0.0;
};

struct PairwiseTrace {
  std::string method_a;
  std::string method_b;
  std::string dataset;
  std::vector<TracePoint> points;  // ordered by parameter
};

struct ParameterInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Mean loss over all instances, summed in instance order.
inline double mean_loss(const PredictionSet& ps, const LossSpec& spec) {
  if (ps.size() == 0) throw std::invalid_argument("empty prediction set");
  const PreparedLoss prepared(spec, ps.label_count);
  KahanSum acc;
  for (int n = 0; n < ps.size(); ++n)
    acc.add(prepared.value(ps.truth[static_cast<std::size_t>(n)],
                           ps.scores[static_cast<std::size_t>(n)]));
  return acc.result() / ps.size();
}

namespace detail {

inline void run_cells(int cell_count, int threads,
                      const std::function<void(int)>& work) {
  if (threads <= 1 || cell_count <= 1) {
    for (int c = 0; c < cell_count; ++c) work(c);
    return;
  }
  const int workers = std::min(threads, cell_count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int c = w; c < cell_count; c += workers) work(c);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

// Evaluates every (method, parameter) cell. Cells are independent and may
// run on any thread; each cell's summation order is fixed, and rows are
// emitted sorted by (parameter, method), so the result does not depend on
// the thread count.
inline SweepResult run_sweep(const std::vector<PredictionSet>& sets,
                             const SweepSpec& spec, int threads = 1) {
  if (sets.empty()) throw std::invalid_argument("no prediction sets");
  const int K = sets.front().label_count;
  const std::string& dataset = sets.front().dataset;
  for (const auto& ps : sets) {
    if (ps.label_count != K)
      throw std::invalid_argument("label counts differ across methods");
    if (ps.dataset != dataset)
      throw std::invalid_argument("datasets differ across methods");
  }
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = i + 1; j < sets.size(); ++j)
      if (sets[i].method == sets[j].method)
        throw std::invalid_argument("duplicate method name: " + sets[i].method);
  spec.validate(K);

  const int n_params = static_cast<int>(spec.parameters.size());
  const int n_methods = static_cast<int>(sets.size());
  std::vector<double> losses(
      static_cast<std::size_t>(n_params) * static_cast<std::size_t>(n_methods));
  detail::run_cells(n_params * n_methods, threads, [&](int cell) {
    const int pi = cell / n_methods;
    const int mi = cell % n_methods;
    losses[static_cast<std::size_t>(cell)] =
        mean_loss(sets[static_cast<std::size_t>(mi)],
                  spec.loss_at(spec.parameters[static_cast<std::size_t>(pi)]));
  });

  std::vector<int> method_order(static_cast<std::size_t>(n_methods));
  std::iota(method_order.begin(), method_order.end(), 0);
  std::sort(method_order.begin(), method_order.end(), [&](int a, int b) {
    return sets[static_cast<std::size_t>(a)].method <
           sets[static_cast<std::size_t>(b)].method;
  });

  SweepResult result;
  result.dataset = dataset;
  result.family = spec.family;
  result.rows.reserve(losses.size());
  for (int pi = 0; pi < n_params; ++pi)
    for (int mi : method_order)
      result.rows.push_back(
          {spec.parameters[static_cast<std::size_t>(pi)],
           sets[static_cast<std::size_t>(mi)].method,
           losses[static_cast<std::size_t>(pi * n_methods + mi)]});
  return result;
}

// Aligned (lossA, lossB) pairs over the shared parameter grid.
inline PairwiseTrace pairwise_trace(const SweepResult& result,
                                    const std::string& method_a,
                                    const std::string& method_b) {
  PairwiseTrace trace;
  trace.method_a = method_a;
  trace.method_b = method_b;
  trace.dataset = result.dataset;
  std::vector<double> parameters;
  for (const auto& row : result.rows)
    if (parameters.empty() || parameters.back() != row.parameter)
      parameters.push_back(row.parameter);
  for (double p : parameters) {
    TracePoint point;
    point.parameter = p;
    bool have_a = false, have_b = false;
    for (const auto& row : result.rows) {
      if (row.parameter != p) continue;
      if (row.method == method_a) {
        point.loss_a = row.mean_loss;
        have_a = true;
      }
      if (row.method == method_b) {
        point.loss_b = row.mean_loss;
        have_b = true;
      }
    }
    if (!have_a || !have_b)
      throw std::invalid_argument("method missing at parameter " +
                                  format_significant(p, 6));
    trace.points.push_back(point);
  }
  return trace;
}

// Maximal parameter intervals over which sign(lossA - lossB) flips.
// Differences within tol of zero are treated as "on the diagonal" and
// skipped, so an interval spans from the last clearly-signed point to the
// next clearly-signed point of opposite sign.
inline std::vector<ParameterInterval> diagonal_crossings(
    const PairwiseTrace& trace, double tol = kDefaultCrossingTol) {
  std::vector<ParameterInterval> crossings;
  double last_parameter = 0.0;
  int last_sign = 0;
  for (const auto& point : trace.points) {
    const double diff = point.loss_a - point.loss_b;
    const int sign = std::abs(diff) <= tol ? 0 : (diff > 0 ? 1 : -1);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign)
      crossings.push_back({last_parameter, point.parameter});
    last_sign = sign;
    last_parameter = point.parameter;
  }
  return crossings;
}

// Signed area between the trace polyline and the chord joining its
// endpoints, by the shoelace formula. Positive: polyline above the chord
// in the (lossA, lossB) plane, i.e. the second method improves relative to
// the first as the parameter grows (concave toward B). Negative: the
// mirror reading (convex toward A).
inline double curvature_summary(const PairwiseTrace& trace) {
  const auto& pts = trace.points;
  if (pts.size() < 3)
    throw std::invalid_argument("curvature needs at least 3 points");
  KahanSum acc;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& cur = pts[i];
    const auto& next = pts[(i + 1) % pts.size()];
    acc.add(cur.loss_a * next.loss_b - next.loss_a * cur.loss_b);
  }
  const double area = -0.5 * acc.result();
  return area == 0.0 ? 0.0 : area;  // avoid reporting -0
}

// --- CSV / JSON emission --------------------------------------------------

inline std::vector<ResultRow> to_result_rows(const SweepResult& result) {
  std::vector<ResultRow> rows;
  rows.reserve(result.rows.size());
  for (const auto& row : result.rows)
    rows.push_back({row.parameter, row.method, result.dataset, row.mean_loss});
  return rows;
}

inline void write_sweep_csv(const std::string& path,
                            const SweepResult& result) {
  write_results(path, to_result_rows(result));
}

// Pairwise CSV: parameter,loss_a,loss_b with the same formatting contract
// as the results CSV.
inline void write_pairwise_csv(const std::string& path,
                               const PairwiseTrace& trace) {
  std::ostringstream out;
  out << "# format=1\n";
  out << "parameter,loss_a,loss_b\n";
  for (const auto& point : trace.points)
    out << format_significant(point.parameter, 6) << ','
        << format_significant(point.loss_a, 6) << ','
        << format_significant(point.loss_b, 6) << '\n';
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  file << out.str();
  if (!file) throw std::runtime_error("failed writing " + path);
}

}  // namespace cmlc
