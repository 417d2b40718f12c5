#pragma once

// Exact Bayes-optimal prediction by enumeration over {0,1}^K: marginals,
// expected loss of a candidate labeling, and the argmin over all binary
// predictions with a deterministic lexicographic tie-break.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "cmlc/common.hpp"
#include "cmlc/loss.hpp"

namespace cmlc {

// Probability mass over labelings, keyed by subset mask. Strict mode
// rejects totals off by more than kDistributionSumTol; lenient mode
// renormalizes (and records that it did, so callers can report it).
class LabelDistribution {
 public:
  enum class Mode { Strict, Lenient };

  LabelDistribution(int label_count, const std::map<Mask, double>& mass,
                    Mode mode = Mode::Strict)
      : label_count_(label_count) {
    if (label_count < 1 || label_count > kMaxDenseLabels)
      throw std::invalid_argument("distribution label count must be in 1.." +
                                  std::to_string(kMaxDenseLabels));
    KahanSum total;
    for (const auto& [subset, p] : mass) {
      if (subset > full_mask(label_count_))
        throw std::invalid_argument("labeling outside {0,1}^K");
      if (!(p >= 0.0)) throw std::invalid_argument("negative probability");
      if (p > 0.0) support_.emplace_back(subset, p);
      total.add(p);
    }
    input_total_ = total.result();
    if (support_.empty())
      throw std::invalid_argument("distribution has no mass");
    if (std::abs(input_total_ - 1.0) > kDistributionSumTol) {
      if (mode == Mode::Strict)
        throw std::invalid_argument("probabilities sum to " +
                                    format_significant(input_total_, 17) +
                                    ", not 1");
      for (auto& [subset, p] : support_) p /= input_total_;
      renormalized_ = true;
    }
  }

  int label_count() const { return label_count_; }
  // Ascending mask order; every stored probability is > 0.
  const std::vector<std::pair<Mask, double>>& support() const {
    return support_;
  }
  bool renormalized() const { return renormalized_; }
  double input_total() const { return input_total_; }

  double mass(Mask labeling) const {
    auto it = std::lower_bound(
        support_.begin(), support_.end(), labeling,
        [](const auto& entry, Mask m) { return entry.first < m; });
    return it != support_.end() && it->first == labeling ? it->second : 0.0;
  }

 private:
  int label_count_;
  std::vector<std::pair<Mask, double>> support_;
  double input_total_ = 0.0;
  bool renormalized_ = false;
};

// Per-label relevance probabilities p_i(1) = sum of p(y) over y with y_i = 1.
inline std::vector<double> marginals(const LabelDistribution& dist) {
  std::vector<KahanSum> acc(static_cast<std::size_t>(dist.label_count()));
  for (const auto& [labeling, p] : dist.support())
    for (int i = 0; i < dist.label_count(); ++i)
      if (labeling & (Mask{1} << i)) acc[static_cast<std::size_t>(i)].add(p);
  std::vector<double> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = acc[i].result();
  return out;
}

namespace detail {

// Expected loss of the binary prediction `candidate`, summed over the
// support in ascending mask order. Counting-family losses go through the
// error-count table; everything else evaluates the loss per labeling.
inline double expected_loss_of_candidate(const LabelDistribution& dist,
                                         Mask candidate,
                                         const PreparedLoss& prepared) {
  KahanSum acc;
  if (prepared.has_binary_table()) {
    for (const auto& [labeling, p] : dist.support())
      acc.add(p * prepared.binary_loss(cardinality(labeling ^ candidate)));
  } else {
    const ScoreVector scores =
        ScoreVector::from_labels(LabelVector::from_mask(dist.label_count(), candidate));
    for (const auto& [labeling, p] : dist.support())
      acc.add(p * prepared.value(LabelVector::from_mask(dist.label_count(), labeling),
                                 scores));
  }
  return acc.result();
}

// Labeling at the given position of the lexicographic candidate order
// (label 1 most significant).
inline Mask mask_of_lexicographic_rank(std::uint32_t rank, int label_count) {
  Mask m = 0;
  for (int i = 0; i < label_count; ++i)
    if (rank & (std::uint32_t{1} << (label_count - 1 - i))) m |= Mask{1} << i;
  return m;
}

}  // namespace detail

// Expected loss of a fixed prediction under the distribution.
inline double expected_loss(const LabelDistribution& dist,
                            const LabelVector& prediction,
                            const LossSpec& spec) {
  if (prediction.label_count() != dist.label_count())
    throw std::invalid_argument("prediction/distribution dimensions differ");
  const PreparedLoss prepared(spec, dist.label_count());
  return detail::expected_loss_of_candidate(dist, prediction.as_mask(),
                                            prepared);
}

struct BayesResult {
  LabelVector prediction;
  double expected_loss;
};

// Argmin of the expected loss over all 2^K binary predictions. Ties go to
// the lexicographically smallest labeling (label 1 most significant), and
// the result is independent of the thread count: every candidate's
// expectation is evaluated in the same fixed order, and chunk results are
// merged by (loss, lexicographic rank).
inline BayesResult bayes_optimal(const LabelDistribution& dist,
                                 const LossSpec& spec, int threads = 1) {
  const int K = dist.label_count();
  const PreparedLoss prepared(spec, K);
  const std::uint32_t candidates = subset_count(K);

  struct Best {
    double loss = std::numeric_limits<double>::infinity();
    std::uint32_t rank = 0;
  };
  auto scan = [&](std::uint32_t lo, std::uint32_t hi) {
    Best best;
    for (std::uint32_t rank = lo; rank < hi; ++rank) {
      const Mask candidate = detail::mask_of_lexicographic_rank(rank, K);
      const double loss =
          detail::expected_loss_of_candidate(dist, candidate, prepared);
      if (loss < best.loss) best = {loss, rank};
    }
    return best;
  };

  Best best;
  if (threads <= 1 || candidates < 256) {
    best = scan(0, candidates);
  } else {
    const std::uint32_t workers =
        std::min<std::uint32_t>(static_cast<std::uint32_t>(threads), candidates);
    std::vector<Best> partial(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint32_t w = 0; w < workers; ++w) {
      const std::uint32_t lo = candidates / workers * w +
                               std::min(w, candidates % workers);
      const std::uint32_t hi = lo + candidates / workers +
                               (w < candidates % workers ? 1 : 0);
      pool.emplace_back([&, lo, hi, w] { partial[w] = scan(lo, hi); });
    }
    for (auto& t : pool) t.join();
    for (const auto& p : partial)
      if (p.loss < best.loss || (p.loss == best.loss && p.rank < best.rank))
        best = p;
  }

  const Mask argmin = detail::mask_of_lexicographic_rank(best.rank, K);
  return {LabelVector::from_mask(K, argmin), best.loss};
}

}  // namespace cmlc
