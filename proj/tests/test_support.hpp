#pragma once

// Shared helpers for the test suites: deterministic random generators and
// small brute-force oracles kept independent of the library's own
// evaluation paths.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "cmlc/bayes.hpp"
#include "cmlc/loss.hpp"
#include "cmlc/measure.hpp"

namespace testutil {

using Rng = std::mt19937_64;

// Platform-independent uniform draw in [0,1); distribution classes in the
// standard library are not bit-reproducible across implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Random valid capacity: uniform draws pushed up to their largest subset
// along the lattice, then pinned at the boundaries.
inline cmlc::Capacity random_capacity(Rng& rng, int label_count) {
  const auto n = cmlc::subset_count(label_count);
  std::vector<double> values(n);
  for (auto& v : values) v = uniform01(rng);
  values[0] = 0.0;
  // Masks in ascending order visit subsets before supersets.
  for (cmlc::Mask m = 1; m < n; ++m)
    for (int i = 0; i < label_count; ++i)
      if (m & (cmlc::Mask{1} << i))
        values[m] = std::max(values[m], values[m ^ (cmlc::Mask{1} << i)]);
  values[n - 1] = 1.0;
  return cmlc::Capacity(label_count, std::move(values));
}

inline cmlc::CountingProfile random_profile(Rng& rng, int label_count) {
  std::vector<double> v(static_cast<std::size_t>(label_count) + 1);
  for (auto& x : v) x = uniform01(rng);
  v.front() = 0.0;
  v.back() = 1.0;
  std::sort(v.begin(), v.end());
  return cmlc::CountingProfile(label_count, std::move(v));
}

inline cmlc::ValueVector random_values(Rng& rng, int label_count) {
  std::vector<double> u(static_cast<std::size_t>(label_count));
  for (auto& x : u) x = uniform01(rng);
  return cmlc::ValueVector(label_count, std::move(u));
}

inline cmlc::LabelVector random_labels(Rng& rng, int label_count) {
  std::vector<int> y(static_cast<std::size_t>(label_count));
  for (auto& b : y) b = static_cast<int>(rng() & 1);
  return cmlc::LabelVector(std::move(y));
}

inline cmlc::ScoreVector random_scores(Rng& rng, int label_count,
                                       bool binary = false) {
  std::vector<double> s(static_cast<std::size_t>(label_count));
  for (auto& x : s)
    x = binary ? static_cast<double>(rng() & 1) : uniform01(rng);
  return cmlc::ScoreVector(std::move(s));
}

// Random distribution over all of {0,1}^K (lenient construction carries
// the normalization).
inline cmlc::LabelDistribution random_distribution(Rng& rng, int label_count) {
  std::map<cmlc::Mask, double> mass;
  for (cmlc::Mask m = 0; m < cmlc::subset_count(label_count); ++m)
    mass[m] = uniform01(rng) + 1e-4;
  return cmlc::LabelDistribution(label_count, mass,
                                 cmlc::LabelDistribution::Mode::Lenient);
}

// --- independent oracles --------------------------------------------------

// Expected loss by direct summation over the full support, evaluating the
// public loss function per labeling (no error-count shortcut).
inline double brute_expected_loss(const cmlc::LabelDistribution& dist,
                                  const cmlc::LabelVector& prediction,
                                  const cmlc::LossSpec& spec) {
  const auto scores = cmlc::ScoreVector::from_labels(prediction);
  double total = 0.0;
  for (const auto& [labeling, p] : dist.support())
    total += p * cmlc::loss_value(
                     cmlc::LabelVector::from_mask(dist.label_count(), labeling),
                     scores, spec);
  return total;
}

// Argmin over all candidates in lexicographic order, keeping the first
// strict minimizer. Deliberately the slow double loop.
inline cmlc::LabelVector brute_bayes_optimal(const cmlc::LabelDistribution& dist,
                                             const cmlc::LossSpec& spec) {
  const int K = dist.label_count();
  double best = std::numeric_limits<double>::infinity();
  cmlc::Mask best_mask = 0;
  for (std::uint32_t rank = 0; rank < cmlc::subset_count(K); ++rank) {
    cmlc::Mask candidate = 0;
    for (int i = 0; i < K; ++i)
      if (rank & (std::uint32_t{1} << (K - 1 - i)))
        candidate |= cmlc::Mask{1} << i;
    const double loss = brute_expected_loss(
        dist, cmlc::LabelVector::from_mask(K, candidate), spec);
    if (loss < best) {
      best = loss;
      best_mask = candidate;
    }
  }
  return cmlc::LabelVector::from_mask(K, best_mask);
}

// Choquet sum evaluated along an explicit permutation (must list label
// indices in ascending value order); used to check tie invariance.
inline double choquet_with_permutation(const std::vector<double>& u,
                                       const std::vector<int>& order,
                                       const cmlc::Capacity& cap) {
  cmlc::Mask remaining = cap.full_set();
  double total = 0.0;
  double previous = 0.0;
  for (int idx : order) {
    total += (u[static_cast<std::size_t>(idx)] - previous) * cap[remaining];
    previous = u[static_cast<std::size_t>(idx)];
    remaining ^= cmlc::Mask{1} << idx;
  }
  return total;
}

}  // namespace testutil

#ifdef CMLC_TEST_NEED_FIXTURE

#include "cmlc/bayes.hpp"
#include "cmlc/dataset.hpp"

namespace testutil {

// Synthetic dependent-label task: per instance, one labeling holds a
// moderate joint mode while a cluster of near-complement labelings drives
// every marginal the other way. The "marginal" method predicts the
// per-label optimum, the "joint" method the full-labeling optimum, both
// via the exact oracle; truths are sampled from the same distributions.
// By construction the marginal method wins at low dependence-awareness
// and the joint method at high.
struct CrossingFixture {
  cmlc::PredictionSet marginal_method;
  cmlc::PredictionSet joint_method;
};

inline cmlc::LabelDistribution dependent_distribution(Rng& rng, int K) {
  const cmlc::Mask joint = static_cast<cmlc::Mask>(rng()) & cmlc::full_mask(K);
  const cmlc::Mask opposite = joint ^ cmlc::full_mask(K);
  std::map<cmlc::Mask, double> mass;
  mass[joint] += 0.20 + 0.06 * uniform01(rng);
  const double rest = 1.0 - mass[joint];
  std::vector<double> cluster(static_cast<std::size_t>(K));
  double total = 0.0;
  for (auto& w : cluster) {
    w = 0.5 + uniform01(rng);
    total += w;
  }
  for (int i = 0; i < K; ++i)
    mass[opposite ^ (cmlc::Mask{1} << i)] +=
        rest * cluster[static_cast<std::size_t>(i)] / total;
  return cmlc::LabelDistribution(K, mass,
                                 cmlc::LabelDistribution::Mode::Lenient);
}

inline cmlc::Mask sample_labeling(Rng& rng,
                                  const cmlc::LabelDistribution& dist) {
  double remaining = uniform01(rng);
  for (const auto& [labeling, p] : dist.support()) {
    remaining -= p;
    if (remaining <= 0.0) return labeling;
  }
  return dist.support().back().first;
}

inline CrossingFixture make_crossing_fixture(int K, int instances,
                                             std::uint64_t seed) {
  Rng rng(seed);
  CrossingFixture fixture;
  fixture.marginal_method.method = "marginal";
  fixture.joint_method.method = "joint";
  for (auto* ps : {&fixture.marginal_method, &fixture.joint_method}) {
    ps->dataset = "synthetic";
    ps->label_count = K;
  }
  for (int n = 0; n < instances; ++n) {
    const auto dist = dependent_distribution(rng, K);
    const auto truth =
        cmlc::LabelVector::from_mask(K, sample_labeling(rng, dist));
    const auto a = cmlc::bayes_optimal(dist, cmlc::HammingSpec{});
    const auto b = cmlc::bayes_optimal(dist, cmlc::Subset01Spec{});
    fixture.marginal_method.truth.push_back(truth);
    fixture.marginal_method.scores.push_back(
        cmlc::ScoreVector::from_labels(a.prediction));
    fixture.joint_method.truth.push_back(truth);
    fixture.joint_method.scores.push_back(
        cmlc::ScoreVector::from_labels(b.prediction));
  }
  return fixture;
}

}  // namespace testutil

#endif  // CMLC_TEST_NEED_FIXTURE
