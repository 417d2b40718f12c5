#pragma once

// The discrete Choquet integral of a non-negative value vector, in its
// three equivalent evaluations: sorted (any capacity), Moebius (sparse
// measures), and OWA (counting measures).

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cmlc/common.hpp"
#include "cmlc/measure.hpp"

namespace cmlc {

// Non-negative values, one per label. Correctness degrees live in [0,1],
// but the integral itself accepts any non-negative input.
class ValueVector {
 public:
  ValueVector(int label_count, std::vector<double> values)
      : label_count_(label_count), u_(std::move(values)) {
    check();
  }

  // Members initialize in declaration order, so the size is read before
  // the vector is moved from.
  explicit ValueVector(std::vector<double> values)
      : label_count_(static_cast<int>(values.size())), u_(std::move(values)) {
    check();
  }

  int label_count() const { return label_count_; }
  double operator[](int i) const { return u_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return u_; }

 private:
  void check() const {
    if (label_count_ < 1)
      throw std::invalid_argument("need at least one label");
    if (u_.size() != static_cast<std::size_t>(label_count_))
      throw std::invalid_argument("need one value per label");
    for (double x : u_)
      if (!(x >= 0.0)) throw std::invalid_argument("values must be >= 0");
  }

  int label_count_;
  std::vector<double> u_;
};

namespace detail {

// Indices of u in ascending value order; equal values keep index order so
// the evaluation is reproducible (the integral itself is tie-invariant).
inline std::vector<int> ascending_order(const std::vector<double>& u) {
  std::vector<int> idx(u.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&u](int a, int b) {
    const double ua = u[static_cast<std::size_t>(a)];
    const double ub = u[static_cast<std::size_t>(b)];
    return ua < ub || (ua == ub && a < b);
  });
  return idx;
}

}  // namespace detail

// Sum over ranks of (u_(i) - u_(i-1)) * mu({labels with the K-i+1 largest
// values}), with u_(0) = 0. Summation is left-to-right over ascending rank.
inline double choquet_sorted(const ValueVector& u, const Capacity& cap) {
  if (u.label_count() != cap.label_count())
    throw std::invalid_argument("value/capacity dimensions differ");
  const auto order = detail::ascending_order(u.values());
  Mask remaining = cap.full_set();
  KahanSum acc;
  double previous = 0.0;
  for (int idx : order) {
    const double value = u[idx];
    acc.add((value - previous) * cap[remaining]);
    previous = value;
    remaining ^= Mask{1} << idx;
  }
  return acc.result();
}

// Sum over stored masses of m(T) * min of u on T. O(K * #masses); prefer
// the sorted or counting form for dense measures.
inline double choquet_moebius(const ValueVector& u,
                              const MoebiusRepresentation& moeb) {
  if (u.label_count() != moeb.label_count())
    throw std::invalid_argument("value/measure dimensions differ");
  KahanSum acc;
  for (const auto& [subset, mass] : moeb.masses()) {
    double lowest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < moeb.label_count(); ++i)
      if (subset & (Mask{1} << i)) lowest = std::min(lowest, u[i]);
    acc.add(mass * lowest);
  }
  return acc.result();
}

// OWA form for counting measures: sum of w[i] * u_(i) with u sorted
// ascending. O(K log K).
inline double choquet_counting(const ValueVector& u,
                               const CountingProfile& profile) {
  if (u.label_count() != profile.label_count())
    throw std::invalid_argument("value/profile dimensions differ");
  const OwaWeights weights = owa_weights(profile);
  std::vector<double> sorted = u.values();
  std::sort(sorted.begin(), sorted.end());
  KahanSum acc;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    acc.add(weights.values()[i] * sorted[i]);
  return acc.result();
}

}  // namespace cmlc
