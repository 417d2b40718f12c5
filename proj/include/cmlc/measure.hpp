#pragma once

// Non-additive measures (capacities) on label subsets: validation, the
// Moebius/zeta transform pair, counting (symmetric) measures and their OWA
// weights, and the two single-parameter families (polynomial, binomial).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmlc/common.hpp"

namespace cmlc {

struct Violation {
  enum class Kind {
    Boundary,      // mu(empty) != 0 or mu(full) != 1
    Monotonicity,  // mu(subset) > mu(superset)
  };

  Kind kind;
  Mask subset = 0;
  Mask superset = 0;  // only meaningful for Monotonicity
  double value_subset = 0.0;
  double value_superset = 0.0;

  std::string to_string() const {
    if (kind == Kind::Boundary) {
      return "boundary: mu(" + subset_to_string(subset) +
             ") = " + format_significant(value_subset, 17);
    }
    return "monotonicity: mu(" + subset_to_string(subset) +
           ") = " + format_significant(value_subset, 17) + " > mu(" +
           subset_to_string(superset) +
           ") = " + format_significant(value_superset, 17);
  }
};

// Violations are data, not errors: an empty report means all axioms hold.
class ValidationReport {
 public:
  bool ok() const { return violations_.empty(); }
  const std::vector<Violation>& violations() const { return violations_; }
  void add(Violation v) { violations_.push_back(std::move(v)); }

  std::string to_string() const {
    if (ok()) return "valid";
    std::string out;
    for (const auto& v : violations_) {
      out += v.to_string();
      out += '\n';
    }
    return out;
  }

 private:
  std::vector<Violation> violations_;
};

// A set function on 2^{1..K}, stored densely and indexed by subset mask.
// Construction checks only shape; the measure axioms are checked explicitly
// by validate_capacity so that files under inspection can be represented.
class Capacity {
 public:
  Capacity(int label_count, std::vector<double> values)
      : label_count_(label_count), values_(std::move(values)) {
    if (label_count < 1 || label_count > kMaxDenseLabels)
      throw std::invalid_argument("capacity label count must be in 1.." +
                                  std::to_string(kMaxDenseLabels));
    if (values_.size() != subset_count(label_count))
      throw std::invalid_argument("capacity needs one value per subset (2^K)");
  }

  int label_count() const { return label_count_; }
  Mask full_set() const { return full_mask(label_count_); }
  double operator[](Mask subset) const { return values_[subset]; }
  const std::vector<double>& values() const { return values_; }

 private:
  int label_count_;
  std::vector<double> values_;
};

// Sparse Moebius form: subset -> mass, absent means zero. Masses may be
// negative; the induced capacity decides validity.
class MoebiusRepresentation {
 public:
  MoebiusRepresentation(int label_count, std::map<Mask, double> masses)
      : label_count_(label_count), masses_(std::move(masses)) {
    if (label_count < 1 || label_count > kMaxSparseLabels)
      throw std::invalid_argument("moebius label count must be in 1.." +
                                  std::to_string(kMaxSparseLabels));
    for (const auto& [subset, mass] : masses_) {
      (void)mass;
      if (subset == 0)
        throw std::invalid_argument("the empty set carries no Moebius mass");
      if (subset > full_mask(label_count_))
        throw std::invalid_argument("subset " + subset_to_string(subset) +
                                    " outside the label set");
    }
  }

  int label_count() const { return label_count_; }
  const std::map<Mask, double>& masses() const { return masses_; }

  double mass(Mask subset) const {
    auto it = masses_.find(subset);
    return it == masses_.end() ? 0.0 : it->second;
  }

 private:
  int label_count_;
  std::map<Mask, double> masses_;
};

// Symmetric (counting) measure, specified by v(j/K) for j = 0..K.
// mu(A) = v(|A|/K); valid for any K since only K+1 values are stored.
class CountingProfile {
 public:
  CountingProfile(int label_count, std::vector<double> values)
      : label_count_(label_count), v_(std::move(values)) {
    if (label_count < 1)
      throw std::invalid_argument("profile needs at least one label");
    if (v_.size() != static_cast<std::size_t>(label_count) + 1)
      throw std::invalid_argument("profile needs K+1 values");
    if (std::abs(v_.front()) > kDefaultValidationTol)
      throw std::invalid_argument("profile must start at v(0) = 0");
    if (std::abs(v_.back() - 1.0) > kDefaultValidationTol)
      throw std::invalid_argument("profile must end at v(1) = 1");
    v_.front() = 0.0;
    v_.back() = 1.0;
    // Non-monotone profiles would yield negative OWA weights; reject them
    // here rather than clamping anything beyond numeric noise.
    for (std::size_t j = 1; j < v_.size(); ++j) {
      if (v_[j] < v_[j - 1] - kWeightNoiseTol)
        throw std::invalid_argument("profile decreases at step " +
                                    std::to_string(j));
      if (v_[j] < v_[j - 1]) v_[j] = v_[j - 1];
    }
  }

  int label_count() const { return label_count_; }
  // v(j/K) -- the importance of a correct prediction on any j labels.
  double at_count(int j) const { return v_[static_cast<std::size_t>(j)]; }
  const std::vector<double>& values() const { return v_; }

 private:
  int label_count_;
  std::vector<double> v_;
};

// OWA weights derived from a counting profile. Convention: w[i] (0-based)
// multiplies the (i+1)-th smallest correctness degree, equivalently the
// (i+1)-th largest per-label error.
class OwaWeights {
 public:
  OwaWeights(int label_count, std::vector<double> weights)
      : label_count_(label_count), w_(std::move(weights)) {
    if (w_.size() != static_cast<std::size_t>(label_count))
      throw std::invalid_argument("need one OWA weight per label");
    KahanSum total;
    for (double& wi : w_) {
      if (wi < -kWeightNoiseTol)
        throw std::invalid_argument("negative OWA weight");
      if (wi < 0.0) wi = 0.0;
      total.add(wi);
    }
    if (std::abs(total.result() - 1.0) > kDefaultValidationTol)
      throw std::invalid_argument("OWA weights must sum to 1");
  }

  int label_count() const { return label_count_; }
  const std::vector<double>& values() const { return w_; }

 private:
  int label_count_;
  std::vector<double> w_;
};

namespace detail {

// In-place subset-sum (zeta) transform: out[B] = sum over A subseteq B of f[A].
inline void zeta_transform(std::vector<double>& f, int label_count) {
  for (int i = 0; i < label_count; ++i) {
    const Mask bit = Mask{1} << i;
    for (Mask m = 0; m < subset_count(label_count); ++m)
      if (m & bit) f[m] += f[m ^ bit];
  }
}

// Inverse of zeta_transform: recovers exclusively-allocated masses.
inline void moebius_transform(std::vector<double>& f, int label_count) {
  for (int i = 0; i < label_count; ++i) {
    const Mask bit = Mask{1} << i;
    for (Mask m = 0; m < subset_count(label_count); ++m)
      if (m & bit) f[m] -= f[m ^ bit];
  }
}

// C(n, r) in exact integer arithmetic, or nullopt once it leaves uint64 range.
inline std::optional<std::uint64_t> binomial_exact(int n, int r) {
  if (r < 0 || r > n) return std::uint64_t{0};
  r = std::min(r, n - r);
  unsigned __int128 acc = 1;
  for (int i = 1; i <= r; ++i) {
    acc = acc * static_cast<unsigned>(n - r + i) / static_cast<unsigned>(i);
    if (acc > ~std::uint64_t{0}) return std::nullopt;
  }
  return static_cast<std::uint64_t>(acc);
}

// C(j, k) / C(n, k): exact integers when they fit, otherwise a product of
// exact factor ratios. Either way there is no catastrophic cancellation.
inline double binomial_ratio(int j, int n, int k) {
  if (j < k) return 0.0;
  const auto num = binomial_exact(j, k);
  const auto den = binomial_exact(n, k);
  if (num && den)
    return static_cast<double>(*num) / static_cast<double>(*den);
  double ratio = 1.0;
  for (int i = 0; i < k; ++i)
    ratio *= static_cast<double>(j - i) / static_cast<double>(n - i);
  return ratio;
}

}  // namespace detail

// Checks normalization (mu(empty)=0, mu(full)=1) and monotonicity along
// every covering pair A, A+{i}; transitivity makes that sufficient.
inline ValidationReport validate_capacity(const Capacity& cap,
                                          double tol = kDefaultValidationTol) {
  ValidationReport report;
  const Mask full = cap.full_set();
  if (std::abs(cap[0]) > tol)
    report.add({Violation::Kind::Boundary, 0, 0, cap[0], 0.0});
  if (std::abs(cap[full] - 1.0) > tol)
    report.add({Violation::Kind::Boundary, full, 0, cap[full], 0.0});
  for (Mask m = 1; m <= full; ++m) {
    for (int i = 0; i < cap.label_count(); ++i) {
      const Mask bit = Mask{1} << i;
      if (!(m & bit)) continue;
      const Mask sub = m ^ bit;
      if (cap[sub] > cap[m] + tol)
        report.add({Violation::Kind::Monotonicity, sub, m, cap[sub], cap[m]});
    }
  }
  return report;
}

// Moebius transform of a capacity; masses below kMoebiusDropTol are dropped
// from the sparse map as transform noise.
inline MoebiusRepresentation moebius_of(const Capacity& cap) {
  std::vector<double> masses = cap.values();
  detail::moebius_transform(masses, cap.label_count());
  std::map<Mask, double> sparse;
  for (Mask m = 1; m < masses.size(); ++m)
    if (std::abs(masses[m]) > kMoebiusDropTol) sparse.emplace(m, masses[m]);
  return MoebiusRepresentation(cap.label_count(), std::move(sparse));
}

struct CapacityWithReport {
  Capacity capacity;
  ValidationReport report;
};

// Zeta transform of a Moebius representation. The result is validated and
// the report returned alongside: masses may be negative, the induced set
// function may not be a capacity.
inline CapacityWithReport capacity_of(const MoebiusRepresentation& moeb,
                                      double tol = kDefaultValidationTol) {
  if (moeb.label_count() > kMaxDenseLabels)
    throw std::invalid_argument("label count exceeds the dense capacity cap");
  std::vector<double> values(subset_count(moeb.label_count()), 0.0);
  for (const auto& [subset, mass] : moeb.masses()) values[subset] = mass;
  detail::zeta_transform(values, moeb.label_count());
  Capacity cap(moeb.label_count(), std::move(values));
  ValidationReport report = validate_capacity(cap, tol);
  return {std::move(cap), std::move(report)};
}

// Smallest k such that every subset larger than k carries (numerically)
// zero mass. Returns 0 for an all-zero representation.
inline int additivity_order(const MoebiusRepresentation& moeb,
                            double tol = kMoebiusDropTol) {
  int order = 0;
  for (const auto& [subset, mass] : moeb.masses())
    if (std::abs(mass) > tol) order = std::max(order, cardinality(subset));
  return order;
}

// v(x) = x^alpha, alpha >= 1. alpha = 1 is the per-label average; large
// alpha concentrates all importance on the full label set.
inline CountingProfile profile_polynomial(int label_count, double alpha) {
  if (label_count < 1) throw std::invalid_argument("need at least one label");
  if (!(alpha >= 1.0))
    throw std::invalid_argument("polynomial exponent must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(label_count) + 1);
  for (int j = 0; j <= label_count; ++j) {
    const double x = static_cast<double>(j) / label_count;
    v[static_cast<std::size_t>(j)] = alpha == 1.0 ? x : std::pow(x, alpha);
  }
  v.back() = 1.0;
  return CountingProfile(label_count, std::move(v));
}

// v(j/K) = C(j,k) / C(K,k): uniform Moebius mass on all k-subsets. k = 1
// is the per-label average, k = K the all-or-nothing measure.
inline CountingProfile profile_binomial(int label_count, int k) {
  if (label_count < 1) throw std::invalid_argument("need at least one label");
  if (k < 1 || k > label_count)
    throw std::invalid_argument("binomial subset size must be in 1..K");
  std::vector<double> v(static_cast<std::size_t>(label_count) + 1);
  for (int j = 0; j <= label_count; ++j)
    v[static_cast<std::size_t>(j)] = detail::binomial_ratio(j, label_count, k);
  return CountingProfile(label_count, std::move(v));
}

// w[i] = v((K-i)/K) - v((K-i-1)/K) for 0-based i: the increment spent on
// the (i+1)-th smallest correctness value.
inline OwaWeights owa_weights(const CountingProfile& profile) {
  const int K = profile.label_count();
  std::vector<double> w(static_cast<std::size_t>(K));
  for (int i = 0; i < K; ++i)
    w[static_cast<std::size_t>(i)] =
        profile.at_count(K - i) - profile.at_count(K - i - 1);
  return OwaWeights(K, std::move(w));
}

// Dense capacity mu(A) = v(|A|); only for K within the dense cap.
inline Capacity expand_counting(const CountingProfile& profile) {
  if (profile.label_count() > kMaxDenseLabels)
    throw std::invalid_argument("label count exceeds the dense capacity cap");
  std::vector<double> values(subset_count(profile.label_count()));
  for (Mask m = 0; m < values.size(); ++m)
    values[m] = profile.at_count(cardinality(m));
  return Capacity(profile.label_count(), std::move(values));
}

// Normalized Moebius mass on a family of label subsets; uniform when no
// weights are given. Duplicate subsets merge by summing. Non-negative
// masses always induce a valid (totally monotone) capacity.
inline MoebiusRepresentation covering_measure(
    int label_count, const std::vector<Mask>& covering,
    const std::vector<double>& weights = {}) {
  if (covering.empty()) throw std::invalid_argument("empty covering");
  if (!weights.empty() && weights.size() != covering.size())
    throw std::invalid_argument("need one weight per covering subset");
  double total = 0.0;
  for (std::size_t i = 0; i < covering.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w <= 0.0) throw std::invalid_argument("covering weights must be > 0");
    total += w;
  }
  std::map<Mask, double> masses;
  for (std::size_t i = 0; i < covering.size(); ++i)
    masses[covering[i]] += (weights.empty() ? 1.0 : weights[i]) / total;
  return MoebiusRepresentation(label_count, std::move(masses));
}

}  // namespace cmlc
