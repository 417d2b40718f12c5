#pragma once

// Multi-label loss functions: the correctness transform, the measure-based
// loss 1 - Choquet(correctness), the classic special cases, and the
// error-count shortcut for binary predictions under counting measures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "cmlc/common.hpp"
#include "cmlc/integral.hpp"
#include "cmlc/measure.hpp"

namespace cmlc {

// Ground-truth labeling in {0,1}^K. Stored as bytes so K is unbounded;
// as_mask() is available for K within the sparse mask range.
class LabelVector {
 public:
  explicit LabelVector(std::vector<int> bits) {
    y_.reserve(bits.size());
    for (int b : bits) {
      if (b != 0 && b != 1)
        throw std::invalid_argument("label entries must be 0 or 1");
      y_.push_back(static_cast<std::uint8_t>(b));
    }
    if (y_.empty()) throw std::invalid_argument("need at least one label");
  }

  static LabelVector from_mask(int label_count, Mask mask) {
    if (label_count < 1 || label_count > kMaxSparseLabels)
      throw std::invalid_argument("label count outside the mask range");
    std::vector<int> bits(static_cast<std::size_t>(label_count));
    for (int i = 0; i < label_count; ++i)
      bits[static_cast<std::size_t>(i)] = (mask >> i) & 1;
    return LabelVector(std::move(bits));
  }

  int label_count() const { return static_cast<int>(y_.size()); }
  int operator[](int i) const { return y_[static_cast<std::size_t>(i)]; }

  Mask as_mask() const {
    if (label_count() > kMaxSparseLabels)
      throw std::invalid_argument("too many labels for a subset mask");
    Mask m = 0;
    for (int i = 0; i < label_count(); ++i)
      if (y_[static_cast<std::size_t>(i)]) m |= Mask{1} << i;
    return m;
  }

  int relevant_count() const {
    int n = 0;
    for (auto b : y_) n += b;
    return n;
  }

  friend bool operator==(const LabelVector& a, const LabelVector& b) {
    return a.y_ == b.y_;
  }

 private:
  std::vector<std::uint8_t> y_;
};

// Predicted relevance scores in [0,1]^K. Entries overshooting by at most
// kScoreClampTol are clamped; anything further out is rejected.
class ScoreVector {
 public:
  explicit ScoreVector(std::vector<double> scores) : s_(std::move(scores)) {
    if (s_.empty()) throw std::invalid_argument("need at least one score");
    for (double& x : s_) {
      if (!(x >= -kScoreClampTol && x <= 1.0 + kScoreClampTol))
        throw std::invalid_argument("score outside [0,1]");
      x = std::clamp(x, 0.0, 1.0);
    }
  }

  static ScoreVector from_labels(const LabelVector& y) {
    std::vector<double> s(static_cast<std::size_t>(y.label_count()));
    for (int i = 0; i < y.label_count(); ++i)
      s[static_cast<std::size_t>(i)] = static_cast<double>(y[i]);
    return ScoreVector(std::move(s));
  }

  int label_count() const { return static_cast<int>(s_.size()); }
  double operator[](int i) const { return s_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return s_; }

  bool is_binary() const {
    for (double x : s_)
      if (x != 0.0 && x != 1.0) return false;
    return true;
  }

 private:
  std::vector<double> s_;
};

// Per-label correctness u_i = 1 - |s_i - y_i|, the function the Choquet
// integral aggregates.
inline ValueVector correctness(const LabelVector& y, const ScoreVector& s) {
  if (y.label_count() != s.label_count())
    throw std::invalid_argument("label/score dimensions differ");
  std::vector<double> u(static_cast<std::size_t>(y.label_count()));
  for (int i = 0; i < y.label_count(); ++i)
    u[static_cast<std::size_t>(i)] = 1.0 - std::abs(s[i] - y[i]);
  return ValueVector(y.label_count(), std::move(u));
}

// Average per-label error; the additive-uniform special case.
inline double loss_hamming(const LabelVector& y, const ScoreVector& s) {
  if (y.label_count() != s.label_count())
    throw std::invalid_argument("label/score dimensions differ");
  KahanSum acc;
  for (int i = 0; i < y.label_count(); ++i) acc.add(std::abs(s[i] - y[i]));
  return std::clamp(acc.result() / y.label_count(), 0.0, 1.0);
}

// Largest per-label error; all-or-nothing on binary predictions.
inline double loss_subset01(const LabelVector& y, const ScoreVector& s) {
  if (y.label_count() != s.label_count())
    throw std::invalid_argument("label/score dimensions differ");
  double worst = 0.0;
  for (int i = 0; i < y.label_count(); ++i)
    worst = std::max(worst, std::abs(s[i] - y[i]));
  return worst;
}

// 1 - F1 on binary predictions. Empty truth and empty prediction agree
// perfectly by convention, so the loss is 0 there.
inline double loss_fmeasure(const LabelVector& y, const LabelVector& yhat) {
  if (y.label_count() != yhat.label_count())
    throw std::invalid_argument("label dimensions differ");
  int both = 0, total = 0;
  for (int i = 0; i < y.label_count(); ++i) {
    both += y[i] & yhat[i];
    total += y[i] + yhat[i];
  }
  if (total == 0) return 0.0;
  return 1.0 - 2.0 * both / total;
}

// --- loss specifications -------------------------------------------------

struct HammingSpec {};
struct Subset01Spec {};
struct FMeasureSpec {};
struct PolynomialSpec {
  double alpha = 1.0;
};
struct BinomialSpec {
  int k = 1;
};
struct CountingSpec {
  CountingProfile profile;
};
struct CapacitySpec {
  Capacity capacity;
};
struct MoebiusSpec {
  MoebiusRepresentation moebius;
};

using LossSpec = std::variant<HammingSpec, Subset01Spec, FMeasureSpec,
                              PolynomialSpec, BinomialSpec, CountingSpec,
                              CapacitySpec, MoebiusSpec>;

// A loss specification resolved against a concrete label count: weights
// are extracted once and every evaluation dispatches to the cheapest route
// consistent with the spec. Polynomial(1) and Binomial(1) share the exact
// Hamming computation, Binomial(K) the exact subset 0/1 computation.
class PreparedLoss {
 public:
  PreparedLoss(const LossSpec& spec, int label_count)
      : label_count_(label_count) {
    if (label_count < 1) throw std::invalid_argument("need at least one label");
    std::visit([this](const auto& s) { init(s); }, spec);
  }

  int label_count() const { return label_count_; }

  double value(const LabelVector& y, const ScoreVector& s) const {
    if (y.label_count() != label_count_ || s.label_count() != label_count_)
      throw std::invalid_argument("label/score dimensions differ");
    switch (route_) {
      case Route::Hamming:
        return loss_hamming(y, s);
      case Route::Subset01:
        return loss_subset01(y, s);
      case Route::FMeasure: {
        if (!s.is_binary())
          throw std::invalid_argument("F-measure needs binary predictions");
        std::vector<int> bits(static_cast<std::size_t>(label_count_));
        for (int i = 0; i < label_count_; ++i)
          bits[static_cast<std::size_t>(i)] = static_cast<int>(s[i]);
        return loss_fmeasure(y, LabelVector(std::move(bits)));
      }
      case Route::Owa: {
        // Weight w[i] belongs to the (i+1)-th largest error; on binary
        // inputs this reduces to the error-count shortcut.
        std::vector<double> errors(static_cast<std::size_t>(label_count_));
        for (int i = 0; i < label_count_; ++i)
          errors[static_cast<std::size_t>(i)] = std::abs(s[i] - y[i]);
        std::sort(errors.begin(), errors.end(), std::greater<double>());
        KahanSum acc;
        for (std::size_t i = 0; i < errors.size(); ++i)
          acc.add(owa_->values()[i] * errors[i]);
        return std::clamp(acc.result(), 0.0, 1.0);
      }
      case Route::SortedCapacity:
        return std::clamp(1.0 - choquet_sorted(correctness(y, s), *capacity_),
                          0.0, 1.0);
      case Route::Moebius:
        return std::clamp(1.0 - choquet_moebius(correctness(y, s), *moebius_),
                          0.0, 1.0);
    }
    throw std::logic_error("unreachable");
  }

  // True when the loss of a binary prediction depends on the truth only
  // through the number of wrong labels (all counting-measure routes).
  bool has_binary_table() const { return !binary_table_.empty(); }

  // Loss of any binary prediction with the given number of wrong labels.
  double binary_loss(int error_count) const {
    if (error_count < 0 || error_count > label_count_)
      throw std::invalid_argument("error count out of range");
    if (!has_binary_table())
      throw std::logic_error("loss has no error-count shortcut");
    return binary_table_[static_cast<std::size_t>(error_count)];
  }

 private:
  enum class Route { Hamming, Subset01, FMeasure, Owa, SortedCapacity, Moebius };

  void init(const HammingSpec&) {
    route_ = Route::Hamming;
    fill_hamming_table();
  }
  void init(const Subset01Spec&) {
    route_ = Route::Subset01;
    fill_subset01_table();
  }
  void init(const FMeasureSpec&) { route_ = Route::FMeasure; }
  void init(const PolynomialSpec& s) {
    if (!(s.alpha >= 1.0))
      throw std::invalid_argument("polynomial exponent must be >= 1");
    if (s.alpha == 1.0) {
      route_ = Route::Hamming;
      fill_hamming_table();
      return;
    }
    init_owa(profile_polynomial(label_count_, s.alpha));
  }
  void init(const BinomialSpec& s) {
    if (s.k < 1 || s.k > label_count_)
      throw std::invalid_argument("binomial subset size must be in 1..K");
    if (s.k == 1) {
      route_ = Route::Hamming;
      fill_hamming_table();
      return;
    }
    if (s.k == label_count_) {
      route_ = Route::Subset01;
      fill_subset01_table();
      return;
    }
    init_owa(profile_binomial(label_count_, s.k));
  }
  void init(const CountingSpec& s) {
    if (s.profile.label_count() != label_count_)
      throw std::invalid_argument("profile/label dimensions differ");
    init_owa(s.profile);
  }
  void init(const CapacitySpec& s) {
    if (s.capacity.label_count() != label_count_)
      throw std::invalid_argument("capacity/label dimensions differ");
    route_ = Route::SortedCapacity;
    capacity_ = s.capacity;
  }
  void init(const MoebiusSpec& s) {
    if (s.moebius.label_count() != label_count_)
      throw std::invalid_argument("measure/label dimensions differ");
    route_ = Route::Moebius;
    moebius_ = s.moebius;
  }

  void init_owa(CountingProfile profile) {
    route_ = Route::Owa;
    owa_ = owa_weights(profile);
    binary_table_.resize(static_cast<std::size_t>(label_count_) + 1);
    for (int e = 0; e <= label_count_; ++e)
      binary_table_[static_cast<std::size_t>(e)] =
          1.0 - profile.at_count(label_count_ - e);
  }

  void fill_hamming_table() {
    binary_table_.resize(static_cast<std::size_t>(label_count_) + 1);
    for (int e = 0; e <= label_count_; ++e)
      binary_table_[static_cast<std::size_t>(e)] =
          static_cast<double>(e) / label_count_;
  }

  void fill_subset01_table() {
    binary_table_.assign(static_cast<std::size_t>(label_count_) + 1, 1.0);
    binary_table_.front() = 0.0;
  }

  int label_count_;
  Route route_ = Route::Hamming;
  std::optional<OwaWeights> owa_;
  std::vector<double> binary_table_;
  std::optional<Capacity> capacity_;
  std::optional<MoebiusRepresentation> moebius_;
};

// One-shot evaluation of any loss specification.
inline double loss_value(const LabelVector& y, const ScoreVector& s,
                         const LossSpec& spec) {
  return PreparedLoss(spec, y.label_count()).value(y, s);
}

// Loss of a binary prediction with the given number of wrong labels, as
// the sum of the weights attached to the largest errors.
inline double loss_binary_shortcut(int error_count, const OwaWeights& weights) {
  if (error_count < 0 || error_count > weights.label_count())
    throw std::invalid_argument("error count out of range");
  KahanSum acc;
  for (int i = 0; i < error_count; ++i)
    acc.add(weights.values()[static_cast<std::size_t>(i)]);
  return std::clamp(acc.result(), 0.0, 1.0);
}

}  // namespace cmlc
