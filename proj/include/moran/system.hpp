#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "moran/bigint.hpp"
#include "moran/sequence.hpp"

namespace moran {

inline constexpr std::uint64_t kDefaultValidationDepth = 64;
inline constexpr double kDefaultTolerance = 1e-9;

/// A pair of base/digit-count sequences {b_n}, {q_n} with D_n = {0, ..., q_n - 1}.
///
/// Invariants, checked at construction on a finite prefix (and on one full
/// joint period when both rules are eventually periodic):
///   2 <= q_n < b_n,  q_n | b_n,  r_n = b_n / q_n >= 2,  b_n <= M.
class MoranSystem {
 public:
  MoranSystem(SequenceSpec b, SequenceSpec q, std::string name = {},
              std::uint64_t validation_depth = kDefaultValidationDepth)
      : b_(std::move(b)), q_(std::move(q)), name_(std::move(name)) {
    bound_ = b_.max_value();
    validate(validation_depth);
  }

  std::uint64_t b(std::uint64_t n) const { return b_.at(n); }
  std::uint64_t q(std::uint64_t n) const { return q_.at(n); }
  std::uint64_t r(std::uint64_t n) const { return b_.at(n) / q_.at(n); }
  std::uint64_t bound() const { return bound_; }
  std::uint64_t min_base() const { return b_.min_value(); }
  std::uint64_t max_digits() const { return q_.max_value(); }
  const SequenceSpec& b_spec() const { return b_; }
  const SequenceSpec& q_spec() const { return q_; }
  const std::string& name() const { return name_; }

  bool eventually_periodic() const { return b_.eventually_periodic() && q_.eventually_periodic(); }

  /// Common (preperiod, period) of both rules.
  std::pair<std::uint64_t, std::uint64_t> joint_period() const {
    auto [pb, lb] = b_.periodic_shape();
    auto [pq, lq] = q_.periodic_shape();
    return {std::max(pb, pq), std::lcm(lb, lq)};
  }

 private:
  void check_index(std::uint64_t n) const {
    std::uint64_t bn = b(n);
    std::uint64_t qn = q(n);
    auto where = " at n=" + std::to_string(n);
    if (qn < 2) throw ValidationError("q_n < 2" + where);
    if (qn >= bn) throw ValidationError("q_n >= b_n" + where);
    if (bn % qn != 0) {
      throw ValidationError("q_n = " + std::to_string(qn) + " does not divide b_n = " +
                            std::to_string(bn) + where);
    }
    if (bn / qn < 2) throw ValidationError("r_n < 2" + where);
  }

  void validate(std::uint64_t depth) const {
    if (auto declared = b_.declared_bound(); declared && bound_ > *declared) {
      throw ValidationError("b_n exceeds declared bound M");
    }
    std::uint64_t horizon = depth;
    if (eventually_periodic()) {
      auto [pre, per] = joint_period();
      if (pre + per <= 1'000'000) horizon = std::max(horizon, pre + per);
    }
    for (std::uint64_t n = 1; n <= horizon; ++n) check_index(n);
  }

  SequenceSpec b_;
  SequenceSpec q_;
  std::string name_;
  std::uint64_t bound_ = 0;
};

inline MoranSystem build_system(const SequenceSpec& b_spec, const SequenceSpec& q_spec,
                                std::string name = {},
                                std::uint64_t validation_depth = kDefaultValidationDepth) {
  return MoranSystem(b_spec, q_spec, std::move(name), validation_depth);
}

/// Convenience for constant sequences b_n = b, q_n = q.
inline MoranSystem constant_system(std::uint64_t b, std::uint64_t q) {
  return MoranSystem(SequenceSpec::constant(b), SequenceSpec::constant(q));
}

struct ScaleTriple {
  BigInt B;    // b_1 ... b_k
  BigInt Q;    // q_1 ... q_k
  BigInt rho;  // r_k b_1 ... b_{k-1}
};

inline ScaleTriple scale_ladder(const MoranSystem& sys, std::uint64_t k) {
  if (k == 0) throw ValidationError("scale_ladder needs k >= 1");
  BigInt B = 1, Q = 1;
  for (std::uint64_t j = 1; j < k; ++j) {
    B *= sys.b(j);
    Q *= sys.q(j);
  }
  BigInt rho = B * sys.r(k);
  B *= sys.b(k);
  Q *= sys.q(k);
  return {B, Q, rho};
}

/// Cached B_k, Q_k, rho_k for k = 0..depth (index 0: B_0 = Q_0 = 1, rho_0 = 0).
class Ladder {
 public:
  Ladder(const MoranSystem& sys, std::uint64_t depth) {
    B_.reserve(depth + 1);
    Q_.reserve(depth + 1);
    rho_.reserve(depth + 1);
    B_.emplace_back(1);
    Q_.emplace_back(1);
    rho_.emplace_back(0);
    for (std::uint64_t k = 1; k <= depth; ++k) {
      rho_.push_back(B_.back() * sys.r(k));
      B_.push_back(B_.back() * sys.b(k));
      Q_.push_back(Q_.back() * sys.q(k));
    }
  }

  std::uint64_t depth() const { return B_.size() - 1; }
  const BigInt& B(std::uint64_t k) const { return B_.at(k); }
  const BigInt& Q(std::uint64_t k) const { return Q_.at(k); }
  const BigInt& rho(std::uint64_t k) const { return rho_.at(k); }

 private:
  std::vector<BigInt> B_;
  std::vector<BigInt> Q_;
  std::vector<BigInt> rho_;
};

enum class LimitMode { limsup, liminf };

/// A dimension given as an upper or lower limit of prefix ratios.
///
/// `sampled` is the tail extremum (max for limsup, min for liminf) over the
/// second half of the sampled depths; `exact` is present when the underlying
/// sequences are eventually periodic and the limit is known in closed form.
/// `value` is `exact` when available, otherwise `sampled`.
struct DimensionReport {
  double value = 0.0;
  double sampled = 0.0;
  std::optional<double> exact;
  std::vector<std::pair<std::uint64_t, double>> prefix_samples;
  LimitMode mode = LimitMode::limsup;
  double tail_max = 0.0;
  double tail_min = 0.0;
  bool converged = false;
  double tolerance = kDefaultTolerance;
};

namespace detail {

inline DimensionReport summarize_ratios(std::vector<std::pair<std::uint64_t, double>> samples,
                                        LimitMode mode, std::optional<double> exact,
                                        double tolerance) {
  DimensionReport rep;
  rep.mode = mode;
  rep.exact = exact;
  rep.tolerance = tolerance;
  std::size_t start = samples.size() / 2;
  double hi = -1.0, lo = 2.0;
  for (std::size_t i = start; i < samples.size(); ++i) {
    hi = std::max(hi, samples[i].second);
    lo = std::min(lo, samples[i].second);
  }
  rep.tail_max = hi;
  rep.tail_min = lo;
  rep.sampled = mode == LimitMode::limsup ? hi : lo;
  rep.value = exact ? *exact : rep.sampled;
  if (exact) {
    rep.converged = std::abs(rep.sampled - *exact) <= tolerance;
  } else {
    // last quarter must be flat
    std::size_t q0 = samples.size() - std::max<std::size_t>(1, samples.size() / 4);
    double qhi = -1.0, qlo = 2.0;
    for (std::size_t i = q0; i < samples.size(); ++i) {
      qhi = std::max(qhi, samples[i].second);
      qlo = std::min(qlo, samples[i].second);
    }
    rep.converged = (qhi - qlo) <= tolerance;
  }
  rep.prefix_samples = std::move(samples);
  return rep;
}

/// log Q_k / log B_k for k = 1..depth, computed with running log sums.
inline std::vector<std::pair<std::uint64_t, double>> prefix_ratios(const MoranSystem& sys,
                                                                   std::uint64_t depth) {
  std::vector<std::pair<std::uint64_t, double>> out;
  out.reserve(depth);
  double lq = 0.0, lb = 0.0;
  for (std::uint64_t k = 1; k <= depth; ++k) {
    lq += std::log(static_cast<double>(sys.q(k)));
    lb += std::log(static_cast<double>(sys.b(k)));
    out.emplace_back(k, lq / lb);
  }
  return out;
}

/// Limit of log Q_k / log B_k over one joint period (both limits coincide).
inline std::optional<double> periodic_ratio_limit(const MoranSystem& sys) {
  if (!sys.eventually_periodic()) return std::nullopt;
  auto [pre, per] = sys.joint_period();
  double lq = 0.0, lb = 0.0;
  for (std::uint64_t k = pre + 1; k <= pre + per; ++k) {
    lq += std::log(static_cast<double>(sys.q(k)));
    lb += std::log(static_cast<double>(sys.b(k)));
  }
  return lq / lb;
}

}  // namespace detail

/// Upper entropy dimension: limsup_k log(q_1...q_k) / log(b_1...b_k).
inline DimensionReport upper_entropy_dim(const MoranSystem& sys, std::uint64_t depth,
                                         double tolerance = kDefaultTolerance) {
  if (depth == 0) throw ValidationError("depth must be >= 1");
  return detail::summarize_ratios(detail::prefix_ratios(sys, depth), LimitMode::limsup,
                                  detail::periodic_ratio_limit(sys), tolerance);
}

/// Hausdorff dimension of the support: the matching liminf (valid under a finite bound M).
inline DimensionReport hausdorff_support_dim(const MoranSystem& sys, std::uint64_t depth,
                                             double tolerance = kDefaultTolerance) {
  if (depth == 0) throw ValidationError("depth must be >= 1");
  return detail::summarize_ratios(detail::prefix_ratios(sys, depth), LimitMode::liminf,
                                  detail::periodic_ratio_limit(sys), tolerance);
}

}  // namespace moran
