#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "moran/bigint.hpp"
#include "moran/mixed_radix.hpp"
#include "moran/system.hpp"

namespace moran {

inline constexpr std::uint64_t kDefaultThinningDepth = 256;

/// A target dimension held as an exact rational (parsed from a decimal literal).
struct Target {
  Rational value;
  std::string text;

  static Target parse(const std::string& decimal) { return {parse_decimal(decimal), decimal}; }
  static Target exact(Rational r) { return {r, r.str()}; }
  double approx() const { return to_double(value); }
};

/// Sign of log(P)/log(R) - t for integers P >= 1, R >= 2, decided exactly.
/// A double estimate settles clear cases; near-ties fall back to comparing
/// P^den against R^num.
inline int compare_log_ratio(const BigInt& P, const BigInt& R, const Rational& t) {
  const BigInt num = boost::multiprecision::numerator(t);
  const BigInt den = boost::multiprecision::denominator(t);
  const double lp = P == 1 ? 0.0 : log_abs(P);
  const double lr = log_abs(R);
  const double dn = num.convert_to<double>(), dd = den.convert_to<double>();
  const double diff = dd * lp - dn * lr;
  const double scale = dd * lp + std::abs(dn) * lr;
  if (std::abs(diff) > 1e-9 * scale + 1e-300) return diff > 0 ? 1 : -1;
  if (num < 0) return 1;
  if (den > std::numeric_limits<unsigned>::max() || num > std::numeric_limits<unsigned>::max()) {
    throw ValidationError("target precision too high for an exact tie-break");
  }
  const BigInt lhs = pow_big(P, den.convert_to<unsigned>());
  const BigInt rhs = pow_big(R, num.convert_to<unsigned>());
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

/// Digit counts q'_k in {1, ..., q_k} whose prefix ratios
/// log(q'_1...q'_k) / log(b_1...b_k) have limsup t, with checkpoints k_j where
/// the ratio is <= t while appending q_{k_j + 1} pushes it above t.
struct ThinnedDigits {
  Target target;
  std::vector<std::uint64_t> qprime;  // qprime[k-1] = q'_k
  std::vector<std::uint64_t> checkpoints;
  std::uint64_t depth = 0;

  std::uint64_t at(std::uint64_t k) const {
    if (k == 0 || k > depth) {
      throw ValidationError("thinned digits requested at position " + std::to_string(k) +
                            " beyond validated depth " + std::to_string(depth));
    }
    return qprime[k - 1];
  }

  /// Prefix ratios log(q'_1...q'_k) / log(B_k) for k = 1..depth.
  std::vector<double> prefix_ratios(const MoranSystem& sys) const {
    std::vector<double> out;
    double lp = 0.0, lb = 0.0;
    for (std::uint64_t k = 1; k <= depth; ++k) {
      lp += std::log(static_cast<double>(qprime[k - 1]));
      lb += std::log(static_cast<double>(sys.b(k)));
      out.push_back(lp / lb);
    }
    return out;
  }
};

/// Exact strict test t < upper entropy dimension. For eventually periodic
/// systems the limit is compared exactly over one joint period; otherwise
/// against the sampled limsup at `depth`.
inline bool below_upper_entropy(const MoranSystem& sys, const Rational& t, std::uint64_t depth) {
  if (sys.eventually_periodic()) {
    auto [pre, per] = sys.joint_period();
    BigInt P = 1, R = 1;
    for (std::uint64_t k = pre + 1; k <= pre + per; ++k) {
      P *= sys.q(k);
      R *= sys.b(k);
    }
    return compare_log_ratio(P, R, t) > 0;
  }
  return to_double(t) < upper_entropy_dim(sys, depth).value;
}

/// Greedy thinning. Position 1 is set to 1; afterwards q_i is kept while the
/// prefix ratio stays <= t and replaced by 1 otherwise. When a kept q_i leaves
/// the ratio <= t but q_{i+1} would push it above t, i is a checkpoint and
/// q_{i+1} is kept as well. All comparisons are exact.
inline ThinnedDigits thin_digits(const MoranSystem& sys, const Target& t,
                                 std::uint64_t depth = kDefaultThinningDepth) {
  if (depth < 2) throw ValidationError("thinning depth must be >= 2");
  if (t.value <= 0) throw ValidationError("target must be > 0");
  if (!below_upper_entropy(sys, t.value, std::max<std::uint64_t>(depth, 64))) {
    throw ValidationError("target " + t.text + " is not strictly below the upper entropy dimension");
  }
  ThinnedDigits out;
  out.target = t;
  out.depth = depth;
  out.qprime.assign(depth, 1);

  BigInt P = 1, B = 1;
  auto checkpoint_at = [&](std::uint64_t i) {
    // ratio through i is already <= t; does appending q_{i+1} exceed it?
    if (i >= depth) return;
    BigInt P2 = P * sys.q(i + 1), B2 = B * sys.b(i + 1);
    if (compare_log_ratio(P2, B2, t.value) > 0) {
      out.checkpoints.push_back(i);
      out.qprime[i] = sys.q(i + 1);
    }
  };

  B *= sys.b(1);
  checkpoint_at(1);
  for (std::uint64_t i = 2; i <= depth; ++i) {
    const bool forced = !out.checkpoints.empty() && out.checkpoints.back() + 1 == i;
    if (forced) {
      P *= sys.q(i);
      B *= sys.b(i);
      continue;
    }
    BigInt P2 = P * sys.q(i);
    B *= sys.b(i);
    if (compare_log_ratio(P2, B, t.value) <= 0) {
      P = std::move(P2);
      out.qprime[i - 1] = sys.q(i);
      checkpoint_at(i);
    }
  }
  return out;
}

/// Membership in Gamma_t: every digit of n satisfies sigma_j < q'_j.
inline bool in_gamma(const MoranSystem& sys, const ThinnedDigits& th, std::uint64_t n) {
  if (n == 0) return false;
  auto w = encode_index(sys, n);
  for (std::size_t j = 0; j < w.digits.size(); ++j) {
    if (w.digits[j] >= th.at(j + 1)) return false;
  }
  return true;
}

/// #(Gamma_t intersected with [1, n]) by a digit walk from the top position.
inline std::uint64_t count_gamma_upto(const MoranSystem& sys, const ThinnedDigits& th,
                                      std::uint64_t n) {
  if (n == 0) return 0;
  auto w = encode_index(sys, n);
  const std::size_t k = w.digits.size();
  std::vector<std::uint64_t> free_below(k + 1, 1);  // prod_{i<j} q'_i
  for (std::size_t j = 1; j <= k; ++j) free_below[j] = free_below[j - 1] * th.at(j);
  std::uint64_t count = 0;
  bool tight = true;
  for (std::size_t j = k; j >= 1 && tight; --j) {
    const std::uint64_t dj = w.digits[j - 1];
    const std::uint64_t lim = th.at(j);
    count += std::min(dj, lim) * free_below[j - 1];
    if (dj >= lim) tight = false;
  }
  if (tight) ++count;  // n itself
  return count - 1;    // drop 0
}

struct GammaSplit {
  std::vector<std::uint64_t> in;
  std::vector<std::uint64_t> out;
};

inline GammaSplit gamma_index_set(const MoranSystem& sys, const ThinnedDigits& th, std::uint64_t N) {
  if (N == 0) throw ValidationError("N must be >= 1");
  GammaSplit split;
  for (std::uint64_t n = 1; n <= N; ++n) (in_gamma(sys, th, n) ? split.in : split.out).push_back(n);
  return split;
}

}  // namespace moran
