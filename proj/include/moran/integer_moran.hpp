#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "moran/bigint.hpp"
#include "moran/sequence.hpp"
#include "moran/system.hpp"
#include "moran/thinning.hpp"

namespace moran {

/// Data ({n_k}, {m_k}, {t_k}) of an integer Moran set
///   M_k = { sum_{i<=k} x_i t_i n_1...n_{i-1} : 0 <= x_i < m_i }.
struct IntegerMoranData {
  SequenceSpec n;
  SequenceSpec m;
  SequenceSpec t;
  std::optional<std::uint64_t> known_depth;  // set when the rules are only meaningful up to here

  bool eventually_periodic() const {
    return !known_depth && n.eventually_periodic() && m.eventually_periodic() &&
           t.eventually_periodic();
  }

  void require_depth(std::uint64_t depth) const {
    if (known_depth && depth > *known_depth) {
      throw ValidationError("data known to depth " + std::to_string(*known_depth) + " only, " +
                            std::to_string(depth) + " requested");
    }
  }
};

/// ({b_k}, {q_k}, {r_k}): the canonical spectrum as an integer Moran set.
inline IntegerMoranData canonical_data(const MoranSystem& sys, std::uint64_t depth) {
  std::vector<std::uint64_t> r;
  for (std::uint64_t k = 1; k <= depth + 1; ++k) r.push_back(sys.r(k));
  if (sys.eventually_periodic()) {
    auto [pre, per] = sys.joint_period();
    std::vector<std::uint64_t> pr, pe;
    for (std::uint64_t k = 1; k <= pre; ++k) pr.push_back(sys.r(k));
    for (std::uint64_t k = pre + 1; k <= pre + per; ++k) pe.push_back(sys.r(k));
    return {sys.b_spec(), sys.q_spec(), SequenceSpec::prefix_then_periodic(pr, pe), std::nullopt};
  }
  return {sys.b_spec(), sys.q_spec(), SequenceSpec::prefix_then_periodic(r, {1}), depth};
}

/// ({b_k}, {q'_k}, {r_k}) for a thinning. q' is known to `th.depth` only and
/// is continued by 1 beyond it.
inline IntegerMoranData thinned_data(const MoranSystem& sys, const ThinnedDigits& th) {
  auto base = canonical_data(sys, th.depth + 1);
  return {base.n, SequenceSpec::prefix_then_periodic(th.qprime, {1}), base.t, th.depth};
}

struct CfdResult {
  bool ok = true;
  std::optional<std::uint64_t> first_failure;  // smallest k where the inequality fails
  BigInt lhs;                                  // t_{k+1} n_1...n_k at the failure
  BigInt rhs;                                  // sum_{i<=k} (m_i-1) t_i n_1...n_{i-1}
};

/// t_{k+1} n_1...n_k > sum_{i<=k} (m_i - 1) t_i n_1...n_{i-1} for k = 1..depth.
inline CfdResult validate_cfd(const IntegerMoranData& d, std::uint64_t depth) {
  if (depth == 0) throw ValidationError("depth must be >= 1");
  CfdResult res;
  BigInt N = 1, J = 0;
  for (std::uint64_t k = 1; k <= depth; ++k) {
    J += BigInt(d.m.at(k) - 1) * d.t.at(k) * N;
    N *= d.n.at(k);
    BigInt lhs = BigInt(d.t.at(k + 1)) * N;
    if (lhs <= J) {
      res.ok = false;
      res.first_failure = k;
      res.lhs = lhs;
      res.rhs = J;
      return res;
    }
  }
  return res;
}

/// Sorted M_k. Each point is kept once per digit tuple, so the size is m_1...m_k.
inline std::vector<BigInt> integer_moran_set(const IntegerMoranData& d, std::uint64_t depth,
                                             std::uint64_t max_points = 1U << 22) {
  if (depth == 0) throw ValidationError("depth must be >= 1");
  d.require_depth(depth);
  auto cfd = validate_cfd(d, depth > 1 ? depth - 1 : 1);
  if (depth > 1 && !cfd.ok) {
    throw ValidationError("separation condition fails at k=" + std::to_string(*cfd.first_failure) +
                          ": " + to_string(cfd.lhs) + " <= " + to_string(cfd.rhs));
  }
  std::uint64_t count = 1;
  for (std::uint64_t k = 1; k <= depth; ++k) {
    count *= d.m.at(k);
    if (count > max_points) throw ValidationError("integer Moran set exceeds point limit");
  }
  std::vector<BigInt> pts{BigInt(0)};
  BigInt N = 1;
  for (std::uint64_t k = 1; k <= depth; ++k) {
    const BigInt step = BigInt(d.t.at(k)) * N;
    std::vector<BigInt> next;
    next.reserve(pts.size() * d.m.at(k));
    for (std::uint64_t x = 0; x < d.m.at(k); ++x) {
      const BigInt off = step * x;
      for (const auto& p : pts) next.push_back(p + off);
    }
    pts.swap(next);
    N *= d.n.at(k);
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace moran
