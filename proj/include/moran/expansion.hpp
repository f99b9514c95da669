#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "moran/bigint.hpp"
#include "moran/system.hpp"

namespace moran {

/// Sparse integer written over the scales rho_j = r_j b_1 ... b_{j-1}:
/// value = sum_j coeff_j * rho_j, positions strictly increasing, coefficients
/// non-zero. Every spectrum point built here has this shape, and the shape
/// lets exact zero-set tests and Fourier products skip empty positions even
/// when the value itself has millions of bits.
struct RhoExpansion {
  struct Term {
    std::uint64_t position;
    std::int64_t coeff;
    friend bool operator==(const Term&, const Term&) = default;
  };

  std::vector<Term> terms;

  void add(std::uint64_t position, std::int64_t coeff) {
    if (coeff == 0) return;
    if (!terms.empty() && terms.back().position >= position) {
      throw ValidationError("RhoExpansion terms must be added in increasing position order");
    }
    terms.push_back({position, coeff});
  }

  bool is_zero() const { return terms.empty(); }
  std::uint64_t top_position() const { return terms.empty() ? 0 : terms.back().position; }

  BigInt to_bigint(const Ladder& ladder) const {
    BigInt v = 0;
    for (const auto& t : terms) v += ladder.rho(t.position) * t.coeff;
    return v;
  }

  friend bool operator==(const RhoExpansion&, const RhoExpansion&) = default;
};

/// Coefficient-wise difference a - b (not normalized; coefficients may exceed digit ranges).
inline RhoExpansion difference(const RhoExpansion& a, const RhoExpansion& b) {
  RhoExpansion d;
  std::size_t i = 0, j = 0;
  while (i < a.terms.size() || j < b.terms.size()) {
    if (j == b.terms.size() || (i < a.terms.size() && a.terms[i].position < b.terms[j].position)) {
      d.terms.push_back(a.terms[i++]);
    } else if (i == a.terms.size() || b.terms[j].position < a.terms[i].position) {
      d.terms.push_back({b.terms[j].position, -b.terms[j].coeff});
      ++j;
    } else {
      std::int64_t c = a.terms[i].coeff - b.terms[j].coeff;
      if (c != 0) d.terms.push_back({a.terms[i].position, c});
      ++i;
      ++j;
    }
  }
  return d;
}

/// c * a, coefficient-wise.
inline RhoExpansion scaled(const RhoExpansion& a, std::int64_t c) {
  RhoExpansion out;
  if (c == 0) return out;
  out.terms = a.terms;
  for (auto& t : out.terms) t.coeff *= c;
  return out;
}

/// Exact sign of sum_j c_j rho_j for arbitrary integer coefficients.
/// Rewrites the value in the mixed radix b_1, b_2, ... with floor carries;
/// a carry that settles at -1 past the top term means a negative value.
inline int sign(const MoranSystem& sys, const RhoExpansion& a) {
  if (a.is_zero()) return 0;
  std::int64_t carry = 0;
  bool nonzero_digit = false;
  std::size_t t = 0;
  std::uint64_t p = a.terms.front().position;
  for (;;) {
    std::int64_t val = carry;
    if (t < a.terms.size() && a.terms[t].position == p) {
      val += a.terms[t].coeff * static_cast<std::int64_t>(sys.r(p));
      ++t;
    }
    const auto bp = static_cast<std::int64_t>(sys.b(p));
    std::int64_t q = val / bp, rem = val % bp;
    if (rem < 0) {
      rem += bp;
      --q;
    }
    if (rem != 0) nonzero_digit = true;
    carry = q;
    if (t == a.terms.size()) {
      if (carry == 0) return nonzero_digit ? 1 : 0;
      if (carry == -1) return -1;
      ++p;
      continue;
    }
    // an empty stretch leaves carries 0 and -1 unchanged
    if (carry == 0 || carry == -1) {
      if (carry == -1 && a.terms[t].position > p + 1) nonzero_digit = true;
      p = a.terms[t].position;
    } else {
      ++p;
    }
  }
}

inline int compare(const MoranSystem& sys, const RhoExpansion& a, const RhoExpansion& b) {
  return sign(sys, difference(a, b));
}

}  // namespace moran
