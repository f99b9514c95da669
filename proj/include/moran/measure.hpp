#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "moran/bigint.hpp"
#include "moran/expansion.hpp"
#include "moran/system.hpp"

namespace moran {

inline constexpr std::uint64_t kDefaultMaxLevel = 12;

/// The level-n approximation mu_n: Q_n equally weighted atoms
/// numerator / denominator in [0, 1), sorted ascending.
struct AtomicMeasure {
  std::uint64_t level = 0;
  BigInt denominator = 1;
  std::vector<BigInt> numerators;
  Rational weight = 1;

  std::size_t size() const { return numerators.size(); }
  double atom(std::size_t i) const { return to_double(Rational(numerators[i], denominator)); }
};

inline AtomicMeasure level_measure(const MoranSystem& sys, std::uint64_t n,
                                   std::uint64_t max_level = kDefaultMaxLevel) {
  if (n == 0) throw ValidationError("level must be >= 1");
  if (n > max_level) {
    throw ValidationError("level " + std::to_string(n) + " exceeds max level " +
                          std::to_string(max_level));
  }
  AtomicMeasure m;
  m.level = n;
  std::vector<BigInt> cur{BigInt(0)};
  for (std::uint64_t k = 1; k <= n; ++k) {
    const std::uint64_t bk = sys.b(k), qk = sys.q(k);
    std::vector<BigInt> next;
    next.reserve(cur.size() * qk);
    for (const auto& a : cur) {
      BigInt base = a * bk;
      for (std::uint64_t d = 0; d < qk; ++d) next.push_back(base + d);
    }
    cur.swap(next);
    m.denominator *= bk;
  }
  m.numerators = std::move(cur);
  m.weight = Rational(1, BigInt(m.numerators.size()));
  return m;
}

struct FourierValue {
  std::complex<double> value{1.0, 0.0};
  std::uint64_t truncation = 0;
  double tail_bound = 0.0;
};

namespace detail {

/// (1/q) sum_{d<q} exp(-2 pi i d x), with x reduced mod 1 to (-1/2, 1/2].
inline std::complex<double> digit_factor(std::uint64_t q, double x) {
  x -= std::round(x);
  if (x == 0.0) return {1.0, 0.0};
  const double pi = std::numbers::pi;
  double s = std::sin(pi * static_cast<double>(q) * x) / (static_cast<double>(q) * std::sin(pi * x));
  double phase = -pi * static_cast<double>(q - 1) * x;
  return {s * std::cos(phase), s * std::sin(phase)};
}

/// Certified bound on sum_{k>K} |1 - factor_k| given |xi| / B_K.
inline double tail_from_scaled(double scaled_abs) {
  return std::min(2.0, (2.0 / 3.0) * std::numbers::pi * scaled_abs);
}

}  // namespace detail

/// mu-hat at an exact rational frequency, truncated to the first K product factors.
inline FourierValue fourier_transform(const MoranSystem& sys, const Rational& xi, std::uint64_t K) {
  if (K == 0) throw ValidationError("truncation K must be >= 1");
  FourierValue out;
  out.truncation = K;
  if (xi == 0) return out;
  const BigInt num = boost::multiprecision::numerator(xi);
  const BigInt den = boost::multiprecision::denominator(xi);
  BigInt B = 1;
  std::complex<double> v{1.0, 0.0};
  for (std::uint64_t k = 1; k <= K; ++k) {
    B *= sys.b(k);
    const std::uint64_t qk = sys.q(k);
    BigInt modulus = den * B;
    BigInt rem = mod_floor(num, modulus);
    if (rem == 0) continue;
    if ((rem * qk) % modulus == 0) {
      v = {0.0, 0.0};
      continue;  // keep B in step for the tail bound
    }
    v *= detail::digit_factor(qk, to_double(Rational(rem, modulus)));
  }
  out.value = v;
  out.tail_bound = detail::tail_from_scaled(std::abs(to_double(xi / Rational(B))));
  return out;
}

/// Truncated product prod_{k<=K} factor_k(xi + lambda) for real xi and a sparse
/// integer lambda. Uses y_k = (xi + sum_{j<=k} c_j rho_j) / B_k, which obeys
/// y_k = (y_{k-1} + c_k r_k) / b_k and stays O(1).
inline FourierValue partial_product(const MoranSystem& sys, double xi, const RhoExpansion& lambda,
                                    std::uint64_t K) {
  FourierValue out;
  out.truncation = K;
  const double skip_eps = 1e-18 / (std::numbers::pi * static_cast<double>(sys.max_digits()));
  double y = xi;
  std::complex<double> v{1.0, 0.0};
  std::size_t t = 0;
  for (std::uint64_t k = 1; k <= K; ++k) {
    if (std::abs(y) < skip_eps) {
      // every factor between here and the next term equals 1 to double precision
      std::uint64_t next = t < lambda.terms.size() ? lambda.terms[t].position : K + 1;
      if (next > K) {
        y = 0.0;
        break;
      }
      if (next > k) {
        y = 0.0;
        k = next;
      }
    }
    double c = 0.0;
    if (t < lambda.terms.size() && lambda.terms[t].position == k) {
      c = static_cast<double>(lambda.terms[t].coeff);
      ++t;
    }
    y = (y + c * static_cast<double>(sys.r(k))) / static_cast<double>(sys.b(k));
    v *= detail::digit_factor(sys.q(k), y);
  }
  out.value = v;
  out.tail_bound = detail::tail_from_scaled(std::abs(y));
  return out;
}

/// mu-hat(xi + lambda) with `extra` factors beyond the top scale of lambda.
inline FourierValue fourier_at_point(const MoranSystem& sys, double xi, const RhoExpansion& lambda,
                                     std::uint64_t extra) {
  std::uint64_t level = 0;
  double ax = std::abs(xi);
  for (double scale = 1.0; ax >= scale; ++level) scale *= static_cast<double>(sys.b(level + 1));
  return partial_product(sys, xi, lambda, std::max(level, lambda.top_position()) + extra);
}

/// Direct atomic sum (1/Q_n) sum_a exp(-2 pi i a xi) over mu_n.
inline std::complex<double> atomic_fourier(const AtomicMeasure& m, const Rational& xi) {
  const BigInt num = boost::multiprecision::numerator(xi);
  const BigInt den = boost::multiprecision::denominator(xi);
  const BigInt modulus = den * m.denominator;
  std::complex<double> acc{0.0, 0.0};
  for (const auto& a : m.numerators) {
    double x = to_double(Rational(mod_floor(a * num, modulus), modulus));
    double ph = -2.0 * std::numbers::pi * x;
    acc += std::complex<double>(std::cos(ph), std::sin(ph));
  }
  return acc / static_cast<double>(m.size());
}

struct ZeroSetWitness {
  bool member = false;
  std::optional<std::uint64_t> level;  // smallest k with xi in B_k r_{k+1} (Z \ q_{k+1} Z)
};

/// Exact membership of a non-zero integer in Z(mu-hat) = U_k B_k r_{k+1} (Z \ q_{k+1} Z).
/// With v = max{k : B_k | xi} and u = xi / B_v, xi is a member iff r_{v+1} | u.
inline ZeroSetWitness zero_set_member(const MoranSystem& sys, const BigInt& xi) {
  if (xi == 0) throw ValidationError("zero_set_member needs xi != 0");
  BigInt u = boost::multiprecision::abs(xi);
  std::uint64_t k = 0;
  while (u % sys.b(k + 1) == 0) {
    u /= sys.b(k + 1);
    ++k;
  }
  if (u % sys.r(k + 1) == 0) return {true, k};
  return {false, std::nullopt};
}

/// Same test on a sparse difference sum_j d_j rho_j, by carrying through the
/// mixed radix b_1, b_2, ... without forming the integer.
inline ZeroSetWitness zero_set_member(const MoranSystem& sys, const RhoExpansion& diff) {
  if (diff.is_zero()) throw ValidationError("zero_set_member needs xi != 0");
  std::int64_t carry = 0;
  std::size_t t = 0;
  std::uint64_t p = diff.terms.front().position;
  for (;;) {
    std::int64_t val = carry;
    if (t < diff.terms.size() && diff.terms[t].position == p) {
      val += diff.terms[t].coeff * static_cast<std::int64_t>(sys.r(p));
      ++t;
    }
    const auto bp = static_cast<std::int64_t>(sys.b(p));
    if (val % bp != 0) {
      if (val % static_cast<std::int64_t>(sys.r(p)) == 0) return {true, p - 1};
      return {false, std::nullopt};
    }
    carry = val / bp;
    if (carry == 0) {
      if (t == diff.terms.size()) throw ValidationError("zero_set_member needs xi != 0");
      p = diff.terms[t].position;
    } else {
      ++p;
    }
  }
}

struct SupportBound {
  Rational partial_sum;  // sum_{j<=T} (q_{k+j}-1) / (b_{k+1}...b_{k+j})
  Rational tail;         // certified bound on the remaining terms
  Rational bound;        // partial_sum + tail
  bool below_one = false;
};

/// Upper bound on max(B_k supp mu mod 1) = sum_{j>=1} (q_{k+j}-1) / (b_{k+1}...b_{k+j}).
inline SupportBound scaled_support_max(const MoranSystem& sys, std::uint64_t k,
                                       std::uint64_t tail_terms) {
  if (tail_terms == 0) throw ValidationError("tail_terms must be >= 1");
  SupportBound out;
  BigInt prod = 1;
  for (std::uint64_t j = 1; j <= tail_terms; ++j) {
    prod *= sys.b(k + j);
    out.partial_sum += Rational(BigInt(sys.q(k + j) - 1), prod);
  }
  // each later term is at most c / (prod * bmin^(i-1)), c = sup (q-1)/b <= min(1/2, (qmax-1)/bmin)
  const Rational bmin(BigInt(sys.min_base()));
  Rational c(BigInt(sys.max_digits() - 1), BigInt(sys.min_base()));
  if (c > Rational(1, 2)) c = Rational(1, 2);
  out.tail = c * bmin / (bmin - 1) / Rational(prod);
  out.bound = out.partial_sum + out.tail;
  out.below_one = out.bound < 1;
  return out;
}

struct ProbeRow {
  std::uint64_t k = 0;
  double magnitude = 0.0;
  double tail_bound = 0.0;
};

/// |mu-hat(B_k)| for k = 0..k_max, each with k + K_extra factors.
inline std::vector<ProbeRow> fourier_nondecay_probe(const MoranSystem& sys, std::uint64_t k_max,
                                                    std::uint64_t K_extra) {
  if (k_max == 0) throw ValidationError("k_max must be >= 1");
  std::vector<ProbeRow> rows;
  BigInt B = 1;
  for (std::uint64_t k = 0; k <= k_max; ++k) {
    if (k > 0) B *= sys.b(k);
    auto f = fourier_transform(sys, Rational(B), std::max<std::uint64_t>(1, k + K_extra));
    rows.push_back({k, std::abs(f.value), f.tail_bound});
  }
  return rows;
}

}  // namespace moran
