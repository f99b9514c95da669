#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "moran/bigint.hpp"
#include "moran/expansion.hpp"
#include "moran/measure.hpp"
#include "moran/parallel.hpp"
#include "moran/shifts.hpp"
#include "moran/spectrum.hpp"
#include "moran/system.hpp"

namespace moran {

inline constexpr double kUnitarityThreshold = 1e-9;
inline constexpr std::size_t kMaxMatrixDim = 1024;
inline constexpr std::size_t kMaxStoredFailures = 100;

/// Decimal text for small points, a rho-sum description otherwise.
inline std::string describe(const MoranSystem& sys, const RhoExpansion& e) {
  if (e.top_position() <= 4096) return to_string(e.to_bigint(Ladder(sys, e.top_position())));
  std::string s;
  for (const auto& t : e.terms) {
    if (!s.empty()) s += " + ";
    s += std::to_string(t.coeff) + "*rho_" + std::to_string(t.position);
  }
  return s;
}

struct OrthFailure {
  std::size_t i = 0, j = 0;  // positions in the input list
  std::string a, b, difference;
};

struct OrthogonalityReport {
  std::uint64_t pairs_checked = 0;
  std::uint64_t failure_count = 0;
  std::vector<OrthFailure> failures;  // first kMaxStoredFailures in (i, j) order
  bool exact = true;
  bool ok() const { return failure_count == 0; }
};

namespace detail {

template <class Point, class Test, class Describe>
OrthogonalityReport pairwise_run(const std::vector<Point>& pts, Test&& member, Describe&& desc) {
  if (pts.size() < 2) throw ValidationError("need at least 2 points");
  std::vector<std::vector<std::size_t>> bad(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (!member(pts[i], pts[j])) bad[i].push_back(j);
    }
  });
  OrthogonalityReport rep;
  const auto n = static_cast<std::uint64_t>(pts.size());
  rep.pairs_checked = n * (n - 1) / 2;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j : bad[i]) {
      ++rep.failure_count;
      if (rep.failures.size() < kMaxStoredFailures) {
        auto [a, b, d] = desc(pts[i], pts[j]);
        rep.failures.push_back({i, j, a, b, d});
      }
    }
  }
  return rep;
}

}  // namespace detail

/// Every difference of two distinct points must lie in Z(mu-hat). Exact.
inline OrthogonalityReport pairwise_orthogonal(const MoranSystem& sys, const std::vector<BigInt>& points) {
  auto sorted = points;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("duplicate point " + to_string(*std::adjacent_find(sorted.begin(), sorted.end())));
  }
  return detail::pairwise_run(
      points, [&](const BigInt& a, const BigInt& b) { return zero_set_member(sys, a - b).member; },
      [](const BigInt& a, const BigInt& b) {
        return std::tuple{to_string(a), to_string(b), to_string(BigInt(a - b))};
      });
}

/// Sparse variant; differences are never formed as integers.
inline OrthogonalityReport pairwise_orthogonal(const MoranSystem& sys,
                                               const std::vector<RhoExpansion>& points) {
  return detail::pairwise_run(
      points,
      [&](const RhoExpansion& a, const RhoExpansion& b) {
        auto d = difference(a, b);
        if (d.is_zero() || sign(sys, d) == 0) {
          throw ValidationError("duplicate point " + describe(sys, a));
        }
        return zero_set_member(sys, d).member;
      },
      [&](const RhoExpansion& a, const RhoExpansion& b) {
        return std::tuple{describe(sys, a), describe(sys, b), describe(sys, difference(a, b))};
      });
}

struct UnitarityReport {
  std::size_t matrix_dim = 0;
  double max_offdiag = 0.0;
  double max_diag_dev = 0.0;
  bool exact_residue_pass = false;
  bool ok(double threshold = kUnitarityThreshold) const {
    return exact_residue_pass && max_offdiag <= threshold && max_diag_dev <= threshold;
  }
};

namespace detail {

/// Gram deviations of the columns of a square matrix stored row-major.
inline void gram_deviation(const std::vector<std::complex<double>>& M, std::size_t dim,
                           UnitarityReport& rep) {
  std::vector<double> offd(dim, 0.0), diag(dim, 0.0);
  parallel_for(dim, [&](std::size_t i) {
    for (std::size_t j = i; j < dim; ++j) {
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t r = 0; r < dim; ++r) acc += std::conj(M[r * dim + i]) * M[r * dim + j];
      if (i == j) {
        diag[i] = std::abs(acc.real() - 1.0) + std::abs(acc.imag());
      } else {
        offd[i] = std::max(offd[i], std::abs(acc));
      }
    }
  });
  rep.max_offdiag = *std::max_element(offd.begin(), offd.end());
  rep.max_diag_dev = *std::max_element(diag.begin(), diag.end());
}

}  // namespace detail

/// (b_k^{-1} D_k, w_k r_k D_k) as a compatible pair: the q_k x q_k matrix
/// (1/sqrt q_k) exp(-2 pi i d w_k r_k l / b_k) is unitary.
inline UnitarityReport compatible_pair_check(const MoranSystem& sys, std::uint64_t k, int w) {
  if (k == 0) throw ValidationError("level must be >= 1");
  if (w != 1 && w != -1) throw ValidationError("w must be +1 or -1");
  const std::int64_t q = static_cast<std::int64_t>(sys.q(k));
  const std::int64_t b = static_cast<std::int64_t>(sys.b(k));
  const std::int64_t r = static_cast<std::int64_t>(sys.r(k));
  UnitarityReport rep;
  rep.matrix_dim = static_cast<std::size_t>(q);
  rep.exact_residue_pass = true;
  for (std::int64_t l = 0; l < q; ++l) {
    for (std::int64_t l2 = 0; l2 < q; ++l2) {
      if (l == l2) continue;
      std::int64_t x = ((w * r * (l - l2)) % b + b) % b;
      if (x == 0 || (q * x) % b != 0) rep.exact_residue_pass = false;
    }
  }
  std::vector<std::complex<double>> M(static_cast<std::size_t>(q * q));
  const double scale = 1.0 / std::sqrt(static_cast<double>(q));
  for (std::int64_t d = 0; d < q; ++d) {
    for (std::int64_t l = 0; l < q; ++l) {
      std::int64_t ph = ((d * w * r * l) % b + b) % b;
      double ang = -2.0 * std::numbers::pi * static_cast<double>(ph) / static_cast<double>(b);
      M[static_cast<std::size_t>(d * q + l)] = std::polar(scale, ang);
    }
  }
  detail::gram_deviation(M, static_cast<std::size_t>(q), rep);
  return rep;
}

/// Unitarity of (1/sqrt Q_n)(exp(2 pi i a lambda)) over the atoms a of mu_n and
/// a candidate level set. The exact part checks that mu-hat_n vanishes at every
/// difference: some k <= n has B_k | q_k xi and B_k not dividing xi.
inline UnitarityReport level_unitarity(const MoranSystem& sys, std::uint64_t n,
                                       const std::vector<BigInt>& level_set,
                                       std::uint64_t max_level = kDefaultMaxLevel,
                                       std::size_t max_dim = kMaxMatrixDim) {
  auto mu = level_measure(sys, n, max_level);
  if (level_set.size() != mu.size()) {
    throw ValidationError("level set has " + std::to_string(level_set.size()) + " points, Q_n = " +
                          std::to_string(mu.size()));
  }
  if (mu.size() > max_dim) throw ValidationError("matrix dimension exceeds limit");
  auto sorted = level_set;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("level set has duplicate points");
  }
  Ladder ladder(sys, n);
  const std::size_t dim = mu.size();
  UnitarityReport rep;
  rep.matrix_dim = dim;
  rep.exact_residue_pass = true;
  for (std::size_t i = 0; i < dim && rep.exact_residue_pass; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      const BigInt xi = level_set[i] - level_set[j];
      bool vanishes = false;
      for (std::uint64_t k = 1; k <= n && !vanishes; ++k) {
        vanishes = (xi * sys.q(k)) % ladder.B(k) == 0 && xi % ladder.B(k) != 0;
      }
      if (!vanishes) {
        rep.exact_residue_pass = false;
        break;
      }
    }
  }
  std::vector<std::complex<double>> M(dim * dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  parallel_for(dim, [&](std::size_t r) {
    for (std::size_t c = 0; c < dim; ++c) {
      BigInt ph = mod_floor(mu.numerators[r] * level_set[c], mu.denominator);
      double ang = 2.0 * std::numbers::pi * to_double(Rational(ph, mu.denominator));
      M[r * dim + c] = std::polar(scale, ang);
    }
  });
  detail::gram_deviation(M, dim, rep);
  return rep;
}

/// sum_{lambda in level set} |mu-hat_n(xi + lambda)|^2, the row-sum identity of the level matrix.
inline double level_parseval(const MoranSystem& sys, std::uint64_t n, const std::vector<BigInt>& level_set,
                             const Rational& xi) {
  double s = 0.0;
  for (const auto& l : level_set) s += std::norm(fourier_transform(sys, xi + Rational(l), n).value);
  return s;
}

struct CompletenessProfile {
  std::vector<double> xi_samples;
  std::vector<std::uint64_t> checkpoints;          // truncations N at which sums are recorded
  std::vector<std::vector<double>> partial_sums;   // [xi][checkpoint]
  std::vector<double> final_values;
  std::vector<double> tail_allowance;              // accumulated error allowance per xi
  bool monotone = true;
  bool bounded = true;
};

/// sum_{n <= N} |mu-hat(xi + lambda_n)|^2 for the listed points (in index
/// order), each transform using `K` factors beyond the top scale of xi + lambda_n.
inline CompletenessProfile completeness_profile(const MoranSystem& sys,
                                                const std::vector<RhoExpansion>& points,
                                                const std::vector<double>& xi_samples, std::uint64_t K) {
  if (K == 0) throw ValidationError("K must be >= 1");
  for (double x : xi_samples) {
    if (!(x >= 0.0 && x < 1.0)) throw ValidationError("xi samples must lie in [0, 1)");
  }
  CompletenessProfile prof;
  prof.xi_samples = xi_samples;
  for (std::uint64_t c = 1; c < points.size(); c *= 2) prof.checkpoints.push_back(c);
  prof.checkpoints.push_back(points.size());
  prof.partial_sums.assign(xi_samples.size(), {});
  prof.final_values.assign(xi_samples.size(), 0.0);
  prof.tail_allowance.assign(xi_samples.size(), 0.0);
  std::vector<char> mono(xi_samples.size(), 1), bound(xi_samples.size(), 1);
  parallel_for(xi_samples.size(), [&](std::size_t s) {
    double acc = 0.0, tail = 0.0, prev = 0.0;
    std::size_t next_cp = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto f = fourier_at_point(sys, xi_samples[s], points[i], K);
      acc += std::norm(f.value);
      tail += 2.0 * f.tail_bound + f.tail_bound * f.tail_bound;
      if (i + 1 == prof.checkpoints[next_cp]) {
        prof.partial_sums[s].push_back(acc);
        if (acc < prev) mono[s] = 0;
        prev = acc;
        ++next_cp;
      }
    }
    prof.final_values[s] = acc;
    prof.tail_allowance[s] = tail;
    if (acc > 1.0 + tail + 1e-9) bound[s] = 0;
  });
  prof.monotone = std::all_of(mono.begin(), mono.end(), [](char c) { return c != 0; });
  prof.bounded = std::all_of(bound.begin(), bound.end(), [](char c) { return c != 0; });
  return prof;
}

inline CompletenessProfile completeness_profile(const Spectrum& spec, const std::vector<double>& xi_samples,
                                                std::uint64_t index_cap, std::uint64_t K) {
  std::vector<RhoExpansion> pts;
  pts.reserve(index_cap);
  for (std::uint64_t n = 0; n < index_cap; ++n) pts.push_back(spec.expansion(n));
  return completeness_profile(spec.system(), pts, xi_samples, K);
}

struct PuncturedResult {
  std::uint64_t removed_branch = 0;  // residue n mod Q_level of the removed indices
  double branch_mass = 0.0;
  double full_value = 0.0;
  double punctured_value = 0.0;
  double deficit_bound = 0.0;        // 1 - 1/Q_level
};

/// Drops the level-`level` branch (indices n = c mod Q_level) carrying the most
/// mass at xi. Branch masses add up to the full sum, so the largest one is at
/// least full / Q_level.
inline PuncturedResult punctured_completeness(const Spectrum& spec, double xi, std::uint64_t index_cap,
                                              std::uint64_t K, std::uint64_t level = 3) {
  const auto& sys = spec.system();
  std::uint64_t Q = 1;
  for (std::uint64_t j = 1; j <= level; ++j) Q *= sys.q(j);
  std::vector<double> mass(Q, 0.0);
  for (std::uint64_t n = 0; n < index_cap; ++n) {
    mass[n % Q] += std::norm(fourier_at_point(sys, xi, spec.expansion(n), K).value);
  }
  PuncturedResult res;
  auto it = std::max_element(mass.begin(), mass.end());
  res.removed_branch = static_cast<std::uint64_t>(it - mass.begin());
  res.branch_mass = *it;
  for (double m : mass) res.full_value += m;
  res.punctured_value = res.full_value - res.branch_mass;
  res.deficit_bound = 1.0 - 1.0 / static_cast<double>(Q);
  return res;
}

struct SeparationReport {
  Rational min_distance;     // between T_n and Z(mu-hat_n)
  Rational bound;            // r_1 - 1
  bool pass = false;
  Rational nearest_t;
  BigInt nearest_zero;
  BigInt integer_reading_distance;  // same distance for the unnormalized sums B_n T_n
  std::string normalization = "T_n = { sum_{i<=n} x_i w_i rho_i / B_n }";
};

/// Distance from the normalized sign-word sums T_n, which lie in (-1, 1), to
/// the integer zero set of mu-hat_n.
inline SeparationReport separation_check(const MoranSystem& sys, const SignWord& w, std::uint64_t n,
                                         std::uint64_t max_level = kDefaultMaxLevel) {
  if (n == 0 || n > max_level) throw ValidationError("level out of range");
  auto spec = sign_word_spectrum(sys, w);
  auto pts = level_points(spec, n);
  Ladder ladder(sys, n);
  const BigInt& Bn = ladder.B(n);
  auto in_zero_set_n = [&](const BigInt& z) {
    if (z == 0) return false;
    for (std::uint64_t k = 1; k <= n; ++k) {
      if ((z * sys.q(k)) % ladder.B(k) == 0 && z % ladder.B(k) != 0) return true;
    }
    return false;
  };
  // every element of the zero set has |z| >= r_1, so candidates up to r_1 + 1 suffice
  const std::int64_t R = static_cast<std::int64_t>(sys.r(1)) + 1;
  std::vector<BigInt> zeros;
  for (std::int64_t z = -R; z <= R; ++z) {
    if (in_zero_set_n(z)) zeros.emplace_back(z);
  }
  SeparationReport rep;
  rep.bound = Rational(static_cast<std::int64_t>(sys.r(1)) - 1);
  bool first = true;
  for (const auto& p : pts) {
    const Rational t(p, Bn);
    for (const auto& z : zeros) {
      Rational d = t - Rational(z);
      if (d < 0) d = -d;
      if (first || d < rep.min_distance) {
        rep.min_distance = d;
        rep.nearest_t = t;
        rep.nearest_zero = z;
        first = false;
      }
    }
  }
  rep.pass = !first && rep.min_distance >= rep.bound;
  bool first_int = true;
  for (const auto& p : pts) {
    for (const auto& z : zeros) {
      BigInt d = boost::multiprecision::abs(p - z);
      if (first_int || d < rep.integer_reading_distance) {
        rep.integer_reading_distance = d;
        first_int = false;
      }
    }
  }
  return rep;
}

}  // namespace moran
