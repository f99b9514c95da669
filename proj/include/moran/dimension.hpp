#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "moran/bigint.hpp"
#include "moran/expansion.hpp"
#include "moran/integer_moran.hpp"
#include "moran/measure.hpp"
#include "moran/parallel.hpp"
#include "moran/system.hpp"

namespace moran {

/// Share of the (largest) scales that feed the headline Beurling value.
inline constexpr double kTailFraction = 0.25;

template <class Int>
struct WindowCountProfile {
  Int window_length{};
  std::uint64_t max_count = 0;
  Int left{};  // argmax window is [left, right]
  Int right{};
};

/// For each h, the largest #(S cap [x, x + h]) over real x. Windows are
/// anchored at points of S and swept with two pointers.
template <class Int>
std::vector<WindowCountProfile<Int>> window_counts(const std::vector<Int>& points,
                                                   const std::vector<Int>& scales) {
  std::vector<WindowCountProfile<Int>> out(scales.size());
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i - 1] < points[i])) throw ValidationError("points must be sorted and distinct");
  }
  parallel_for(scales.size(), [&](std::size_t s) {
    const Int& h = scales[s];
    if (h < 0) throw ValidationError("window length must be >= 0");
    auto& prof = out[s];
    prof.window_length = h;
    std::size_t j = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Int end = points[i] + h;
      if (j < i) j = i;
      while (j < points.size() && !(end < points[j])) ++j;
      const std::uint64_t c = j - i;
      if (c > prof.max_count) {
        prof.max_count = c;
        prof.left = points[i];
        prof.right = end;
      }
    }
  });
  return out;
}

namespace detail {

inline double log_of(const BigInt& v) { return log_abs(v); }
inline double log_of(std::int64_t v) { return std::log(static_cast<double>(v)); }

}  // namespace detail

struct ScaleSample {
  std::string h;  // decimal
  double log_h = 0.0;
  std::uint64_t max_count = 0;
  double log_ratio = 0.0;
};

struct DimensionEstimate {
  double value = 0.0;   // running sup of log-ratios over the largest scales
  double slope = 0.0;   // least-squares slope of log max_count against log h
  std::vector<ScaleSample> samples;
  std::size_t tail_scales = 0;  // how many of the largest scales fed `value`
  std::string method = "running-sup";
  std::string scale_source;
  std::optional<double> closed_form;
};

/// Counting estimate of the Beurling dimension from a finite sorted set.
template <class Int>
DimensionEstimate beurling_estimate(const std::vector<Int>& points, const std::vector<Int>& scales,
                                    std::string scale_source = {},
                                    double tail_fraction = kTailFraction) {
  if (points.size() < 2) throw ValidationError("need at least 2 points");
  if (scales.empty()) throw ValidationError("need at least one scale");
  const Int span = points.back() - points.front();
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] < 2) throw ValidationError("scales must be >= 2");
    if (i > 0 && !(scales[i - 1] < scales[i])) throw ValidationError("scales must increase");
  }
  if (span < scales.back()) throw ValidationError("largest scale exceeds the span of the points");
  auto prof = window_counts(points, scales);
  DimensionEstimate est;
  est.scale_source = std::move(scale_source);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : prof) {
    ScaleSample s;
    if constexpr (std::is_same_v<Int, BigInt>) {
      s.h = to_string(p.window_length);
    } else {
      s.h = std::to_string(p.window_length);
    }
    s.log_h = detail::log_of(p.window_length);
    s.max_count = p.max_count;
    s.log_ratio = std::log(static_cast<double>(p.max_count)) / s.log_h;
    sx += s.log_h;
    sy += std::log(static_cast<double>(p.max_count));
    sxx += s.log_h * s.log_h;
    sxy += s.log_h * std::log(static_cast<double>(p.max_count));
    est.samples.push_back(std::move(s));
  }
  const double n = static_cast<double>(prof.size());
  const double denom = n * sxx - sx * sx;
  est.slope = (prof.size() > 1 && denom > 0) ? (n * sxy - sx * sy) / denom : est.samples[0].log_ratio;
  est.tail_scales = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(prof.size()))));
  double best = 0.0;
  for (std::size_t i = prof.size() - est.tail_scales; i < prof.size(); ++i) {
    best = std::max(best, est.samples[i].log_ratio);
  }
  est.value = best;
  return est;
}

/// 2^j for 1 <= j with 2^j <= span.
inline std::vector<BigInt> dyadic_scales(const BigInt& span) {
  std::vector<BigInt> out;
  for (BigInt h = 2; h <= span; h <<= 1) out.push_back(h);
  return out;
}

struct NaturalScale {
  std::uint64_t k = 0;
  BigInt J;  // sum_{i<=k} (m_i - 1) t_i n_1...n_{i-1}
};

/// J_k for the levels k <= depth with m_k >= 2 and J_k >= 2.
inline std::vector<NaturalScale> natural_scales(const IntegerMoranData& d, std::uint64_t depth) {
  d.require_depth(depth);
  std::vector<NaturalScale> out;
  BigInt N = 1, J = 0;
  for (std::uint64_t k = 1; k <= depth; ++k) {
    J += BigInt(d.m.at(k) - 1) * d.t.at(k) * N;
    N *= d.n.at(k);
    if (d.m.at(k) >= 2 && J >= 2) out.push_back({k, J});
  }
  return out;
}

inline std::vector<BigInt> scale_values(const std::vector<NaturalScale>& s) {
  std::vector<BigInt> out;
  for (const auto& x : s) out.push_back(x.J);
  return out;
}

struct FormulaValue {
  double value = 0.0;             // exact limit when known, else `sampled`
  double sampled = 0.0;           // max over the largest natural levels
  std::optional<double> exact;
  std::vector<std::pair<std::uint64_t, double>> samples;  // (k, ratio) for natural levels
};

/// limsup_k log(m_1...m_k) / log(m_k t_k n_1...n_{k-1}), over the levels of natural_scales.
/// `sampled` is the max over the largest `tail_fraction` of those levels up to
/// `depth`, the same levels whose J_k feed the counting estimate. For
/// eventually periodic data the limit is log(prod m) / log(prod n) over one period.
inline FormulaValue beurling_formula_ims(const IntegerMoranData& d, std::uint64_t depth,
                                         double tail_fraction = kTailFraction) {
  if (depth == 0) throw ValidationError("depth must be >= 1");
  auto cfd = validate_cfd(d, depth);
  if (!cfd.ok) {
    throw ValidationError("separation condition fails at k=" + std::to_string(*cfd.first_failure));
  }
  d.require_depth(depth);
  FormulaValue out;
  double lm = 0.0, ln = 0.0;
  BigInt N = 1, J = 0;
  for (std::uint64_t k = 1; k <= depth; ++k) {
    const double lmk = std::log(static_cast<double>(d.m.at(k)));
    lm += lmk;
    const double denom = lmk + std::log(static_cast<double>(d.t.at(k))) + ln;
    ln += std::log(static_cast<double>(d.n.at(k)));
    J += BigInt(d.m.at(k) - 1) * d.t.at(k) * N;
    N *= d.n.at(k);
    if (d.m.at(k) >= 2 && J >= 2) out.samples.emplace_back(k, lm / denom);
  }
  if (!out.samples.empty()) {
    std::size_t tail = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(out.samples.size()))));
    for (std::size_t i = out.samples.size() - tail; i < out.samples.size(); ++i) {
      out.sampled = std::max(out.sampled, out.samples[i].second);
    }
  }
  if (d.eventually_periodic()) {
    auto [pn, ln_] = d.n.periodic_shape();
    auto [pm, lm_] = d.m.periodic_shape();
    auto [pt, lt_] = d.t.periodic_shape();
    const std::uint64_t pre = std::max({pn, pm, pt});
    const std::uint64_t per = std::lcm(std::lcm(ln_, lm_), lt_);
    double a = 0.0, b = 0.0;
    for (std::uint64_t k = pre + 1; k <= pre + per; ++k) {
      a += std::log(static_cast<double>(d.m.at(k)));
      b += std::log(static_cast<double>(d.n.at(k)));
    }
    out.exact = b > 0 ? a / b : 0.0;
  }
  out.value = out.exact ? *out.exact : out.sampled;
  return out;
}

struct LacunaryReport {
  bool ok = true;
  std::uint64_t checked = 0;                 // ratios verified
  std::optional<std::uint64_t> first_violation;  // index i with |a_{i}| < b |a_{i-1}| (or a_1 < b)
};

/// b-lacunarity of a_0 = 0, a_1, a_2, ...: |a_1| >= b and |a_{n+1}| >= b |a_n|.
inline LacunaryReport lacunary_check(const std::vector<BigInt>& a, const Rational& b) {
  if (a.empty() || a[0] != 0) throw ValidationError("sequence must start with a_0 = 0");
  if (b <= 1) throw ValidationError("b must be > 1");
  const BigInt num = boost::multiprecision::numerator(b), den = boost::multiprecision::denominator(b);
  LacunaryReport rep;
  for (std::size_t i = 1; i < a.size(); ++i) {
    const BigInt prev = i == 1 ? BigInt(1) : BigInt(boost::multiprecision::abs(a[i - 1]));
    ++rep.checked;
    if (boost::multiprecision::abs(a[i]) * den < num * prev) {
      rep.ok = false;
      rep.first_violation = i;
      return rep;
    }
  }
  return rep;
}

/// Same check on non-negative sparse points; b = num / den with small integers.
inline LacunaryReport lacunary_check(const MoranSystem& sys, const std::vector<RhoExpansion>& a,
                                     std::int64_t num, std::int64_t den = 1) {
  if (a.empty() || !a[0].is_zero()) throw ValidationError("sequence must start with a_0 = 0");
  if (den <= 0 || num <= den) throw ValidationError("b must be > 1");
  LacunaryReport rep;
  for (std::size_t i = 1; i < a.size(); ++i) {
    ++rep.checked;
    if (sign(sys, a[i]) < 0) throw ValidationError("sparse lacunary check expects non-negative points");
    bool ok;
    if (i == 1) {
      // B_62 >= 4^62 already exceeds any int64 bound
      ok = a[1].top_position() > 62 ||
           a[1].to_bigint(Ladder(sys, a[1].top_position())) * den >= num;
    } else {
      ok = sign(sys, difference(scaled(a[i], den), scaled(a[i - 1], num))) >= 0;
    }
    if (!ok) {
      rep.ok = false;
      rep.first_violation = i;
      return rep;
    }
  }
  return rep;
}

struct EntropyRow {
  std::uint64_t n = 0;
  double entropy = 0.0;  // H_n in nats
  double ratio = 0.0;    // H_n / (n log 2)
  std::uint64_t occupied_cells = 0;
};

/// Entropy of the n-th dyadic partition under an atomic measure, for each
/// requested n. Requires 16 * 2^n <= B_m so that mu_m resolves the partition.
inline std::vector<EntropyRow> entropy_estimate(const AtomicMeasure& mu,
                                                const std::vector<std::uint64_t>& levels) {
  std::vector<EntropyRow> rows;
  for (std::uint64_t n : levels) {
    if (n == 0) throw ValidationError("dyadic level must be >= 1");
    if ((BigInt(16) << n) > mu.denominator) {
      throw ValidationError("dyadic level " + std::to_string(n) +
                            " too fine for the atomic approximation (need 16*2^n <= B_m)");
    }
    std::vector<std::uint64_t> cells;
    cells.reserve(mu.size());
    for (const auto& a : mu.numerators) {
      BigInt c = (a << n) / mu.denominator;
      cells.push_back(c.convert_to<std::uint64_t>());
    }
    std::sort(cells.begin(), cells.end());
    EntropyRow row;
    row.n = n;
    const double total = static_cast<double>(cells.size());
    for (std::size_t i = 0; i < cells.size();) {
      std::size_t j = i;
      while (j < cells.size() && cells[j] == cells[i]) ++j;
      const double p = static_cast<double>(j - i) / total;
      row.entropy -= p * std::log(p);
      ++row.occupied_cells;
      i = j;
    }
    row.ratio = row.entropy / (static_cast<double>(n) * std::log(2.0));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace moran
