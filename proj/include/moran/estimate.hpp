#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "moran/dimension.hpp"
#include "moran/integer_moran.hpp"
#include "moran/spectrum.hpp"

namespace moran {

/// Counting estimates for a materialized spectrum.
///
/// Canonical spectra are integer Moran sets and are measured on their natural
/// scales. Spectra split into a regular part (indices in Gamma_t) and an
/// irregular part are measured part by part: the regular part on the natural
/// scales of the thinned data, the irregular part on dyadic scales, and the
/// headline is the larger of the two. Everything else uses dyadic scales.
struct SpectrumDimension {
  double headline = 0.0;
  std::string rule;
  DimensionEstimate full;
  std::optional<DimensionEstimate> regular;
  std::optional<DimensionEstimate> irregular;
  std::optional<FormulaValue> formula;  // regular part (or whole canonical set)
  std::uint64_t materialized = 0;
  std::uint64_t omitted = 0;
};

namespace detail {

/// Largest k with Q_k <= count.
inline std::uint64_t full_levels(const MoranSystem& sys, std::uint64_t count) {
  std::uint64_t k = 0, Q = 1;
  while (Q <= count / sys.q(k + 1)) {
    Q *= sys.q(k + 1);
    ++k;
  }
  return k;
}

inline std::optional<DimensionEstimate> dyadic_estimate(const std::vector<BigInt>& pts) {
  if (pts.size() < 2 || pts.back() - pts.front() < 2) return std::nullopt;
  return beurling_estimate(pts, dyadic_scales(pts.back() - pts.front()), "dyadic");
}

/// Natural scales not exceeding the span of `pts`.
inline std::optional<DimensionEstimate> natural_estimate(const std::vector<BigInt>& pts,
                                                         const IntegerMoranData& d,
                                                         std::uint64_t levels) {
  if (pts.size() < 2 || levels == 0) return std::nullopt;
  auto sc = scale_values(natural_scales(d, levels));
  const BigInt span = pts.back() - pts.front();
  while (!sc.empty() && sc.back() > span) sc.pop_back();
  if (sc.empty()) return std::nullopt;
  return beurling_estimate(pts, sc, "natural");
}

}  // namespace detail

/// Indices 0..index_cap of `spec`, points above `max_bits` left out.
inline SpectrumDimension spectrum_dimension(const Spectrum& spec, std::uint64_t index_cap,
                                            std::uint64_t formula_depth = 200,
                                            std::uint64_t max_bits = kDefaultMaxBits) {
  const auto& sys = spec.system();
  auto idx = spec.by_index(index_cap);
  auto all = materialize(sys, idx, max_bits);
  SpectrumDimension out;
  out.materialized = all.points.size();
  out.omitted = all.omitted;
  if (all.points.size() < 2) throw ValidationError("fewer than 2 points materialized");
  const std::uint64_t levels = detail::full_levels(sys, index_cap + 1);

  if (spec.kind() == SpectrumKind::canonical) {
    auto d = canonical_data(sys, std::max(levels, formula_depth));
    auto est = detail::natural_estimate(all.points, d, levels);
    if (!est) throw ValidationError("no natural scale fits the materialized set");
    out.full = *est;
    out.formula = beurling_formula_ims(d, formula_depth);
    out.headline = out.full.value;
    out.rule = "natural";
    return out;
  }

  out.full = *detail::dyadic_estimate(all.points);
  if (!spec.has_parts()) {
    out.headline = out.full.value;
    out.rule = "dyadic";
    return out;
  }

  const auto& th = *spec.shifts().gamma();
  const std::uint64_t depth = std::min<std::uint64_t>(formula_depth, th.depth);
  auto d = thinned_data(sys, th);
  out.formula = beurling_formula_ims(d, depth);
  std::vector<BigInt> reg, irr;
  for (std::size_t i = 0; i < all.points.size(); ++i) {
    const auto n = all.indices[i];
    (spec.part(n) == Part::irregular ? irr : reg).push_back(all.points[i]);
  }
  out.regular = detail::natural_estimate(reg, d, std::min(levels, th.depth));
  out.irregular = detail::dyadic_estimate(irr);
  out.headline = std::max(out.regular ? out.regular->value : 0.0,
                          out.irregular ? out.irregular->value : 0.0);
  out.rule = "max(regular natural, irregular dyadic)";
  return out;
}

}  // namespace moran
