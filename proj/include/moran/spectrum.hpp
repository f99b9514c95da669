#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "moran/bigint.hpp"
#include "moran/expansion.hpp"
#include "moran/mixed_radix.hpp"
#include "moran/shifts.hpp"
#include "moran/system.hpp"
#include "moran/thinning.hpp"

namespace moran {

/// Default magnitude cap (in bits) used when spectrum points are turned into integers.
inline constexpr std::uint64_t kDefaultMaxBits = 256;

/// Positions above this are refused by lambda_at; use expansions instead.
inline constexpr std::uint64_t kMaxExactPosition = 1U << 16;

/// lambda_n as a sparse sum over rho_j, following the tree labeling strictly:
/// a prefix ending in a non-zero digit keeps that digit; a prefix ending in
/// l >= 1 zeros after the word of n'' carries q_j when l = s_{n''}; the word of
/// n itself contributes q_{k+s_n} at position k + s_n when s_n > 0.
inline RhoExpansion lambda_expansion(const MoranSystem& sys, const ShiftSequence& shifts,
                                     std::uint64_t n) {
  RhoExpansion out;
  if (n == 0) return out;
  const auto w = encode_index(sys, n);
  std::uint64_t prefix_value = 0, place = 1, last_nonzero = 0;
  std::uint64_t prefix_shift = 0;
  bool have_shift = false;
  for (std::uint64_t j = 1; j <= w.depth(); ++j) {
    const std::uint32_t d = w.digits[j - 1];
    if (d != 0) {
      out.add(j, d);
      prefix_value += d * place;
      last_nonzero = j;
      have_shift = false;
    } else if (last_nonzero != 0) {
      if (!have_shift) {
        prefix_shift = shifts.at(prefix_value);
        have_shift = true;
      }
      if (prefix_shift == j - last_nonzero) out.add(j, static_cast<std::int64_t>(sys.q(j)));
    }
    place *= sys.q(j);
  }
  const std::uint64_t s = shifts.at(n);
  if (s > 0) out.add(w.depth() + s, static_cast<std::int64_t>(sys.q(w.depth() + s)));
  return out;
}

/// Canonical digits with signs: sum_j sigma_j w_j rho_j.
inline RhoExpansion sign_word_expansion(const MoranSystem& sys, const SignWord& w, std::uint64_t n) {
  RhoExpansion out;
  if (n == 0) return out;
  const auto word = encode_index(sys, n);
  for (std::uint64_t j = 1; j <= word.depth(); ++j) {
    out.add(j, static_cast<std::int64_t>(word.digits[j - 1]) * w.at(j));
  }
  return out;
}

/// lambda_n as an integer. Refuses points whose top scale sits beyond kMaxExactPosition.
inline BigInt lambda_at(const MoranSystem& sys, const ShiftSequence& shifts, std::uint64_t n) {
  auto e = lambda_expansion(sys, shifts, n);
  if (e.top_position() > kMaxExactPosition) {
    throw ValidationError("lambda_" + std::to_string(n) + " lies at scale position " +
                          std::to_string(e.top_position()) + "; use the sparse expansion");
  }
  return e.to_bigint(Ladder(sys, e.top_position()));
}

enum class SpectrumKind { canonical, lacunary, intermediate, sign_word, continuum_sample, custom };

inline std::string kind_name(SpectrumKind k) {
  switch (k) {
    case SpectrumKind::canonical: return "canonical";
    case SpectrumKind::lacunary: return "lacunary";
    case SpectrumKind::intermediate: return "intermediate";
    case SpectrumKind::sign_word: return "sign-word";
    case SpectrumKind::continuum_sample: return "continuum-sample";
    case SpectrumKind::custom: return "custom";
  }
  return "";
}

/// regular = index in Gamma_t (or 0), irregular = shifted index; none when the
/// construction has no split.
enum class Part { none, regular, irregular };

inline std::string part_name(Part p) {
  switch (p) {
    case Part::none: return "none";
    case Part::regular: return "regular";
    case Part::irregular: return "irregular";
  }
  return "";
}

struct IndexedPoint {
  std::uint64_t n = 0;
  RhoExpansion lambda;
  Part part = Part::none;
};

/// A lazily indexed spectrum candidate n -> lambda_n together with the
/// parameters that produced it.
class Spectrum {
 public:
  Spectrum(MoranSystem sys, SpectrumKind kind, ShiftSequence shifts,
           std::map<std::string, std::string> metadata = {})
      : sys_(std::move(sys)), kind_(kind), shifts_(std::move(shifts)), meta_(std::move(metadata)) {}

  Spectrum(MoranSystem sys, SignWord w, std::map<std::string, std::string> metadata = {})
      : sys_(std::move(sys)), kind_(SpectrumKind::sign_word), shifts_(ShiftSequence::all_zero()),
        sign_(std::move(w)), meta_(std::move(metadata)) {}

  const MoranSystem& system() const { return sys_; }
  SpectrumKind kind() const { return kind_; }
  const ShiftSequence& shifts() const { return shifts_; }
  const std::optional<SignWord>& sign_word() const { return sign_; }
  const std::map<std::string, std::string>& metadata() const { return meta_; }
  bool has_parts() const { return shifts_.gamma().has_value(); }

  RhoExpansion expansion(std::uint64_t n) const {
    if (sign_) return sign_word_expansion(sys_, *sign_, n);
    return lambda_expansion(sys_, shifts_, n);
  }

  BigInt lambda(std::uint64_t n) const {
    if (!sign_) return lambda_at(sys_, shifts_, n);
    auto e = expansion(n);
    return e.to_bigint(Ladder(sys_, e.top_position()));
  }

  Part part(std::uint64_t n) const {
    if (!has_parts()) return Part::none;
    if (n == 0) return Part::regular;
    return shifts_.on_gamma(n) ? Part::regular : Part::irregular;
  }

  /// Indices 0..N.
  std::vector<IndexedPoint> by_index(std::uint64_t N) const {
    std::vector<IndexedPoint> out;
    out.reserve(N + 1);
    for (std::uint64_t n = 0; n <= N; ++n) out.push_back({n, expansion(n), part(n)});
    return out;
  }

  /// All n < Q_k whose point uses scales up to rho_k only.
  std::vector<IndexedPoint> by_level(std::uint64_t k) const {
    if (k == 0) throw ValidationError("level must be >= 1");
    std::uint64_t count = 1;
    for (std::uint64_t j = 1; j <= k; ++j) {
      if (count > (std::uint64_t{1} << 40) / sys_.q(j)) throw ValidationError("level too large");
      count *= sys_.q(j);
    }
    std::vector<IndexedPoint> out;
    for (std::uint64_t n = 0; n < count; ++n) {
      auto e = expansion(n);
      if (e.top_position() <= k) out.push_back({n, std::move(e), part(n)});
    }
    return out;
  }

 private:
  MoranSystem sys_;
  SpectrumKind kind_;
  ShiftSequence shifts_;
  std::optional<SignWord> sign_;
  std::map<std::string, std::string> meta_;
};

inline Spectrum canonical_spectrum(const MoranSystem& sys) {
  return Spectrum(sys, SpectrumKind::canonical, ShiftSequence::all_zero(), {{"shifts", "all-zero"}});
}

inline Spectrum lacunary_spectrum(const MoranSystem& sys) {
  return Spectrum(sys, SpectrumKind::lacunary, ShiftSequence::identity(), {{"shifts", "identity"}});
}

inline Spectrum intermediate_spectrum(const MoranSystem& sys, const Target& t,
                                      std::uint64_t depth = kDefaultThinningDepth) {
  auto th = thin_digits(sys, t, depth);
  return Spectrum(sys, SpectrumKind::intermediate, ShiftSequence::zero_on_gamma(sys, th),
                  {{"shifts", "zero-on-gamma"}, {"t", t.text}});
}

inline Spectrum sign_word_spectrum(const MoranSystem& sys, const SignWord& w) {
  return Spectrum(sys, w, {{"w", w.describe()}});
}

/// Square-choice shifts off Gamma_t (Gamma_0 is empty). The bit source must
/// cover every index outside Gamma_t up to `index_cap` unless it carries a seed.
inline Spectrum continuum_family_sample(const MoranSystem& sys, const Target& t, const BitSource& bits,
                                        std::uint64_t index_cap = 1000,
                                        std::uint64_t depth = kDefaultThinningDepth) {
  if (t.value < 0) throw ValidationError("target must be >= 0");
  std::optional<ThinnedDigits> th;
  if (t.value > 0) th = thin_digits(sys, t, depth);
  auto shifts = th ? ShiftSequence::square_choice(bits, sys, *th) : ShiftSequence::square_choice(bits);
  const std::uint64_t need = shifts.required_bits(index_cap);
  if (!bits.seed && bits.bits.size() < need) {
    throw ValidationError("bit string has " + std::to_string(bits.bits.size()) + " bits; " +
                          std::to_string(need) + " needed for indices up to " +
                          std::to_string(index_cap));
  }
  std::map<std::string, std::string> meta{{"shifts", "square-choice"}, {"t", t.text}, {"bits", bits.str()}};
  if (bits.seed) meta["seed"] = std::to_string(*bits.seed);
  return Spectrum(sys, SpectrumKind::continuum_sample, std::move(shifts), std::move(meta));
}

/// Integers with their indices, sorted by value. Points using scales beyond
/// `max_position` are left out and counted in `omitted`.
struct PointSet {
  std::vector<BigInt> points;
  std::vector<std::uint64_t> indices;
  std::uint64_t omitted = 0;
  std::uint64_t max_position = 0;
  std::string view;
};

/// Largest p with bit_length(B_p) <= max_bits.
inline std::uint64_t position_cap(const MoranSystem& sys, std::uint64_t max_bits) {
  BigInt B = 1;
  std::uint64_t p = 0;
  for (;;) {
    BigInt next = B * sys.b(p + 1);
    if (bit_length(next) > max_bits) return p;
    B = std::move(next);
    ++p;
  }
}

inline PointSet materialize(const MoranSystem& sys, const std::vector<IndexedPoint>& pts,
                            std::uint64_t max_bits = kDefaultMaxBits,
                            std::optional<Part> only = std::nullopt, std::string view = {}) {
  PointSet out;
  out.view = std::move(view);
  out.max_position = position_cap(sys, max_bits);
  Ladder ladder(sys, out.max_position);
  std::vector<std::pair<BigInt, std::uint64_t>> tmp;
  for (const auto& p : pts) {
    if (only && p.part != *only) continue;
    if (p.lambda.top_position() > out.max_position) {
      ++out.omitted;
      continue;
    }
    tmp.emplace_back(p.lambda.to_bigint(ladder), p.n);
  }
  std::sort(tmp.begin(), tmp.end());
  for (auto& [v, n] : tmp) {
    out.points.push_back(std::move(v));
    out.indices.push_back(n);
  }
  return out;
}

/// Sorted integer values of a level view (no magnitude cap needed).
inline std::vector<BigInt> level_points(const Spectrum& s, std::uint64_t k) {
  auto pts = s.by_level(k);
  Ladder ladder(s.system(), k);
  std::vector<BigInt> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(p.lambda.to_bigint(ladder));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace moran
