#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "moran/mixed_radix.hpp"
#include "moran/shifts.hpp"
#include "moran/system.hpp"

namespace moran {

/// Label of the node `word` followed by `zeros` extra zero digits.
using Labeling = std::function<std::int64_t(const std::vector<std::uint32_t>& word, std::uint64_t zeros)>;

/// tau(sigma 0^l) for sigma the word of some n >= 1 (or an all-zero word):
///   all-zero words -> 0;  l = 0 -> sigma_k;  l = s_n > 0 -> q_{k + s_n};  else 0.
inline std::int64_t tree_map_value(const MoranSystem& sys, const ShiftSequence& shifts,
                                   const MixedRadixWord& sigma, std::uint64_t l) {
  const bool all_zero = std::all_of(sigma.digits.begin(), sigma.digits.end(),
                                    [](std::uint32_t d) { return d == 0; });
  if (all_zero) return 0;
  const std::uint64_t n = decode_word(sys, sigma);
  const std::uint64_t k = sigma.depth();
  if (l == 0) return sigma.digits.back();
  const std::uint64_t s = shifts.at(n);
  return l == s ? static_cast<std::int64_t>(sys.q(k + s)) : 0;
}

/// Label of an arbitrary node: split off trailing zeros and apply tree_map_value.
inline std::int64_t tree_label(const MoranSystem& sys, const ShiftSequence& shifts,
                               const std::vector<std::uint32_t>& word, std::uint64_t zeros = 0) {
  std::size_t last = word.size();
  while (last > 0 && word[last - 1] == 0) --last;
  if (last == 0) return 0;
  MixedRadixWord sigma{{word.begin(), word.begin() + static_cast<std::ptrdiff_t>(last)}};
  return tree_map_value(sys, shifts, sigma, (word.size() - last) + zeros);
}

inline Labeling shift_labeling(const MoranSystem& sys, const ShiftSequence& shifts) {
  return [sys, shifts](const std::vector<std::uint32_t>& w, std::uint64_t z) {
    return tree_label(sys, shifts, w, z);
  };
}

struct TreeMappingReport {
  bool valid = true;
  std::string axiom;  // "i", "ii" or "iii" for the first violation
  std::optional<std::vector<std::uint32_t>> violating_word;
  std::uint64_t violating_zeros = 0;
  std::uint64_t words_checked = 0;
  std::int64_t label_min = 0;
  std::int64_t label_max = 0;
  std::uint64_t max_ray_labels = 0;  // finite-depth Dai-Sun count
};

namespace detail {

inline bool label_in_range(const MoranSystem& sys, std::uint64_t level, std::uint32_t digit,
                           std::int64_t label) {
  const auto q = static_cast<std::int64_t>(sys.q(level));
  const auto b = static_cast<std::int64_t>(sys.b(level));
  if (label < -1 || label > b - 2) return false;
  std::int64_t diff = label - static_cast<std::int64_t>(digit);
  return ((diff % q) + q) % q == 0;
}

}  // namespace detail

/// Finite-depth check of the maximal tree mapping axioms:
///   (i)   the root and the zero ray carry label 0;
///   (ii)  each label is congruent to its last digit mod q_n and lies in {-1, ..., b_n - 2};
///   (iii) along each ray delta 0^l the labels are 0 at the end of the horizon.
/// `ray_points(word)` lists the ray offsets l to evaluate; defaults to 1..horizon.
inline TreeMappingReport validate_tree_mapping(
    const MoranSystem& sys, const Labeling& label, std::uint64_t depth, std::uint64_t horizon,
    const std::function<std::vector<std::uint64_t>(const std::vector<std::uint32_t>&)>& ray_points = {}) {
  if (depth == 0) throw ValidationError("depth must be >= 1");
  TreeMappingReport rep;
  auto fail = [&](const char* axiom, const std::vector<std::uint32_t>& w, std::uint64_t z) {
    rep.valid = false;
    rep.axiom = axiom;
    rep.violating_word = w;
    rep.violating_zeros = z;
  };
  for (std::uint64_t len = 0; len <= depth + horizon; ++len) {
    if (label(std::vector<std::uint32_t>(std::min(len, depth), 0), len > depth ? len - depth : 0) != 0) {
      fail("i", std::vector<std::uint32_t>(std::min(len, depth), 0), len > depth ? len - depth : 0);
      return rep;
    }
  }
  std::vector<std::uint32_t> word;
  bool first = true;
  // depth-first walk over all words of length 1..depth
  std::function<bool()> walk = [&]() -> bool {
    const std::uint64_t level = word.size() + 1;
    if (level > depth) return true;
    for (std::uint32_t d = 0; d < sys.q(level); ++d) {
      word.push_back(d);
      ++rep.words_checked;
      const std::int64_t v = label(word, 0);
      if (first) {
        rep.label_min = rep.label_max = v;
        first = false;
      }
      rep.label_min = std::min(rep.label_min, v);
      rep.label_max = std::max(rep.label_max, v);
      if (!detail::label_in_range(sys, level, d, v)) {
        fail("ii", word, 0);
        return false;
      }
      std::vector<std::uint64_t> offsets;
      if (ray_points) {
        offsets = ray_points(word);
      } else {
        for (std::uint64_t l = 1; l <= horizon; ++l) offsets.push_back(l);
      }
      std::uint64_t nonzero = 0;
      for (std::uint64_t l : offsets) {
        const std::int64_t rv = label(word, l);
        if (rv != 0) ++nonzero;
        if (!detail::label_in_range(sys, level + l, 0, rv)) {
          fail("ii", word, l);
          return false;
        }
        if (l + 8 > horizon && rv != 0) {
          fail("iii", word, l);
          return false;
        }
      }
      rep.max_ray_labels = std::max(rep.max_ray_labels, nonzero);
      if (!walk()) return false;
      word.pop_back();
    }
    return true;
  };
  walk();
  return rep;
}

namespace detail {

inline std::uint64_t max_shift_below(const MoranSystem& sys, const ShiftSequence& shifts,
                                     std::uint64_t depth) {
  std::uint64_t count = 1;
  for (std::uint64_t j = 1; j <= depth; ++j) count *= sys.q(j);
  std::uint64_t m = 0;
  for (std::uint64_t n = 1; n < count; ++n) m = std::max(m, shifts.at(n));
  return m;
}

}  // namespace detail

/// Shift-based labeling: rays are sampled near their start, around the one
/// offset where the rule can fire, and at the end of the horizon.
inline TreeMappingReport validate_tree_mapping(const MoranSystem& sys, const ShiftSequence& shifts,
                                               std::uint64_t depth) {
  const std::uint64_t horizon = detail::max_shift_below(sys, shifts, depth) + 16;
  auto rays = [&](const std::vector<std::uint32_t>& w) {
    std::vector<std::uint64_t> pts;
    for (std::uint64_t l = 1; l <= std::min<std::uint64_t>(8, horizon); ++l) pts.push_back(l);
    std::size_t last = w.size();
    while (last > 0 && w[last - 1] == 0) --last;
    if (last > 0) {
      MixedRadixWord sigma{{w.begin(), w.begin() + static_cast<std::ptrdiff_t>(last)}};
      const std::uint64_t s = shifts.at(decode_word(sys, sigma));
      const std::uint64_t a = w.size() - last;
      for (std::uint64_t l = (s > a + 1 ? s - a - 1 : 1); l <= s - a + 1 && s >= a; ++l) {
        if (l >= 1 && l <= horizon) pts.push_back(l);
      }
    }
    for (std::uint64_t l = horizon - 7; l <= horizon; ++l) pts.push_back(l);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  };
  return validate_tree_mapping(sys, shift_labeling(sys, shifts), depth, horizon, rays);
}

/// max over 1 <= n <= depth of #{l >= 1 : tau(sigma(n) 0^l) != 0}.
inline std::uint64_t dai_sun_bound(const MoranSystem& sys, const ShiftSequence& shifts,
                                   std::uint64_t depth) {
  if (depth == 0) throw ValidationError("depth must be >= 1");
  std::uint64_t best = 0;
  for (std::uint64_t n = 1; n <= depth; ++n) {
    auto sigma = encode_index(sys, n);
    const std::uint64_t s = shifts.at(n);
    std::uint64_t count = 0;
    for (std::uint64_t l = 1; l <= s + 2; ++l) {
      if (tree_map_value(sys, shifts, sigma, l) != 0) ++count;
    }
    best = std::max(best, count);
  }
  return best;
}

}  // namespace moran
