#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "moran/system.hpp"

namespace moran {

/// Digits sigma_1 ... sigma_k of an index in the mixed radix q_1, q_2, ...
/// (least significant first). A positive index has sigma_k != 0.
struct MixedRadixWord {
  std::vector<std::uint32_t> digits;

  std::size_t depth() const { return digits.size(); }
  bool last_nonzero() const { return !digits.empty() && digits.back() != 0; }
  friend bool operator==(const MixedRadixWord&, const MixedRadixWord&) = default;
};

inline MixedRadixWord encode_index(const MoranSystem& sys, std::uint64_t n) {
  if (n == 0) throw ValidationError("encode_index needs n >= 1");
  MixedRadixWord w;
  for (std::uint64_t j = 1; n > 0; ++j) {
    const std::uint64_t qj = sys.q(j);
    w.digits.push_back(static_cast<std::uint32_t>(n % qj));
    n /= qj;
  }
  return w;
}

/// n = sum_j sigma_j q_1 ... q_{j-1}. Rejects out-of-range digits, a trailing
/// zero, and indices that do not fit in 64 bits.
inline std::uint64_t decode_word(const MoranSystem& sys, const MixedRadixWord& w) {
  if (w.digits.empty()) throw ValidationError("empty word");
  if (!w.last_nonzero()) throw ValidationError("word has a trailing zero digit");
  std::uint64_t n = 0, place = 1;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t j = 0; j < w.digits.size(); ++j) {
    const std::uint64_t qj = sys.q(j + 1);
    if (w.digits[j] >= qj) {
      throw ValidationError("digit " + std::to_string(w.digits[j]) + " out of range at position " +
                            std::to_string(j + 1));
    }
    if (w.digits[j] != 0 && place > (kMax - n) / w.digits[j]) {
      throw ValidationError("index overflows 64 bits");
    }
    n += w.digits[j] * place;
    if (j + 1 < w.digits.size()) {
      if (place > kMax / qj) throw ValidationError("index overflows 64 bits");
      place *= qj;
    }
  }
  return n;
}

}  // namespace moran
