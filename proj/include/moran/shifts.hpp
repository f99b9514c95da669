#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moran/system.hpp"
#include "moran/thinning.hpp"

namespace moran {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Explicit finite bit string, optionally extended past its end by
/// bit(i) = lowest bit of splitmix64(seed + i).
struct BitSource {
  std::vector<bool> bits;
  std::optional<std::uint64_t> seed;

  static BitSource from_string(const std::string& s, std::optional<std::uint64_t> seed = {}) {
    BitSource src;
    src.seed = seed;
    for (char c : s) {
      if (c != '0' && c != '1') throw ValidationError("bit string may only contain 0 and 1");
      src.bits.push_back(c == '1');
    }
    return src;
  }

  bool bit(std::uint64_t i) const {
    if (i < bits.size()) return bits[i];
    if (seed) return (detail::splitmix64(*seed + i) & 1U) != 0;
    throw ValidationError("bit string too short: bit " + std::to_string(i) + " requested, " +
                          std::to_string(bits.size()) + " supplied");
  }

  std::string str() const {
    std::string s;
    for (bool b : bits) s.push_back(b ? '1' : '0');
    return s;
  }
};

/// A sequence w_1 w_2 ... in {-1, +1}: a finite prefix followed by a repeating
/// pattern, or driven by a bit source (bit 1 -> -1).
class SignWord {
 public:
  static SignWord all_plus() { return periodic({1}); }
  static SignWord all_minus() { return periodic({-1}); }
  static SignWord periodic(std::vector<int> pattern) { return prefix_then_periodic({}, std::move(pattern)); }
  static SignWord prefix_then_periodic(std::vector<int> prefix, std::vector<int> pattern) {
    SignWord w;
    w.prefix_ = std::move(prefix);
    w.pattern_ = std::move(pattern);
    if (w.pattern_.empty()) throw ValidationError("sign word pattern must be non-empty");
    for (int s : w.prefix_) check(s);
    for (int s : w.pattern_) check(s);
    return w;
  }
  static SignWord from_bits(BitSource bits) {
    SignWord w;
    w.bits_ = std::move(bits);
    return w;
  }

  int at(std::uint64_t i) const {
    if (i == 0) throw ValidationError("sign word index is 1-based");
    if (bits_) return bits_->bit(i - 1) ? -1 : 1;
    if (i <= prefix_.size()) return prefix_[i - 1];
    return pattern_[(i - 1 - prefix_.size()) % pattern_.size()];
  }

  std::string describe() const {
    if (bits_) return "bits:" + bits_->str();
    auto fmt = [](const std::vector<int>& v) {
      std::string s;
      for (int x : v) s += (x > 0 ? '+' : '-');
      return s;
    };
    return (prefix_.empty() ? "" : fmt(prefix_) + "|") + "(" + fmt(pattern_) + ")";
  }

 private:
  static void check(int s) {
    if (s != 1 && s != -1) throw ValidationError("sign word terms must be +1 or -1");
  }
  std::vector<int> prefix_;
  std::vector<int> pattern_{1};
  std::optional<BitSource> bits_;
};

/// Shift sequence {s_n}: how far below the word of n its extra label sits.
///
///   all_zero        s_n = 0 (canonical labeling)
///   identity        s_n = n
///   zero_on_gamma   s_n = 0 on Gamma_t, n elsewhere
///   square_choice   s_n = 0 on Gamma_t (if any), else n^2 + bit, bits consumed
///                   in order of the indices outside Gamma_t
///   custom          table lookup, 0 where absent
class ShiftSequence {
 public:
  enum class Rule { all_zero, identity, zero_on_gamma, square_choice, custom };

  static ShiftSequence all_zero() { return ShiftSequence(Rule::all_zero); }
  static ShiftSequence identity() { return ShiftSequence(Rule::identity); }
  static ShiftSequence zero_on_gamma(MoranSystem sys, ThinnedDigits gamma) {
    ShiftSequence s(Rule::zero_on_gamma);
    s.sys_.emplace(std::move(sys));
    s.gamma_.emplace(std::move(gamma));
    return s;
  }
  static ShiftSequence square_choice(BitSource bits, std::optional<MoranSystem> sys = {},
                                     std::optional<ThinnedDigits> gamma = {}) {
    ShiftSequence s(Rule::square_choice);
    s.bits_ = std::move(bits);
    if (gamma && !sys) throw ValidationError("square_choice with Gamma needs the system");
    s.sys_ = std::move(sys);
    s.gamma_ = std::move(gamma);
    return s;
  }
  static ShiftSequence custom(std::map<std::uint64_t, std::uint64_t> table) {
    ShiftSequence s(Rule::custom);
    s.table_ = std::move(table);
    return s;
  }

  Rule rule() const { return rule_; }
  const std::optional<ThinnedDigits>& gamma() const { return gamma_; }
  const BitSource& bits() const { return bits_; }

  bool on_gamma(std::uint64_t n) const { return gamma_ && in_gamma(*sys_, *gamma_, n); }

  /// 0-based position of n among the indices outside Gamma_t.
  std::uint64_t rank_off_gamma(std::uint64_t n) const {
    std::uint64_t inside = gamma_ ? count_gamma_upto(*sys_, *gamma_, n - 1) : 0;
    return (n - 1) - inside;
  }

  /// Number of bits consumed by indices 1..N.
  std::uint64_t required_bits(std::uint64_t N) const {
    if (rule_ != Rule::square_choice || N == 0) return 0;
    return N - (gamma_ ? count_gamma_upto(*sys_, *gamma_, N) : 0);
  }

  std::uint64_t at(std::uint64_t n) const {
    if (n == 0) throw ValidationError("shift index is 1-based");
    switch (rule_) {
      case Rule::all_zero:
        return 0;
      case Rule::identity:
        return n;
      case Rule::zero_on_gamma:
        return on_gamma(n) ? 0 : n;
      case Rule::square_choice:
        if (on_gamma(n)) return 0;
        if (n > 3'000'000'000ULL) throw ValidationError("square shift overflows");
        return n * n + (bits_.bit(rank_off_gamma(n)) ? 1 : 0);
      case Rule::custom: {
        auto it = table_.find(n);
        return it == table_.end() ? 0 : it->second;
      }
    }
    return 0;
  }

  std::string describe() const {
    switch (rule_) {
      case Rule::all_zero: return "all-zero";
      case Rule::identity: return "identity";
      case Rule::zero_on_gamma: return "zero-on-gamma";
      case Rule::square_choice: return "square-choice";
      case Rule::custom: return "custom";
    }
    return "";
  }

 private:
  explicit ShiftSequence(Rule r) : rule_(r) {}

  Rule rule_;
  std::optional<MoranSystem> sys_;
  std::optional<ThinnedDigits> gamma_;
  BitSource bits_;
  std::map<std::uint64_t, std::uint64_t> table_;
};

}  // namespace moran
