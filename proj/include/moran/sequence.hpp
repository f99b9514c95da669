#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "moran/bigint.hpp"

namespace moran {

/// One block of a block program: `value` repeated `length` times per cycle.
/// A doubling block starts at `length` and doubles on every later cycle.
struct Block {
  std::uint64_t value = 0;
  std::uint64_t length = 1;
  bool doubling = false;
};

/// A total, computable rule for a positive integer sequence a_1, a_2, ...
///
/// Three encodings are supported:
///   - periodic:        values repeat forever
///   - prefix-periodic: a finite prefix, then `values` repeat forever
///   - block-program:   blocks are emitted cyclically; doubling blocks grow
///                      geometrically, so the sequence need not be periodic
class SequenceSpec {
 public:
  enum class Kind { periodic, prefix_periodic, block_program };

  static SequenceSpec periodic(std::vector<std::uint64_t> values) {
    SequenceSpec s;
    s.kind_ = Kind::periodic;
    s.period_ = std::move(values);
    s.check();
    return s;
  }

  static SequenceSpec constant(std::uint64_t value) { return periodic({value}); }

  static SequenceSpec prefix_then_periodic(std::vector<std::uint64_t> prefix,
                                           std::vector<std::uint64_t> period) {
    SequenceSpec s;
    s.kind_ = Kind::prefix_periodic;
    s.prefix_ = std::move(prefix);
    s.period_ = std::move(period);
    s.check();
    return s;
  }

  static SequenceSpec block_program(std::vector<Block> blocks,
                                    std::optional<std::uint64_t> declared_bound = std::nullopt) {
    SequenceSpec s;
    s.kind_ = Kind::block_program;
    s.blocks_ = std::move(blocks);
    s.declared_bound_ = declared_bound;
    s.check();
    return s;
  }

  Kind kind() const { return kind_; }
  const std::vector<std::uint64_t>& prefix() const { return prefix_; }
  const std::vector<std::uint64_t>& period() const { return period_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::optional<std::uint64_t> declared_bound() const { return declared_bound_; }

  /// True when the sequence is eventually periodic; doubling blocks break this.
  bool eventually_periodic() const {
    if (kind_ != Kind::block_program) return true;
    return std::none_of(blocks_.begin(), blocks_.end(), [](const Block& b) { return b.doubling; });
  }

  /// Term a_n, 1-based.
  std::uint64_t at(std::uint64_t n) const {
    if (n == 0) throw ValidationError("sequence index is 1-based");
    std::uint64_t i = n - 1;
    switch (kind_) {
      case Kind::periodic:
        return period_[i % period_.size()];
      case Kind::prefix_periodic:
        if (i < prefix_.size()) return prefix_[i];
        return period_[(i - prefix_.size()) % period_.size()];
      case Kind::block_program:
        return block_term(i);
    }
    return 0;
  }

  std::vector<std::uint64_t> take(std::uint64_t count) const {
    std::vector<std::uint64_t> out;
    out.reserve(count);
    for (std::uint64_t n = 1; n <= count; ++n) out.push_back(at(n));
    return out;
  }

  std::uint64_t max_value() const {
    std::uint64_t m = 0;
    for (auto v : all_values()) m = std::max(m, v);
    return m;
  }

  std::uint64_t min_value() const {
    std::uint64_t m = UINT64_MAX;
    for (auto v : all_values()) m = std::min(m, v);
    return m;
  }

  /// Length of the preperiod and of the period, for eventually periodic rules.
  std::pair<std::uint64_t, std::uint64_t> periodic_shape() const {
    if (!eventually_periodic()) throw ValidationError("sequence is not eventually periodic");
    if (kind_ == Kind::block_program) {
      std::uint64_t len = 0;
      for (const auto& b : blocks_) len += b.length;
      return {0, len};
    }
    return {prefix_.size(), period_.size()};
  }

 private:
  std::vector<std::uint64_t> all_values() const {
    std::vector<std::uint64_t> v = prefix_;
    v.insert(v.end(), period_.begin(), period_.end());
    for (const auto& b : blocks_) v.push_back(b.value);
    return v;
  }

  void check() const {
    if (kind_ == Kind::block_program) {
      if (blocks_.empty()) throw ValidationError("block program needs at least one block");
      for (const auto& b : blocks_) {
        if (b.value == 0) throw ValidationError("sequence terms must be positive");
        if (b.length == 0) throw ValidationError("block length must be positive");
        if (declared_bound_ && b.value > *declared_bound_) {
          throw ValidationError("block value " + std::to_string(b.value) +
                                " exceeds declared bound " + std::to_string(*declared_bound_));
        }
      }
      return;
    }
    if (period_.empty()) throw ValidationError("periodic part must be non-empty");
    for (auto v : all_values()) {
      if (v == 0) throw ValidationError("sequence terms must be positive");
    }
  }

  std::uint64_t block_term(std::uint64_t i) const {
    if (eventually_periodic()) i %= periodic_shape().second;
    for (std::uint64_t cycle = 0;; ++cycle) {
      for (const auto& b : blocks_) {
        std::uint64_t len = b.length;
        if (b.doubling) len = cycle >= 63 ? UINT64_MAX : b.length << cycle;
        if (i < len) return b.value;
        i -= len;
      }
    }
  }

  Kind kind_ = Kind::periodic;
  std::vector<std::uint64_t> prefix_;
  std::vector<std::uint64_t> period_;
  std::vector<Block> blocks_;
  std::optional<std::uint64_t> declared_bound_;
};

}  // namespace moran
