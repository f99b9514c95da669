#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "moran/moran.hpp"

using namespace moran;

namespace {

MoranSystem sys42() { return constant_system(4, 2); }
MoranSystem sys46() {
  return build_system(SequenceSpec::periodic({4, 6}), SequenceSpec::periodic({2, 3}));
}
// b = 8, q alternates between runs of 2 and runs of 4 whose lengths double
MoranSystem oscillating() {
  return build_system(SequenceSpec::constant(8),
                      SequenceSpec::block_program({{2, 1, true}, {4, 1, true}}));
}

}  // namespace

TEST(BigInt, ParsesDecimalsExactly) {
  EXPECT_EQ(parse_decimal("0.25"), Rational(1, 4));
  EXPECT_EQ(parse_decimal("0.1"), Rational(1, 10));
  EXPECT_EQ(parse_decimal("-1.05"), Rational(-21, 20));
  EXPECT_EQ(parse_bigint("007"), BigInt(7));  // never octal
  EXPECT_EQ(parse_bigint("-123456789012345678901234567890"),
            BigInt("-123456789012345678901234567890"));
  EXPECT_THROW(parse_bigint("12a"), ValidationError);
  EXPECT_THROW(parse_decimal(""), ValidationError);
}

TEST(Sequence, Encodings) {
  auto p = SequenceSpec::prefix_then_periodic({5, 7}, {1, 2});
  EXPECT_EQ(p.take(6), (std::vector<std::uint64_t>{5, 7, 1, 2, 1, 2}));
  auto b = SequenceSpec::block_program({{2, 1, true}, {4, 1, true}});
  // cycle 0: 2,4; cycle 1: 2,2,4,4; cycle 2: 2x4, 4x4
  EXPECT_EQ(b.take(10), (std::vector<std::uint64_t>{2, 4, 2, 2, 4, 4, 2, 2, 2, 2}));
  EXPECT_FALSE(b.eventually_periodic());
  EXPECT_THROW(SequenceSpec::periodic({}), ValidationError);
  EXPECT_THROW(SequenceSpec::periodic({0}), ValidationError);
  EXPECT_THROW(SequenceSpec::block_program({{9, 1, false}}, 8), ValidationError);
}

TEST(System, BuildExamples) {
  auto s = sys42();
  EXPECT_EQ(s.r(1), 2u);
  EXPECT_EQ(s.bound(), 4u);
  auto t = sys46();
  for (std::uint64_t n = 1; n <= 10; ++n) EXPECT_EQ(t.r(n), 2u);
  EXPECT_EQ(t.bound(), 6u);
  EXPECT_THROW(constant_system(4, 3), ValidationError);   // 3 does not divide 4
  EXPECT_THROW(constant_system(4, 4), ValidationError);   // q = b
  EXPECT_THROW(constant_system(2, 1), ValidationError);   // q < 2
  EXPECT_THROW(constant_system(6, 4), ValidationError);   // 4 does not divide 6
  EXPECT_NO_THROW(constant_system(6, 3));
}

TEST(System, ScaleLadder) {
  auto s = sys42();
  auto a = scale_ladder(s, 1);
  EXPECT_EQ(a.B, 4);
  EXPECT_EQ(a.Q, 2);
  EXPECT_EQ(a.rho, 2);
  auto c = scale_ladder(s, 3);
  EXPECT_EQ(c.B, 64);
  EXPECT_EQ(c.Q, 8);
  EXPECT_EQ(c.rho, 32);
  // rho_k = r_k B_{k-1} and q_k rho_k = B_k on a mixed system
  auto t = sys46();
  Ladder L(t, 12);
  for (std::uint64_t k = 1; k <= 12; ++k) {
    auto st = scale_ladder(t, k);
    EXPECT_EQ(st.B, L.B(k));
    EXPECT_EQ(st.rho, L.rho(k));
    EXPECT_EQ(L.rho(k) * t.q(k), L.B(k));
    EXPECT_EQ(L.rho(k), L.B(k - 1) * t.r(k));
  }
  EXPECT_EQ(scale_ladder(t, 1).rho, t.r(1));
  EXPECT_THROW(scale_ladder(t, 0), ValidationError);
}

TEST(System, EntropyAndHausdorffDimensions) {
  auto ue = upper_entropy_dim(sys42(), 64);
  ASSERT_TRUE(ue.exact.has_value());
  EXPECT_NEAR(ue.value, 0.5, 1e-12);
  EXPECT_TRUE(ue.converged);
  EXPECT_NEAR(hausdorff_support_dim(sys42(), 64).value, 0.5, 1e-12);

  const double oracle = std::log(6.0) / std::log(24.0);
  EXPECT_NEAR(upper_entropy_dim(sys46(), 64).value, oracle, 1e-12);
  EXPECT_NEAR(hausdorff_support_dim(sys46(), 64).value, oracle, 1e-12);
  EXPECT_NEAR(oracle, 0.563791, 1e-6);
}

TEST(System, OscillatingBlockProgramSeparatesLimits) {
  auto s = oscillating();
  const std::uint64_t depth = 1000;
  // oracle: direct prefix scan over the second half
  double lq = 0, lb = 0, hi = -1, lo = 2;
  for (std::uint64_t k = 1; k <= depth; ++k) {
    lq += std::log(static_cast<double>(s.q(k)));
    lb += std::log(8.0);
    if (k > depth / 2) {
      hi = std::max(hi, lq / lb);
      lo = std::min(lo, lq / lb);
    }
  }
  auto ue = upper_entropy_dim(s, depth);
  auto hd = hausdorff_support_dim(s, depth);
  EXPECT_FALSE(ue.exact.has_value());
  EXPECT_NEAR(ue.value, hi, 1e-12);
  EXPECT_NEAR(hd.value, lo, 1e-12);
  EXPECT_GT(ue.value - hd.value, 0.05);
  for (const auto& [k, r] : ue.prefix_samples) {
    EXPECT_GE(r, 1.0 / 3 - 1e-12);
    EXPECT_LE(r, 2.0 / 3 + 1e-12);
  }
}

TEST(System, SandwichOnRandomPeriodicSystems) {
  // dim_H <= ue and both lie in (0, 1) for any admissible system
  std::mt19937_64 rng(11);
  const std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs{
      {4, 2}, {6, 2}, {6, 3}, {8, 2}, {8, 4}, {9, 3}, {10, 5}, {12, 6}, {12, 4}};
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::uint64_t> b, q;
    const auto len = 1 + rng() % 4;
    for (std::uint64_t i = 0; i < len; ++i) {
      auto [bb, qq] = pairs[rng() % pairs.size()];
      b.push_back(bb);
      q.push_back(qq);
    }
    auto s = build_system(SequenceSpec::periodic(b), SequenceSpec::periodic(q));
    auto ue = upper_entropy_dim(s, 64), hd = hausdorff_support_dim(s, 64);
    EXPECT_LE(hd.value, ue.value + 1e-12);
    EXPECT_GT(hd.value, 0.0);
    EXPECT_LT(ue.value, 1.0);
  }
}

TEST(MixedRadix, EncodeDecodeExamples) {
  auto s2 = sys42();
  EXPECT_EQ(encode_index(s2, 3).digits, (std::vector<std::uint32_t>{1, 1}));
  EXPECT_EQ(encode_index(s2, 1).digits, (std::vector<std::uint32_t>{1}));
  auto s23 = sys46();
  EXPECT_EQ(encode_index(s23, 7).digits, (std::vector<std::uint32_t>{1, 0, 1}));
  EXPECT_EQ(decode_word(s2, MixedRadixWord{{1, 1}}), 3u);
  EXPECT_EQ(decode_word(s2, MixedRadixWord{{0, 1}}), 2u);
  EXPECT_EQ(decode_word(s2, MixedRadixWord{{1}}), 1u);
  EXPECT_THROW(decode_word(s2, MixedRadixWord{{1, 0}}), ValidationError);
  EXPECT_THROW(decode_word(s2, MixedRadixWord{{2}}), ValidationError);
  EXPECT_THROW(encode_index(s2, 0), ValidationError);
}

TEST(MixedRadix, RoundTripAndExhaustiveDepth3) {
  auto s = sys46();
  // oracle: enumerate every word of depth <= 3 with a nonzero top digit
  std::uint64_t seen = 0;
  for (std::uint32_t a = 0; a < 2; ++a)
    for (std::uint32_t b = 0; b < 3; ++b)
      for (std::uint32_t c = 1; c < 2; ++c) {
        MixedRadixWord w{{a, b, c}};
        const auto n = a + 2 * b + 6 * c;
        EXPECT_EQ(decode_word(s, w), n);
        EXPECT_EQ(encode_index(s, n), w);
        ++seen;
      }
  EXPECT_EQ(seen, 6u);
  for (std::uint64_t n = 1; n < 5000; ++n) {
    auto w = encode_index(s, n);
    EXPECT_TRUE(w.last_nonzero());
    EXPECT_EQ(decode_word(s, w), n);
  }
}
