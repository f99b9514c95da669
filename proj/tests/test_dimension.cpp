#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "moran/moran.hpp"

using namespace moran;

namespace {

MoranSystem sys42() { return constant_system(4, 2); }

// max #(S cap [x, x+h]) over every integer start x in [min S - h, max S]
std::uint64_t brute_count(const std::vector<std::int64_t>& s, std::int64_t h) {
  std::uint64_t best = 0;
  for (std::int64_t x = s.front() - h; x <= s.back(); ++x) {
    std::uint64_t c = 0;
    for (auto p : s) c += (p >= x && p <= x + h) ? 1 : 0;
    best = std::max(best, c);
  }
  return best;
}

std::vector<std::int64_t> random_set(std::mt19937_64& rng, std::size_t n, std::int64_t span) {
  std::vector<std::int64_t> s;
  while (s.size() < n) s.push_back(static_cast<std::int64_t>(rng() % span));
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

// random IntegerMoranData with entries <= 6, t_k at or just above the separation bound
IntegerMoranData random_ims(std::mt19937_64& rng, std::uint64_t depth) {
  std::vector<std::uint64_t> n, m, t;
  BigInt N = 1, J = 0;
  for (std::uint64_t k = 1; k <= depth + 1; ++k) {
    const std::uint64_t nk = 2 + rng() % 5;
    const std::uint64_t mk = 1 + rng() % std::min<std::uint64_t>(nk, 6);
    std::uint64_t tk = 1;
    if (k > 1) {
      while (BigInt(tk) * N <= J) ++tk;
    }
    tk = std::min<std::uint64_t>(tk + rng() % 2, 6);  // the bound stays below 6 when m <= n
    n.push_back(nk);
    m.push_back(mk);
    t.push_back(tk);
    J += BigInt(mk - 1) * tk * N;
    N *= nk;
  }
  return {SequenceSpec::prefix_then_periodic(n, {2}), SequenceSpec::prefix_then_periodic(m, {1}),
          SequenceSpec::prefix_then_periodic(t, {1}), depth};
}

}  // namespace

TEST(WindowCounts, Examples) {
  std::vector<std::int64_t> s{0, 2, 8, 10};
  auto p = window_counts(s, std::vector<std::int64_t>{3, 11});
  EXPECT_EQ(p[0].max_count, 2u);
  EXPECT_EQ(p[1].max_count, 4u);
  auto one = window_counts(std::vector<std::int64_t>{0}, std::vector<std::int64_t>{1, 5, 100});
  for (const auto& x : one) EXPECT_EQ(x.max_count, 1u);
  EXPECT_THROW(window_counts(std::vector<std::int64_t>{2, 1}, std::vector<std::int64_t>{1}), ValidationError);
}

TEST(WindowCounts, AnchoredScanMatchesBruteForce) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    auto s = random_set(rng, 2 + rng() % 60, 1 + rng() % 10000);
    std::vector<std::int64_t> hs{0, 1, 2, 3, 7, 50, 333, 2000, 9999};
    auto prof = window_counts(s, hs);
    for (std::size_t i = 0; i < hs.size(); ++i) {
      EXPECT_EQ(prof[i].max_count, brute_count(s, hs[i]));
      if (i > 0) {
        EXPECT_GE(prof[i].max_count, prof[i - 1].max_count);
      }
      // the argmax window starts at a point of S
      EXPECT_TRUE(std::binary_search(s.begin(), s.end(), prof[i].left));
    }
  }
}

TEST(WindowCounts, MonotoneAndFinitelyStable) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_set(rng, 5 + rng() % 200, 100000);
    auto b = random_set(rng, 5 + rng() % 200, 100000);
    std::vector<std::int64_t> sub;
    for (auto x : a)
      if (rng() % 2) sub.push_back(x);
    if (sub.empty()) sub.push_back(a.front());
    std::vector<std::int64_t> u;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
    std::vector<std::int64_t> hs{1, 10, 100, 1000, 10000};
    auto pa = window_counts(a, hs), pb = window_counts(b, hs), pu = window_counts(u, hs),
         ps = window_counts(sub, hs);
    for (std::size_t i = 0; i < hs.size(); ++i) {
      EXPECT_LE(ps[i].max_count, pa[i].max_count);
      EXPECT_LE(pu[i].max_count, pa[i].max_count + pb[i].max_count);
    }
  }
}

TEST(Beurling, ArithmeticProgressionTendsToOne) {
  std::vector<std::int64_t> ap;
  for (std::int64_t i = 0; i <= 100000; ++i) ap.push_back(3 * i);
  std::vector<std::int64_t> hs;
  for (std::int64_t h = 4; h <= 300000; h *= 2) hs.push_back(h);
  auto e = beurling_estimate(ap, hs, "dyadic");
  EXPECT_GT(e.value, 0.9);
  EXPECT_LE(e.value, 1.0 + 1e-9);
  EXPECT_THROW(beurling_estimate(std::vector<std::int64_t>{0}, hs), ValidationError);
  EXPECT_THROW(beurling_estimate(ap, std::vector<std::int64_t>{8, 4}), ValidationError);
}

TEST(Beurling, CanonicalHalf) {
  auto s = sys42();
  auto pts = level_points(canonical_spectrum(s), 12);
  auto d = canonical_data(s, 12);
  auto e = *detail::natural_estimate(pts, d, 12);
  EXPECT_NEAR(e.value, 0.5, 0.05);
  for (const auto& x : e.samples) {
    EXPECT_GE(x.log_ratio, 0.0);
    EXPECT_LE(x.log_ratio, 1.0 + 1e-9);
  }
}

TEST(Beurling, LacunaryNearZero) {
  auto s = sys42();
  auto lac = lacunary_spectrum(s);
  auto ps = materialize(s, lac.by_index(10000));
  auto e = beurling_estimate(ps.points, dyadic_scales(ps.points.back()), "dyadic");
  EXPECT_LE(e.value, 0.1);
  const auto n = e.samples.size();
  EXPECT_GE(e.samples[n - 3].log_ratio, e.samples[n - 2].log_ratio);
  EXPECT_GE(e.samples[n - 2].log_ratio, e.samples[n - 1].log_ratio);
}

TEST(Formula, Examples) {
  IntegerMoranData d{SequenceSpec::constant(4), SequenceSpec::constant(2), SequenceSpec::constant(2), {}};
  auto f = beurling_formula_ims(d, 50);
  ASSERT_TRUE(f.exact.has_value());
  EXPECT_NEAR(f.value, 0.5, 1e-12);
  // m = 1 from some level on: finite set
  IntegerMoranData fin{SequenceSpec::constant(4), SequenceSpec::prefix_then_periodic({2, 2, 2}, {1}),
                       SequenceSpec::constant(2), {}};
  EXPECT_NEAR(beurling_formula_ims(fin, 50).value, 0.0, 1e-12);
  // thinned data follows the thinning target
  auto s = sys42();
  auto th = thin_digits(s, Target::parse("0.25"), 256);
  EXPECT_NEAR(beurling_formula_ims(thinned_data(s, th), 200).value, 0.25, 0.02);
}

TEST(Formula, CountingAgreesOnRandomData) {
  std::mt19937_64 rng(2024);
  int close = 0;
  for (int i = 0; i < 50; ++i) {
    const std::uint64_t depth = 6 + rng() % 5;
    auto d = random_ims(rng, depth);
    ASSERT_TRUE(validate_cfd(d, depth).ok);
    auto pts = integer_moran_set(d, depth);
    if (pts.size() < 2) {
      ++close;
      continue;
    }
    auto sc = scale_values(natural_scales(d, depth));
    while (!sc.empty() && sc.back() > pts.back()) sc.pop_back();
    if (sc.empty()) {
      ++close;
      continue;
    }
    auto e = beurling_estimate(pts, sc, "natural");
    auto f = beurling_formula_ims(d, depth);
    if (std::abs(e.value - f.value) <= 0.1) ++close;
  }
  EXPECT_GE(close, 48);
}

TEST(Lacunary, CheckExamples) {
  std::vector<BigInt> geo{0, 2, 4, 8, 16, 32, 64};
  EXPECT_TRUE(lacunary_check(geo, Rational(2)).ok);
  auto can = level_points(canonical_spectrum(sys42()), 4);
  auto r = lacunary_check(can, Rational(2));
  EXPECT_FALSE(r.ok);
  EXPECT_THROW(lacunary_check(std::vector<BigInt>{1, 2}, Rational(2)), ValidationError);
  EXPECT_THROW(lacunary_check(geo, Rational(1)), ValidationError);
  // sparse and integer checks agree
  auto s = sys42();
  auto lac = lacunary_spectrum(s);
  std::vector<RhoExpansion> ex;
  std::vector<BigInt> ints;
  for (std::uint64_t n = 0; n < 40; ++n) {
    ex.push_back(lac.expansion(n));
    ints.push_back(lac.lambda(n));
  }
  for (std::int64_t b : {2, 3, 14, 15, 1000}) {
    EXPECT_EQ(lacunary_check(s, ex, b).ok, lacunary_check(ints, Rational(b)).ok) << b;
  }
}

TEST(Entropy, Examples) {
  auto mu = level_measure(sys42(), 12);
  auto rows = entropy_estimate(mu, {16});
  EXPECT_NEAR(rows[0].ratio, 0.5, 0.05);
  EXPECT_THROW(entropy_estimate(mu, {21}), ValidationError);
  EXPECT_THROW(entropy_estimate(mu, {0}), ValidationError);
  for (std::uint64_t n = 1; n <= 20; ++n) EXPECT_LE(entropy_estimate(mu, {n})[0].ratio, 1.0 + 1e-12);

  // uniform grid {k / 2^10}: ratio 1 at n = 6
  AtomicMeasure grid;
  grid.denominator = 1024;
  for (int k = 0; k < 1024; ++k) grid.numerators.emplace_back(k);
  grid.weight = Rational(1, 1024);
  EXPECT_NEAR(entropy_estimate(grid, {6})[0].ratio, 1.0, 1e-12);
}

TEST(SpectrumDimension, DecomposedHeadline) {
  auto s = sys42();
  for (const char* t : {"0.1", "0.25", "0.4"}) {
    auto sp = intermediate_spectrum(s, Target::parse(t));
    auto d = spectrum_dimension(sp, 100000);
    ASSERT_TRUE(d.regular.has_value());
    ASSERT_TRUE(d.formula.has_value());
    EXPECT_NEAR(d.headline, std::stod(t), 0.07) << t;
    EXPECT_NEAR(d.formula->value, std::stod(t), 0.02) << t;
    EXPECT_GE(d.headline, d.regular->value);
  }
}
