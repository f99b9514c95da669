// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "moran/moran.hpp"

using namespace moran;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MoranSystem sys42() { return constant_system(4, 2); }
MoranSystem sys46() {
  return build_system(SequenceSpec::periodic({4, 6}), SequenceSpec::periodic({2, 3}));
}

std::vector<RhoExpansion> first_expansions(const Spectrum& sp, std::uint64_t count) {
  std::vector<RhoExpansion> out;
  out.reserve(count);
  for (std::uint64_t n = 0; n < count; ++n) out.push_back(sp.expansion(n));
  return out;
}

void orthogonality(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  auto s = sys42();
  auto can = pairwise_orthogonal(s, level_points(canonical_spectrum(s), 8));
  o.require(can.pairs_checked == 32640 && can.ok(), "canonical level 8");
  auto lac = pairwise_orthogonal(s, first_expansions(lacunary_spectrum(s), 2000));
  o.require(lac.ok(), "lacunary 2000");
  auto mid = pairwise_orthogonal(s, first_expansions(intermediate_spectrum(s, Target::parse("0.25")), 2000));
  o.require(mid.ok(), "intermediate t=0.25 2000");
  auto sw = pairwise_orthogonal(s, level_points(sign_word_spectrum(s, SignWord::periodic({1, -1})), 8));
  o.require(sw.ok(), "sign word +- level 8");
  const double sec = seconds_since(t0);
  o.require(sec < 30, "runtime");
  o.note << " pairs=" << can.pairs_checked + lac.pairs_checked + mid.pairs_checked + sw.pairs_checked
         << " failures=" << can.failure_count + lac.failure_count + mid.failure_count + sw.failure_count
         << " time=" << sec << "s";
}

void sandwich(Outcome& o) {
  auto s = sys42();
  const double ue = upper_entropy_dim(s, 64).value;
  std::vector<std::pair<std::string, Spectrum>> specs{
      {"canonical", canonical_spectrum(s)},
      {"lacunary", lacunary_spectrum(s)},
      {"t=0.1", intermediate_spectrum(s, Target::parse("0.1"))},
      {"t=0.25", intermediate_spectrum(s, Target::parse("0.25"))},
      {"t=0.4", intermediate_spectrum(s, Target::parse("0.4"))},
      {"w=+-", sign_word_spectrum(s, SignWord::periodic({1, -1}))},
      {"w=-", sign_word_spectrum(s, SignWord::all_minus())},
      {"continuum", continuum_family_sample(s, Target::parse("0.25"), BitSource::from_string("0110", 7))}};
  o.note << " ue=" << ue;
  for (const auto& [name, sp] : specs) {
    auto d = spectrum_dimension(sp, 10000);
    o.require(d.headline >= -0.05 && d.headline <= ue + 0.05, name);
    o.note << " " << name << "=" << d.headline;
  }
}

void canonical_dimension(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  auto s = sys42();
  auto pts = level_points(canonical_spectrum(s), 12);
  auto d = canonical_data(s, 12);
  auto e = detail::natural_estimate(pts, d, 12);
  const double f = beurling_formula_ims(d, 200).value;
  const double sec = seconds_since(t0);
  o.require(e.has_value() && std::abs(e->value - 0.5) <= 0.05, "estimate");
  o.require(std::abs(f - 0.5) < 1e-12, "formula");
  o.require(sec < 10, "runtime");
  o.note << " estimate=" << (e ? e->value : -1) << " formula=" << f << " time=" << sec << "s";
}

void intermediate(Outcome& o) {
  auto s = sys42();
  for (const char* txt : {"0.1", "0.25", "0.4"}) {
    const auto tg = Target::parse(txt);
    const auto th = thin_digits(s, tg, 256);
    const auto num = boost::multiprecision::numerator(tg.value).convert_to<unsigned>();
    const auto den = boost::multiprecision::denominator(tg.value).convert_to<unsigned>();
    bool ineq = !th.checkpoints.empty();
    for (auto k : th.checkpoints) {
      if (k + 1 > th.depth) continue;
      BigInt P = 1, B = 1;
      for (std::uint64_t i = 1; i <= k; ++i) {
        P *= th.at(i);
        B *= s.b(i);
      }
      ineq = ineq && pow_big(P, den) <= pow_big(B, num) &&
             pow_big(P * s.q(k + 1), den) > pow_big(B * s.b(k + 1), num);
    }
    o.require(ineq, std::string("checkpoints t=") + txt);
    const double f = beurling_formula_ims(thinned_data(s, th), 200).value;
    o.require(std::abs(f - tg.approx()) <= 0.02, std::string("formula t=") + txt);
    auto d = spectrum_dimension(intermediate_spectrum(s, tg, 256), 100000);
    o.require(std::abs(d.headline - tg.approx()) <= 0.07, std::string("estimate t=") + txt);
    o.note << " t=" << txt << ": checkpoints=" << th.checkpoints.size() << " formula=" << f
           << " estimate=" << d.headline;
  }
}

void lacunary(Outcome& o) {
  auto s = sys42();
  auto sp = lacunary_spectrum(s);
  auto rep = lacunary_check(s, first_expansions(sp, 10000), 2);
  o.require(rep.ok && rep.checked == 9999, "ratio >= 2");
  auto d = spectrum_dimension(sp, 9999);
  const auto& sm = d.full.samples;
  const auto n = sm.size();
  o.require(d.headline <= 0.1, "estimate");
  o.require(n >= 3 && sm[n - 3].log_ratio >= sm[n - 2].log_ratio && sm[n - 2].log_ratio >= sm[n - 1].log_ratio,
            "top octaves decreasing");
  o.note << " ratios_checked=" << rep.checked << " estimate=" << d.headline;
  if (n >= 3) o.note << " top=" << sm[n - 3].log_ratio << "," << sm[n - 2].log_ratio << "," << sm[n - 1].log_ratio;
}

void compatible_pairs(Outcome& o) {
  double worst = 0.0;
  for (auto s : {sys42(), sys46()}) {
    for (std::uint64_t k = 1; k <= 20; ++k) {
      for (int w : {1, -1}) o.require(compatible_pair_check(s, k, w).ok(), "pair k=" + std::to_string(k));
    }
    std::vector<Spectrum> specs{canonical_spectrum(s), sign_word_spectrum(s, SignWord::periodic({1, -1})),
                                sign_word_spectrum(s, SignWord::all_minus())};
    for (const auto& sp : specs) {
      for (std::uint64_t n = 1; n <= 5; ++n) {
        auto r = level_unitarity(s, n, level_points(sp, n));
        worst = std::max({worst, r.max_offdiag, r.max_diag_dev});
        o.require(r.exact_residue_pass && r.max_offdiag < 1e-9, "unitarity n=" + std::to_string(n));
      }
    }
  }
  o.note << " max_deviation=" << worst;
}

void completeness(Outcome& o) {
  auto s = sys42();
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> U(-1000000, 1000000);
  double worst = 0.0;
  for (std::uint64_t n = 1; n <= 6; ++n) {
    auto set = level_points(canonical_spectrum(s), n);
    for (int i = 0; i < 20; ++i) {
      worst = std::max(worst, std::abs(level_parseval(s, n, set, Rational(U(rng), 10000)) - 1.0));
    }
  }
  o.require(worst <= 1e-9, "level Parseval");
  o.note << " parseval_dev=" << worst;
  const std::vector<double> xi{0.0, 0.37};
  for (auto [name, sp] : {std::pair{"canonical", canonical_spectrum(s)}, std::pair{"lacunary", lacunary_spectrum(s)}}) {
    auto p = completeness_profile(sp, xi, 4096, 40);
    double lo = 1.0;
    for (double v : p.final_values) lo = std::min(lo, v);
    o.require(lo >= 0.999 && p.bounded, std::string(name) + " completeness");
    o.note << " " << name << "_min=" << lo;
  }
  auto pr = punctured_completeness(canonical_spectrum(s), 0.37, 4096, 40);
  o.require(pr.punctured_value < pr.deficit_bound + 1e-3, "punctured");
  o.note << " punctured=" << pr.punctured_value << " bound=" << pr.deficit_bound;
}

void entropy(Outcome& o) {
  auto rows = entropy_estimate(level_measure(sys42(), 12), {16});
  o.require(std::abs(rows[0].ratio - 0.5) <= 0.05, "ratio");
  o.note << " ratio=" << rows[0].ratio;
}

void nondecay(Outcome& o) {
  auto s = sys42();
  auto rows = fourier_nondecay_probe(s, 20, 30);
  double lo = 2, hi = -1;
  for (const auto& r : rows) {
    lo = std::min(lo, r.magnitude);
    hi = std::max(hi, r.magnitude);
  }
  o.require(hi - lo <= 2e-6 && lo >= 0.65, "common value");
  bool below = true;
  for (std::uint64_t k = 0; k <= 20; ++k) below = below && scaled_support_max(s, k, 64).below_one;
  o.require(below, "support bound");
  o.note << " min=" << lo << " max=" << hi;
}

void formula_oracle(Outcome& o) {
  std::mt19937_64 rng(2024);
  int close = 0, stable = 0;
  for (int i = 0; i < 50; ++i) {
    const std::uint64_t depth = 6 + rng() % 5;
    std::vector<std::uint64_t> n, m, t;
    BigInt N = 1, J = 0;
    for (std::uint64_t k = 1; k <= depth + 1; ++k) {
      const std::uint64_t nk = 2 + rng() % 5;
      const std::uint64_t mk = 1 + rng() % nk;
      std::uint64_t tk = 1;
      while (BigInt(tk) * N <= J) ++tk;
      tk = std::min<std::uint64_t>(tk + rng() % 2, 6);
      n.push_back(nk);
      m.push_back(mk);
      t.push_back(tk);
      J += BigInt(mk - 1) * tk * N;
      N *= nk;
    }
    IntegerMoranData d{SequenceSpec::prefix_then_periodic(n, {2}), SequenceSpec::prefix_then_periodic(m, {1}),
                       SequenceSpec::prefix_then_periodic(t, {1}), depth};
    if (!validate_cfd(d, depth).ok) continue;
    auto pts = integer_moran_set(d, depth);
    auto e = detail::natural_estimate(pts, d, depth);
    const double f = beurling_formula_ims(d, depth).value;
    if (!e || std::abs(e->value - f) <= 0.1) ++close;

    // window inequalities on a subset and a two-piece split
    std::vector<BigInt> sub, a, b;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j % 2 == 0) sub.push_back(pts[j]);
      (rng() % 2 ? a : b).push_back(pts[j]);
    }
    std::vector<BigInt> hs;
    for (BigInt h = 1; h <= pts.back(); h *= 3) hs.push_back(h);
    auto pu = window_counts(pts, hs), ps = window_counts(sub, hs), pa = window_counts(a, hs),
         pb = window_counts(b, hs);
    bool ok = true;
    for (std::size_t j = 0; j < hs.size(); ++j) {
      ok = ok && ps[j].max_count <= pu[j].max_count && pu[j].max_count <= pa[j].max_count + pb[j].max_count;
    }
    stable += ok ? 1 : 0;
  }
  o.require(close >= 48, "estimate vs formula");
  o.require(stable == 50, "window inequalities");
  o.note << " close=" << close << "/50 window_ok=" << stable << "/50";
}

void continuum(Outcome& o) {
  auto s = sys42();
  const auto tg = Target::parse("0.25");
  std::vector<Spectrum> fam;
  std::set<std::string> words;
  std::mt19937_64 rng(16);
  while (words.size() < 32) {
    std::string w;
    for (int i = 0; i < 16; ++i) w += rng() % 2 ? '1' : '0';
    if (words.insert(w).second) fam.push_back(continuum_family_sample(s, tg, BitSource::from_string(w, 99)));
  }
  std::vector<std::vector<RhoExpansion>> pts;
  for (const auto& sp : fam) pts.push_back(first_expansions(sp, 1001));
  int distinct = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) distinct += pts[i] != pts[j] ? 1 : 0;
  }
  o.require(distinct == 32 * 31 / 2, "pairwise distinct");
  int orth = 0, lac = 0;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    orth += pairwise_orthogonal(s, pts[i]).ok() ? 1 : 0;
    std::vector<RhoExpansion> irr{RhoExpansion{}};
    for (std::uint64_t n = 1; n <= 1000; ++n) {
      if (fam[i].part(n) == Part::irregular) irr.push_back(pts[i][n]);
    }
    lac += irr.size() > 2 && lacunary_check(s, irr, 2).ok ? 1 : 0;
  }
  o.require(orth == 32, "orthogonality");
  o.require(lac == 32, "lacunary irregular part");
  o.note << " distinct_pairs=" << distinct << " orthogonal=" << orth << "/32 lacunary=" << lac << "/32";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"exact orthogonality", orthogonality},
      {"dimension sandwich", sandwich},
      {"canonical dimension", canonical_dimension},
      {"intermediate values", intermediate},
      {"lacunary spectrum", lacunary},
      {"compatible pairs and level unitarity", compatible_pairs},
      {"level Parseval and completeness", completeness},
      {"entropy dimension", entropy},
      {"Fourier non-decay", nondecay},
      {"formula vs counting", formula_oracle},
      {"continuum family", continuum}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.note << " [exception: " << e.what() << "]";
    }
    std::printf("%s %2zu %s (%.1fs)%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                seconds_since(t0), o.note.str().c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
