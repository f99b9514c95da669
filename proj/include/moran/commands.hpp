#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "moran/moran.hpp"

namespace moran {

/// Output of one command: JSON records, CSV tables and integer lists, all
/// keyed by the config hash. `exit_code` is 3 when a mathematical check failed.
struct ResultRecord {
  std::string run_id;
  std::string command;
  std::vector<Json> records;
  std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::vector<std::string>>>> tables;
  std::map<std::string, std::vector<BigInt>> lists;
  double seconds = 0.0;
  int exit_code = 0;
};

namespace detail {

class Params {
 public:
  explicit Params(const Json& p) : p_(p) {}

  bool has(const char* key) const { return p_.contains(key); }

  std::uint64_t u64(const char* key, std::uint64_t def) const {
    if (!has(key)) return def;
    const Json& v = p_.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) bad(key, "a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::uint64_t u64(const char* key) const {
    if (!has(key)) throw ConfigError(std::string("$.params.") + key + ": missing");
    return u64(key, 0);
  }

  double real(const char* key, double def) const {
    if (!has(key)) return def;
    const Json& v = p_.at(key);
    if (!v.is_number()) bad(key, "a number");
    return v.get<double>();
  }

  std::string str(const char* key, std::string def) const {
    if (!has(key)) return def;
    const Json& v = p_.at(key);
    if (!v.is_string()) bad(key, "a string");
    return v.get<std::string>();
  }

  /// A decimal given either as a string ("0.25") or a JSON number.
  std::string decimal(const char* key) const {
    if (!has(key)) throw ConfigError(std::string("$.params.") + key + ": missing");
    const Json& v = p_.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    bad(key, "a decimal");
  }

  std::vector<double> reals(const char* key, std::vector<double> def) const {
    if (!has(key)) return def;
    const Json& v = p_.at(key);
    if (!v.is_array()) bad(key, "an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) bad(key, "an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<std::uint64_t> u64s(const char* key, std::vector<std::uint64_t> def) const {
    if (!has(key)) return def;
    const Json& v = p_.at(key);
    if (!v.is_array()) bad(key, "an array of integers");
    std::vector<std::uint64_t> out;
    for (const auto& x : v) {
      if (!x.is_number_integer() || x.get<std::int64_t>() < 0) bad(key, "an array of integers");
      out.push_back(x.get<std::uint64_t>());
    }
    return out;
  }

  /// A sequence rule object, or a bare array meaning a periodic rule.
  SequenceSpec sequence(const char* key) const {
    if (!has(key)) throw ConfigError(std::string("$.params.") + key + ": missing");
    const Json& v = p_.at(key);
    const std::string path = std::string("$.params.") + key;
    try {
      if (v.is_array()) return parse_sequence(Json{{"kind", "periodic"}, {"values", v}}, path);
      return parse_sequence(v, path);
    } catch (const ValidationError& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }

 private:
  [[noreturn]] static void bad(const char* key, const char* what) {
    throw ConfigError(std::string("$.params.") + key + ": expected " + what);
  }
  const Json& p_;
};

/// "+-" is the periodic word (+1, -1); "++|+-" has prefix "++".
inline SignWord parse_word(const std::string& s) {
  auto conv = [&](const std::string& part) {
    std::vector<int> v;
    for (char c : part) {
      if (c == '+') v.push_back(1);
      else if (c == '-') v.push_back(-1);
      else throw ConfigError("$.params.word: only '+', '-' and one '|' allowed");
    }
    return v;
  };
  auto bar = s.find('|');
  if (bar == std::string::npos) {
    if (s.empty()) throw ConfigError("$.params.word: empty");
    return SignWord::periodic(conv(s));
  }
  auto pattern = conv(s.substr(bar + 1));
  if (pattern.empty()) throw ConfigError("$.params.word: empty pattern");
  return SignWord::prefix_then_periodic(conv(s.substr(0, bar)), pattern);
}

inline Spectrum make_spectrum(const MoranSystem& sys, const Params& p, std::uint64_t index_cap) {
  const auto kind = p.str("kind", "canonical");
  const std::uint64_t depth = p.u64("depth", kDefaultThinningDepth);
  if (kind == "canonical") return canonical_spectrum(sys);
  if (kind == "lacunary") return lacunary_spectrum(sys);
  if (kind == "intermediate") return intermediate_spectrum(sys, Target::parse(p.decimal("t")), depth);
  if (kind == "signword") return sign_word_spectrum(sys, parse_word(p.str("word", "+")));
  if (kind == "continuum") {
    std::optional<std::uint64_t> seed;
    if (p.has("seed")) seed = p.u64("seed");
    auto bits = BitSource::from_string(p.str("bits", ""), seed);
    const auto t = p.has("t") ? Target::parse(p.decimal("t")) : Target::parse("0");
    return continuum_family_sample(sys, t, bits, index_cap, depth);
  }
  throw ConfigError("$.params.kind: unknown spectrum kind '" + kind + "'");
}

struct View {
  std::vector<BigInt> values;               // sorted
  std::vector<std::uint64_t> indices;       // parallel to values when known
  std::vector<std::string> parts;
  std::vector<RhoExpansion> by_index;       // index order, for sparse checks
  std::uint64_t omitted = 0;
};

/// Level view when "level" is given, otherwise indices 0..max_index.
inline View spectrum_view(const Spectrum& s, const Params& p, const Limits& lim) {
  View v;
  if (p.has("level")) {
    const auto k = p.u64("level");
    if (k == 0 || k > lim.max_level) {
      throw ValidationError("level " + std::to_string(k) + " outside 1.." + std::to_string(lim.max_level));
    }
    auto pts = s.by_level(k);
    Ladder ladder(s.system(), k);
    std::vector<std::pair<BigInt, std::size_t>> tmp;
    for (std::size_t i = 0; i < pts.size(); ++i) tmp.emplace_back(pts[i].lambda.to_bigint(ladder), i);
    std::sort(tmp.begin(), tmp.end());
    for (auto& [val, i] : tmp) {
      v.values.push_back(val);
      v.indices.push_back(pts[i].n);
      v.parts.push_back(part_name(pts[i].part));
    }
    for (auto& pt : pts) v.by_index.push_back(std::move(pt.lambda));
    return v;
  }
  const auto N = p.u64("max_index", 1000);
  if (N > lim.max_index) {
    throw ValidationError("max_index " + std::to_string(N) + " exceeds limit " + std::to_string(lim.max_index));
  }
  auto pts = s.by_index(N);
  auto ps = materialize(s.system(), pts, p.u64("max_bits", kDefaultMaxBits));
  v.values = std::move(ps.points);
  v.indices = std::move(ps.indices);
  for (auto n : v.indices) v.parts.push_back(part_name(pts[n].part));
  v.omitted = ps.omitted;
  for (auto& pt : pts) v.by_index.push_back(std::move(pt.lambda));
  return v;
}

inline std::vector<BigInt> read_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$.params.input: cannot open " + path);
  return read_integer_list(in);
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

inline Json dimension_json(const DimensionReport& d) {
  Json j = {{"value", d.value}, {"sampled", d.sampled}, {"converged", d.converged},
            {"mode", d.mode == LimitMode::limsup ? "limsup" : "liminf"}};
  if (d.exact) j["exact"] = *d.exact;
  return j;
}

inline Json estimate_json(const DimensionEstimate& e) {
  return {{"value", e.value}, {"slope", e.slope}, {"scales", e.samples.size()},
          {"tail_scales", e.tail_scales}, {"scale_source", e.scale_source}};
}

inline void estimate_table(ResultRecord& r, const std::string& name, const DimensionEstimate& e) {
  auto& t = r.tables[name];
  t.first = {"h", "max_count", "log_ratio"};
  for (const auto& s : e.samples) t.second.push_back({s.h, std::to_string(s.max_count), fmt(s.log_ratio)});
}

// ---- commands ----

inline void cmd_dims(const RunConfig& cfg, const Params& p, ResultRecord& r) {
  auto sys = cfg.system();
  const auto depth = p.u64("depth", kDefaultValidationDepth);
  auto ue = upper_entropy_dim(sys, depth);
  auto hd = hausdorff_support_dim(sys, depth);
  r.records.push_back({{"record", "dims"}, {"depth", depth},
                       {"upper_entropy_dim", dimension_json(ue)},
                       {"hausdorff_dim", dimension_json(hd)}});
  auto& t = r.tables["dims"];
  t.first = {"k", "log_Qk_over_log_Bk"};
  for (auto [k, v] : ue.prefix_samples) t.second.push_back({std::to_string(k), fmt(v)});
}

inline void cmd_spectrum_gen(const RunConfig& cfg, const Params& p, ResultRecord& r) {
  auto sys = cfg.system();
  auto spec = make_spectrum(sys, p, p.u64("max_index", 1000));
  auto v = spectrum_view(spec, p, cfg.limits);
  Json summary = {{"record", "spectrum"}, {"kind", kind_name(spec.kind())},
                  {"points", v.values.size()}, {"omitted", v.omitted}};
  for (const auto& [k, val] : spec.metadata()) summary["meta"][k] = val;
  r.records.push_back(summary);
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    r.records.push_back({{"record", "point"}, {"index", v.indices[i]},
                         {"lambda", to_string(v.values[i])}, {"part", v.parts[i]}});
  }
  r.lists["spectrum"] = v.values;
}

inline void cmd_spectrum_verify(const RunConfig& cfg, const Params& p, ResultRecord& r) {
  auto sys = cfg.system();
  const auto check = p.str("check", "orthogonality");
  bool pass = true;
  Json rec = {{"record", "verify"}, {"check", check}};

  if (check == "orthogonality") {
    OrthogonalityReport rep;
    if (p.has("input")) {
      rep = pairwise_orthogonal(sys, read_list_file(p.str("input", "")));
    } else {
      auto spec = make_spectrum(sys, p, p.u64("max_index", 1000));
      rep = pairwise_orthogonal(sys, spectrum_view(spec, p, cfg.limits).by_index);
    }
    pass = rep.ok();
    rec["pairs_checked"] = rep.pairs_checked;
    rec["failure_count"] = rep.failure_count;
    rec["exact"] = rep.exact;
    for (const auto& f : rep.failures) {
      r.records.push_back({{"record", "orthogonality_failure"}, {"a", f.a}, {"b", f.b},
                           {"difference", f.difference}});
    }
  } else if (check == "unitarity") {
    const auto n = p.u64("level");
    std::vector<BigInt> set;
    if (p.has("input")) {
      set = read_list_file(p.str("input", ""));
    } else {
      set = level_points(make_spectrum(sys, p, 0), n);
    }
    auto rep = level_unitarity(sys, n, set, cfg.limits.max_level, cfg.limits.max_matrix_dim);
    bool pairs = true;
    for (std::uint64_t k = 1; k <= n; ++k) {
      for (int w : {1, -1}) pairs = pairs && compatible_pair_check(sys, k, w).ok();
    }
    pass = rep.ok() && pairs;
    rec["matrix_dim"] = rep.matrix_dim;
    rec["max_offdiag"] = rep.max_offdiag;
    rec["max_diag_dev"] = rep.max_diag_dev;
    rec["exact_residue_pass"] = rep.exact_residue_pass;
    rec["compatible_pairs"] = pairs;
  } else if (check == "completeness") {
    const auto N = p.u64("max_index", 4096);
    if (N > cfg.limits.max_index) throw ValidationError("max_index exceeds limit");
    auto spec = make_spectrum(sys, p, N);
    const auto K = p.u64("K", 40);
    const double threshold = p.real("threshold", 0.999);
    auto prof = completeness_profile(spec, p.reals("xi", {0.0, 0.37}), N, K);
    auto& t = r.tables["completeness"];
    t.first = {"xi", "N", "partial_sum"};
    for (std::size_t s = 0; s < prof.xi_samples.size(); ++s) {
      for (std::size_t c = 0; c < prof.checkpoints.size(); ++c) {
        t.second.push_back({fmt(prof.xi_samples[s]), std::to_string(prof.checkpoints[c]),
                            fmt(prof.partial_sums[s][c])});
      }
      pass = pass && prof.final_values[s] >= threshold;
    }
    pass = pass && prof.monotone && prof.bounded;
    rec["xi"] = prof.xi_samples;
    rec["final_values"] = prof.final_values;
    rec["threshold"] = threshold;
    rec["monotone"] = prof.monotone;
    rec["bounded"] = prof.bounded;
  } else if (check == "punctured") {
    const auto N = p.u64("max_index", 4096);
    if (N > cfg.limits.max_index) throw ValidationError("max_index exceeds limit");
    auto spec = make_spectrum(sys, p, N);
    auto res = punctured_completeness(spec, p.real("xi", 0.37), N, p.u64("K", 40), p.u64("level", 3));
    pass = res.punctured_value <= res.deficit_bound + 1e-3;
    rec["removed_branch"] = res.removed_branch;
    rec["full_value"] = res.full_value;
    rec["punctured_value"] = res.punctured_value;
    rec["deficit_bound"] = res.deficit_bound;
  } else if (check == "separation") {
    auto rep = separation_check(sys, parse_word(p.str("word", "+")), p.u64("level", 3), cfg.limits.max_level);
    pass = rep.pass;
    rec["min_distance"] = rep.min_distance.str();
    rec["bound"] = rep.bound.str();
    rec["nearest_t"] = rep.nearest_t.str();
    rec["nearest_zero"] = to_string(rep.nearest_zero);
    rec["integer_reading_distance"] = to_string(rep.integer_reading_distance);
    rec["normalization"] = rep.normalization;
  } else if (check == "lacunary") {
    const auto ratio = p.u64("ratio", 2);
    LacunaryReport rep;
    if (p.has("input")) {
      rep = lacunary_check(read_list_file(p.str("input", "")), Rational(ratio));
    } else {
      auto spec = make_spectrum(sys, p, p.u64("max_index", 1000));
      rep = lacunary_check(sys, spectrum_view(spec, p, cfg.limits).by_index, static_cast<std::int64_t>(ratio));
    }
    pass = rep.ok;
    rec["checked"] = rep.checked;
    if (rep.first_violation) rec["first_violation"] = *rep.first_violation;
  } else {
    throw ConfigError("$.params.check: unknown check '" + check + "'");
  }
  rec["pass"] = pass;
  r.records.insert(r.records.begin(), rec);
  if (!pass) r.exit_code = 3;
}

inline void cmd_dim_beurling(const RunConfig& cfg, const Params& p, ResultRecord& r) {
  auto sys = cfg.system();
  if (p.has("input")) {
    auto pts = read_list_file(p.str("input", ""));
    std::sort(pts.begin(), pts.end());
    if (pts.size() < 2) throw ValidationError("need at least 2 points");
    auto e = beurling_estimate(pts, dyadic_scales(pts.back() - pts.front()), "dyadic");
    r.records.push_back({{"record", "beurling"}, {"headline", e.value}, {"rule", "dyadic"},
                         {"full", estimate_json(e)}});
    estimate_table(r, "beurling", e);
    return;
  }
  const auto N = p.u64("max_index", 10000);
  if (N > cfg.limits.max_index) throw ValidationError("max_index exceeds limit");
  auto spec = make_spectrum(sys, p, N);
  auto d = spectrum_dimension(spec, N, p.u64("formula_depth", 200));
  Json rec = {{"record", "beurling"}, {"kind", kind_name(spec.kind())}, {"headline", d.headline},
              {"rule", d.rule}, {"materialized", d.materialized}, {"omitted", d.omitted},
              {"full", estimate_json(d.full)}};
  if (d.regular) rec["regular"] = estimate_json(*d.regular);
  if (d.irregular) rec["irregular"] = estimate_json(*d.irregular);
  if (d.formula) {
    rec["formula"] = {{"value", d.formula->value}, {"sampled", d.formula->sampled}};
    if (d.formula->exact) rec["formula"]["exact"] = *d.formula->exact;
  }
  r.records.push_back(rec);
  estimate_table(r, "beurling", d.full);
  if (d.regular) estimate_table(r, "beurling_regular", *d.regular);
  if (d.irregular) estimate_table(r, "beurling_irregular", *d.irregular);
}

inline void cmd_dim_entropy(const RunConfig& cfg, const Params& p, ResultRecord& r) {
  auto sys = cfg.system();
  const auto m = p.u64("level", 12);
  auto mu = level_measure(sys, m, cfg.limits.max_level);
  std::vector<std::uint64_t> levels;
  if (p.has("dyadic")) {
    levels = p.u64s("dyadic", {});
  } else {
    for (std::uint64_t n = 1; (BigInt(16) << n) <= mu.denominator; ++n) levels.push_back(n);
  }
  auto rows = entropy_estimate(mu, levels);
  auto ue = upper_entropy_dim(sys, p.u64("depth", kDefaultValidationDepth));
  auto& t = r.tables["entropy"];
  t.first = {"n", "entropy", "ratio", "occupied_cells"};
  for (const auto& row : rows) {
    t.second.push_back({std::to_string(row.n), fmt(row.entropy), fmt(row.ratio),
                        std::to_string(row.occupied_cells)});
  }
  r.records.push_back({{"record", "entropy"}, {"level", m},
                       {"last_ratio", rows.empty() ? 0.0 : rows.back().ratio},
                       {"upper_entropy_dim", ue.value}});
}

inline void cmd_fourier_probe(const RunConfig& cfg, const Params& p, ResultRecord& r) {
  auto sys = cfg.system();
  const auto kmax = p.u64("kmax", 20);
  auto rows = fourier_nondecay_probe(sys, kmax, p.u64("K", 30));
  auto& t = r.tables["fourier_probe"];
  t.first = {"k", "magnitude", "tail_bound", "support_bound_below_one"};
  double lo = 2.0, hi = -1.0;
  bool below = true;
  for (const auto& row : rows) {
    auto sb = scaled_support_max(sys, row.k, p.u64("support_terms", 64));
    below = below && sb.below_one;
    t.second.push_back({std::to_string(row.k), fmt(row.magnitude), fmt(row.tail_bound),
                        sb.below_one ? "true" : "false"});
    if (row.k >= 1) {
      lo = std::min(lo, row.magnitude);
      hi = std::max(hi, row.magnitude);
    }
  }
  r.records.push_back({{"record", "fourier_probe"}, {"kmax", kmax}, {"min", lo}, {"max", hi},
                       {"spread", hi - lo}, {"support_below_one", below}});
}

inline void cmd_ims(const RunConfig& cfg, const Params& p, ResultRecord& r) {
  IntegerMoranData d{p.sequence("n"), p.sequence("m"), p.sequence("t"), std::nullopt};
  const auto depth = p.u64("depth", 8);
  if (depth == 0 || depth > 64) throw ValidationError("depth outside 1..64");
  auto cfd = validate_cfd(d, depth);
  if (!cfd.ok) {
    throw ValidationError("separation condition fails at k=" + std::to_string(*cfd.first_failure) +
                          ": " + to_string(cfd.lhs) + " <= " + to_string(cfd.rhs));
  }
  auto pts = integer_moran_set(d, depth, p.u64("max_points", cfg.limits.max_index));
  auto f = beurling_formula_ims(d, p.u64("formula_depth", std::max<std::uint64_t>(depth, 200)));
  Json rec = {{"record", "ims"}, {"depth", depth}, {"points", pts.size()},
              {"formula", f.value}, {"formula_sampled", f.sampled}};
  if (f.exact) rec["formula_exact"] = *f.exact;
  auto sc = scale_values(natural_scales(d, depth));
  if (pts.size() >= 2) {
    while (!sc.empty() && sc.back() > pts.back() - pts.front()) sc.pop_back();
    if (!sc.empty()) {
      auto e = beurling_estimate(pts, sc, "natural");
      rec["estimate"] = estimate_json(e);
      estimate_table(r, "ims", e);
    }
  }
  r.records.push_back(rec);
  r.lists["ims"] = std::move(pts);
}

}  // namespace detail

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"dims",        "spectrum-gen", "spectrum-verify",
                                              "dim-beurling", "dim-entropy", "fourier-probe",
                                              "ims"};
  return names;
}

/// Dispatches on cfg.command. Module errors propagate as ValidationError or
/// ConfigError; a failed check sets exit_code = 3.
inline ResultRecord run_command(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultRecord r;
  r.run_id = cfg.hash;
  r.command = cfg.command;
  Json params = cfg.params;
  std::string cmd = cfg.command;
  // "spectrum-<kind>" is shorthand for spectrum-gen with that kind
  if (cmd.rfind("spectrum-", 0) == 0 && cmd != "spectrum-gen" && cmd != "spectrum-verify") {
    params["kind"] = cmd.substr(9);
    cmd = "spectrum-gen";
  }
  detail::Params p(params);
  if (cmd == "dims") detail::cmd_dims(cfg, p, r);
  else if (cmd == "spectrum-gen") detail::cmd_spectrum_gen(cfg, p, r);
  else if (cmd == "spectrum-verify") detail::cmd_spectrum_verify(cfg, p, r);
  else if (cmd == "dim-beurling") detail::cmd_dim_beurling(cfg, p, r);
  else if (cmd == "dim-entropy") detail::cmd_dim_entropy(cfg, p, r);
  else if (cmd == "fourier-probe") detail::cmd_fourier_probe(cfg, p, r);
  else if (cmd == "ims") detail::cmd_ims(cfg, p, r);
  else if (cmd.empty()) throw ConfigError("$.command: missing");
  else throw ConfigError("$.command: unknown command '" + cmd + "'");
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace moran
