// moranctl: command-line front end for the moran library.
//
//   moranctl [--config FILE] [--out DIR] [--b 4] [--q 2] <command> [options]
//
// Commands: dims | spectrum gen | spectrum verify | dim beurling | dim entropy
//           | fourier probe | ims
// Inline options override the params of a config file. Exit codes: 0 ok,
// 1 config error, 2 validation error, 3 a check failed.

#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "moran/commands.hpp"

namespace fs = std::filesystem;
using moran::Json;

namespace {

enum class Type { integer, real, text, decimal, int_list, real_list };

struct Flag {
  std::string key;
  Type type;
  std::string raw;
  CLI::Option* opt = nullptr;
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Json convert(const Flag& f) {
  const std::string path = "--" + f.key;
  try {
    switch (f.type) {
      case Type::integer: {
        std::size_t pos = 0;
        auto v = std::stoll(f.raw, &pos);
        if (pos != f.raw.size()) break;
        return v;
      }
      case Type::real:
        return std::stod(f.raw);
      case Type::text:
      case Type::decimal:
        return f.raw;
      case Type::int_list: {
        Json a = Json::array();
        for (const auto& x : split(f.raw)) a.push_back(std::stoll(x));
        return a;
      }
      case Type::real_list: {
        Json a = Json::array();
        for (const auto& x : split(f.raw)) a.push_back(std::stod(x));
        return a;
      }
    }
  } catch (const std::exception&) {
  }
  throw moran::ConfigError(path + ": malformed value '" + f.raw + "'");
}

Json periodic(const std::string& list) {
  Json v = Json::array();
  try {
    for (const auto& x : split(list)) v.push_back(std::stoll(x));
  } catch (const std::exception&) {
    throw moran::ConfigError("malformed sequence '" + list + "'");
  }
  return {{"kind", "periodic"}, {"values", v}};
}

std::string csv_of(const std::string& hash, const auto& table) {
  return moran::csv_table(hash, table.first, table.second);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra of Moran measures: construction, verification and dimension estimates"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path, out_dir, b_list, q_list, stem;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "directory for CSV, JSONL and integer-list artifacts");
  app.add_option("--stem", stem, "file name stem for artifacts (default: command name)");
  app.add_option("--b", b_list, "periodic b values, comma separated (default 4)");
  app.add_option("--q", q_list, "periodic q values, comma separated (default 2)");
  app.add_flag("--quiet", quiet, "do not echo records to stdout");

  std::vector<std::unique_ptr<Flag>> flags;
  auto flag = [&](CLI::App* sub, const std::string& name, Type type, const std::string& help) {
    auto f = std::make_unique<Flag>();
    f->key = name;
    f->type = type;
    f->opt = sub->add_option("--" + name, f->raw, help);
    flags.push_back(std::move(f));
  };
  std::string chosen;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& cmd,
                  const std::string& help) {
    auto* sub = parent->add_subcommand(name, help);
    sub->callback([&chosen, cmd] { chosen = cmd; });
    return sub;
  };
  auto spectrum_flags = [&](CLI::App* sub) {
    flag(sub, "kind", Type::text, "canonical | lacunary | intermediate | signword | continuum");
    flag(sub, "level", Type::integer, "level view: indices below Q_k using scales up to rho_k");
    flag(sub, "max-index", Type::integer, "index view: indices 0..N");
    flag(sub, "t", Type::decimal, "target dimension (exact decimal)");
    flag(sub, "word", Type::text, "sign word, e.g. +- or ++|+-");
    flag(sub, "bits", Type::text, "bit string for the continuum family");
    flag(sub, "seed", Type::integer, "seed extending the bit string");
    flag(sub, "depth", Type::integer, "thinning depth");
    flag(sub, "max-bits", Type::integer, "magnitude cap for materialized points");
  };

  auto* dims = leaf(&app, "dims", "dims", "upper entropy and Hausdorff dimension of the system");
  flag(dims, "depth", Type::integer, "prefix depth");

  auto* spectrum = app.add_subcommand("spectrum", "generate or verify spectra");
  spectrum->require_subcommand(1);
  auto* gen = leaf(spectrum, "gen", "spectrum-gen", "materialize a spectrum");
  spectrum_flags(gen);
  auto* verify = leaf(spectrum, "verify", "spectrum-verify", "run a verification check");
  spectrum_flags(verify);
  flag(verify, "check", Type::text, "orthogonality | unitarity | completeness | punctured | separation | lacunary");
  flag(verify, "input", Type::text, "integer list file instead of a generated spectrum");
  flag(verify, "xi", Type::real_list, "xi samples in [0,1)");
  flag(verify, "K", Type::integer, "Fourier factors beyond the top scale");
  flag(verify, "threshold", Type::real, "completeness pass threshold");
  flag(verify, "ratio", Type::integer, "lacunarity ratio");

  auto* dim = app.add_subcommand("dim", "dimension estimates");
  dim->require_subcommand(1);
  auto* beurling = leaf(dim, "beurling", "dim-beurling", "counting estimate of the Beurling dimension");
  spectrum_flags(beurling);
  flag(beurling, "input", Type::text, "integer list file (dyadic scales)");
  flag(beurling, "formula-depth", Type::integer, "depth for the closed-form value");
  auto* entropy = leaf(dim, "entropy", "dim-entropy", "dyadic entropy of the level measure");
  flag(entropy, "level", Type::integer, "measure level m");
  flag(entropy, "dyadic", Type::int_list, "dyadic levels n");
  flag(entropy, "depth", Type::integer, "depth for the closed-form value");

  auto* fourier = app.add_subcommand("fourier", "Fourier transform tools");
  fourier->require_subcommand(1);
  auto* probe = leaf(fourier, "probe", "fourier-probe", "|mu-hat(B_k)| for k <= kmax");
  flag(probe, "kmax", Type::integer, "largest k");
  flag(probe, "K", Type::integer, "extra factors");
  flag(probe, "support-terms", Type::integer, "terms in the support bound");

  auto* ims = leaf(&app, "ims", "ims", "integer Moran set with its dimension formula");
  flag(ims, "n", Type::int_list, "periodic n values");
  flag(ims, "m", Type::int_list, "periodic m values");
  flag(ims, "t", Type::int_list, "periodic t values");
  flag(ims, "depth", Type::integer, "levels to materialize");
  flag(ims, "formula-depth", Type::integer, "depth for the closed-form value");
  flag(ims, "max-points", Type::integer, "point limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    Json j = Json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw moran::ConfigError(config_path + ": cannot open");
      try {
        j = Json::parse(in);
      } catch (const Json::parse_error& e) {
        throw moran::ConfigError(config_path + ": " + e.what());
      }
      if (!j.is_object()) throw moran::ConfigError("$: expected an object");
    }
    if (!b_list.empty()) j["b"] = periodic(b_list);
    if (!q_list.empty()) j["q"] = periodic(q_list);
    if (!j.contains("b")) j["b"] = periodic("4");
    if (!j.contains("q")) j["q"] = periodic("2");
    if (!chosen.empty()) {
      if (j.contains("command") && j["command"] != chosen) j["params"] = Json::object();
      j["command"] = chosen;
    }
    for (const auto& f : flags) {
      if (f->opt->count() == 0) continue;
      std::string key = f->key;
      for (auto& c : key) c = c == '-' ? '_' : c;
      j["params"][key] = convert(*f);
    }
    if (j.contains("params") && j["params"].is_null()) j["params"] = Json::object();

    auto cfg = moran::parse_config_json(j);
    auto result = moran::run_command(cfg);

    const std::string base = stem.empty() ? cfg.command : stem;
    auto text = moran::jsonl(cfg.hash, result.records);
    if (!quiet) std::cout << text;
    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      moran::write_atomic(fs::path(out_dir) / (base + ".jsonl"), text);
      moran::write_atomic(fs::path(out_dir) / (base + ".config.json"), cfg.resolved.dump(2) + "\n");
      for (const auto& [name, table] : result.tables) {
        moran::write_atomic(fs::path(out_dir) / (name + ".csv"), csv_of(cfg.hash, table));
      }
      for (const auto& [name, list] : result.lists) {
        std::string s = "# config_hash=" + cfg.hash + "\n";
        for (const auto& v : list) s += moran::to_string(v) + "\n";
        moran::write_atomic(fs::path(out_dir) / (name + ".txt"), s);
      }
    }
    return result.exit_code;
  } catch (const moran::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const moran::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
