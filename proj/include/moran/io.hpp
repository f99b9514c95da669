#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "moran/bigint.hpp"
#include "moran/sequence.hpp"
#include "moran/system.hpp"

namespace moran {

/// Schema problem in a configuration; the message starts with the field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;

struct Limits {
  std::uint64_t max_level = 12;
  std::uint64_t max_index = 100000;
  std::uint64_t max_matrix_dim = 1024;
};

/// A parsed run configuration. `resolved` is the input with every default
/// filled in; its canonical dump is what `hash` is computed from.
struct RunConfig {
  std::string name;
  SequenceSpec b = SequenceSpec::constant(4);
  SequenceSpec q = SequenceSpec::constant(2);
  std::uint64_t validation_depth = kDefaultValidationDepth;
  std::string command;
  Json params = Json::object();
  Limits limits;
  Json resolved;
  std::string hash;

  MoranSystem system() const { return MoranSystem(b, q, name, validation_depth); }
};

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string config_hash(const Json& j) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

namespace detail {

inline std::uint64_t positive_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() <= 0) {
    throw ConfigError(path + ": expected a positive integer");
  }
  return j.get<std::uint64_t>();
}

inline std::vector<std::uint64_t> positive_list(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path + ": expected a non-empty array");
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(positive_int(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + "." + key + ": missing");
  return j.at(key);
}

}  // namespace detail

/// Sequence rule from JSON:
///   {"kind": "periodic", "values": [...]}
///   {"kind": "prefix-periodic", "prefix": [...], "values": [...]}
///   {"kind": "block-program", "blocks": [{"value": v, "length": n, "doubling": false}], "bound": M}
inline SequenceSpec parse_sequence(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  const Json& kind = detail::field(j, "kind", path);
  if (!kind.is_string()) throw ConfigError(path + ".kind: expected a string");
  const auto k = kind.get<std::string>();
  if (k == "periodic") return SequenceSpec::periodic(detail::positive_list(detail::field(j, "values", path), path + ".values"));
  if (k == "prefix-periodic") {
    std::vector<std::uint64_t> prefix;
    if (j.contains("prefix") && !j.at("prefix").empty()) {
      prefix = detail::positive_list(j.at("prefix"), path + ".prefix");
    }
    return SequenceSpec::prefix_then_periodic(
        prefix, detail::positive_list(detail::field(j, "values", path), path + ".values"));
  }
  if (k == "block-program") {
    const Json& blocks = detail::field(j, "blocks", path);
    if (!blocks.is_array() || blocks.empty()) throw ConfigError(path + ".blocks: expected a non-empty array");
    std::vector<Block> out;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const std::string bp = path + ".blocks[" + std::to_string(i) + "]";
      Block b;
      b.value = detail::positive_int(detail::field(blocks[i], "value", bp), bp + ".value");
      b.length = detail::positive_int(detail::field(blocks[i], "length", bp), bp + ".length");
      if (blocks[i].contains("doubling")) {
        if (!blocks[i]["doubling"].is_boolean()) throw ConfigError(bp + ".doubling: expected a boolean");
        b.doubling = blocks[i]["doubling"].get<bool>();
      }
      out.push_back(b);
    }
    std::optional<std::uint64_t> bound;
    if (j.contains("bound")) bound = detail::positive_int(j.at("bound"), path + ".bound");
    return SequenceSpec::block_program(out, bound);
  }
  throw ConfigError(path + ".kind: unknown kind '" + k + "'");
}

inline Json sequence_to_json(const SequenceSpec& s) {
  switch (s.kind()) {
    case SequenceSpec::Kind::periodic:
      return {{"kind", "periodic"}, {"values", s.period()}};
    case SequenceSpec::Kind::prefix_periodic:
      return {{"kind", "prefix-periodic"}, {"prefix", s.prefix()}, {"values", s.period()}};
    case SequenceSpec::Kind::block_program: {
      Json blocks = Json::array();
      for (const auto& b : s.blocks()) {
        blocks.push_back({{"value", b.value}, {"length", b.length}, {"doubling", b.doubling}});
      }
      Json j = {{"kind", "block-program"}, {"blocks", blocks}};
      if (s.declared_bound()) j["bound"] = *s.declared_bound();
      return j;
    }
  }
  return {};
}

/// Validates the schema and fills defaults. System invariants are checked by
/// `RunConfig::system()` and surface as ValidationError.
inline RunConfig parse_config_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("$: expected an object");
  static const std::vector<std::string> known{"name", "b", "q", "validation_depth", "command",
                                              "params", "limits"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("$." + key + ": unknown field");
    }
  }
  RunConfig cfg;
  try {
    cfg.b = parse_sequence(detail::field(j, "b", "$"), "$.b");
    cfg.q = parse_sequence(detail::field(j, "q", "$"), "$.q");
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("$: ") + e.what());
  }
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ConfigError("$.name: expected a string");
    cfg.name = j["name"].get<std::string>();
  }
  if (j.contains("validation_depth")) {
    cfg.validation_depth = detail::positive_int(j["validation_depth"], "$.validation_depth");
  }
  if (j.contains("command")) {
    if (!j["command"].is_string()) throw ConfigError("$.command: expected a string");
    cfg.command = j["command"].get<std::string>();
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("$.params: expected an object");
    cfg.params = j["params"];
  }
  if (j.contains("limits")) {
    const Json& l = j["limits"];
    if (!l.is_object()) throw ConfigError("$.limits: expected an object");
    for (const auto& [key, val] : l.items()) {
      if (key == "max_level") cfg.limits.max_level = detail::positive_int(val, "$.limits.max_level");
      else if (key == "max_index") cfg.limits.max_index = detail::positive_int(val, "$.limits.max_index");
      else if (key == "max_matrix_dim") cfg.limits.max_matrix_dim = detail::positive_int(val, "$.limits.max_matrix_dim");
      else throw ConfigError("$.limits." + key + ": unknown field");
    }
  }
  if (cfg.command == "dims" && !cfg.params.contains("depth")) cfg.params["depth"] = kDefaultValidationDepth;
  cfg.resolved = {{"name", cfg.name},
                  {"b", sequence_to_json(cfg.b)},
                  {"q", sequence_to_json(cfg.q)},
                  {"validation_depth", cfg.validation_depth},
                  {"command", cfg.command},
                  {"params", cfg.params},
                  {"limits",
                   {{"max_level", cfg.limits.max_level},
                    {"max_index", cfg.limits.max_index},
                    {"max_matrix_dim", cfg.limits.max_matrix_dim}}}};
  cfg.hash = config_hash(cfg.resolved);
  return cfg;
}

inline RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config_json(j);
}

/// Writes to `path.tmp` and renames over `path`.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// CSV text with a leading `# config_hash=` comment line.
inline std::string csv_table(const std::string& hash, const std::vector<std::string>& header,
                             const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  os << "# config_hash=" << hash << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  }
  return os.str();
}

/// One JSON object per line, each carrying `config_hash`.
inline std::string jsonl(const std::string& hash, const std::vector<Json>& records) {
  std::string out;
  for (auto r : records) {
    r["config_hash"] = hash;
    out += r.dump();
    out += "\n";
  }
  return out;
}

/// Reads integers one per line, skipping blanks and `#` comments.
inline std::vector<BigInt> read_integer_list(std::istream& in) {
  std::vector<BigInt> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    try {
      out.push_back(parse_bigint(line));
    } catch (const ValidationError&) {
      throw ConfigError("line " + std::to_string(lineno) + ": not an integer");
    }
  }
  return out;
}

}  // namespace moran
