#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "starweyl/fedosov.hpp"
#include "starweyl/parse.hpp"

namespace starweyl {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A fully parsed run configuration: the engine inputs plus any named
/// expressions the document defines.
struct ConfigDocument {
  ChartContext ctx;
  int trunc_K;
  ConnectionSpec conn;
  LeafSpec leaf;
  std::map<std::string, BasePoly> expressions;

  EngineConfig engine_config() const {
    return EngineConfig(ctx, conn, leaf, trunc_K);
  }

  /// Resolves a CLI argument: a named expression if defined, otherwise the
  /// text is parsed as an expression.
  BasePoly resolve(const std::string& arg) const {
    auto it = expressions.find(arg);
    if (it != expressions.end()) return it->second;
    return parse_expression(arg, ctx);
  }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::ordered_json& obj,
                                std::initializer_list<const char*> allowed,
                                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) { ok = true; break; }
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

}  // namespace detail

/// Parses a configuration document. Schema:
///   {
///     "chart": {"N": 1},
///     "truncation": 6,
///     "connection": [{"indices": [1, 1, 1], "poly": "x1"}],
///     "leaf": ["2"],
///     "expressions": {"f": "x1^2*p1 + 1/2"}
///   }
/// Connection indices are 1-based coordinate indices into (x1..xN, p1..pN);
/// each entry assigns the component and all its permutations. Leaf entries
/// are exact rational strings. Unknown keys are rejected.
inline ConfigDocument parse_config_text(const std::string& text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  detail::reject_unknown_keys(
      doc, {"chart", "truncation", "connection", "leaf", "expressions"},
      "config");

  if (!doc.contains("chart") || !doc["chart"].is_object())
    throw ConfigError("missing 'chart' object");
  detail::reject_unknown_keys(doc["chart"], {"N"}, "chart");
  if (!doc["chart"].contains("N") || !doc["chart"]["N"].is_number_integer())
    throw ConfigError("chart.N must be an integer");
  const int n = doc["chart"]["N"].get<int>();
  if (n < 1 || n > 8) throw ConfigError("chart.N must be in 1..8");
  ChartContext ctx(n);

  if (!doc.contains("truncation") || !doc["truncation"].is_number_integer())
    throw ConfigError("'truncation' must be an integer");
  const int trunc_K = doc["truncation"].get<int>();
  if (trunc_K < 2 || trunc_K > 16)
    throw ConfigError("'truncation' must be in 2..16");

  ConnectionSpec conn(n);
  if (doc.contains("connection")) {
    if (!doc["connection"].is_array())
      throw ConfigError("'connection' must be an array");
    std::map<std::array<int, 3>, std::string> seen;
    for (const auto& entry : doc["connection"]) {
      if (!entry.is_object())
        throw ConfigError("connection entries must be objects");
      detail::reject_unknown_keys(entry, {"indices", "poly"}, "connection entry");
      if (!entry.contains("indices") || !entry["indices"].is_array() ||
          entry["indices"].size() != 3)
        throw ConfigError("connection entry needs 'indices': [i, j, k]");
      std::array<int, 3> idx{};
      for (int t = 0; t < 3; ++t) {
        if (!entry["indices"][t].is_number_integer())
          throw ConfigError("connection indices must be integers");
        const int v = entry["indices"][t].get<int>();
        if (v < 1 || v > 2 * n)
          throw ConfigError("connection index out of range 1..2N");
        idx[t] = v - 1;
      }
      if (!entry.contains("poly") || !entry["poly"].is_string())
        throw ConfigError("connection entry needs a 'poly' string");
      const std::string src = entry["poly"].get<std::string>();
      std::array<int, 3> sorted = idx;
      std::sort(sorted.begin(), sorted.end());
      auto [it, inserted] = seen.emplace(sorted, src);
      if (!inserted && it->second != src)
        throw ConfigError("conflicting connection assignment for a component");
      BasePoly p = [&] {
        try {
          return parse_expression(src, ctx);
        } catch (const ParseError& e) {
          throw ConfigError(std::string("connection poly: ") + e.what());
        }
      }();
      conn.set_symmetric(idx[0], idx[1], idx[2], p);
    }
  }

  if (!doc.contains("leaf") || !doc["leaf"].is_array())
    throw ConfigError("missing 'leaf' array");
  if (static_cast<int>(doc["leaf"].size()) != n)
    throw ConfigError("'leaf' must list exactly N values");
  std::vector<Rational> c;
  for (const auto& v : doc["leaf"]) {
    if (!v.is_string())
      throw ConfigError("leaf values must be exact rational strings");
    try {
      c.push_back(Rational::from_string(v.get<std::string>()));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("leaf value: ") + e.what());
    }
  }
  LeafSpec leaf(std::move(c));

  std::map<std::string, BasePoly> expressions;
  if (doc.contains("expressions")) {
    if (!doc["expressions"].is_object())
      throw ConfigError("'expressions' must be an object");
    for (const auto& [name, v] : doc["expressions"].items()) {
      if (!v.is_string())
        throw ConfigError("expression '" + name + "' must be a string");
      try {
        expressions.emplace(name, parse_expression(v.get<std::string>(), ctx));
      } catch (const ParseError& e) {
        throw ConfigError("expression '" + name + "': " + e.what());
      }
    }
  }

  return ConfigDocument{ctx, trunc_K, std::move(conn), std::move(leaf),
                        std::move(expressions)};
}

inline ConfigDocument load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace starweyl
