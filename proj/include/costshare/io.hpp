// Copyright 2026 The costshare Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Instance documents ("costshare-instance/1") and report serialization.

#ifndef COSTSHARE_IO_HPP
#define COSTSHARE_IO_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "costshare/common.hpp"
#include "costshare/model.hpp"

namespace costshare {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kInstanceSchema = "costshare-instance/1";
inline constexpr std::string_view kReportSchema = "costshare-report/1";

namespace detail {

[[noreturn]] inline void bad_document(const std::string& what) {
  throw Error(ErrorKind::invalid_document, what);
}

inline const Json& member(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) bad_document(where + ": missing \"" + key + "\"");
  return *it;
}

inline double number(const Json& x, const std::string& where) {
  if (!x.is_number()) bad_document(where + ": expected a number");
  const double v = x.get<double>();
  if (!std::isfinite(v)) bad_document(where + ": non-finite number");
  return v;
}

inline std::vector<std::string> split_key(const std::string& key) {
  std::vector<std::string> out;
  if (key.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = key.find(',', start);
    out.push_back(key.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Local bit of `id` inside `scope`, or ScopeViolation.
inline unsigned local_bit(const ItemUniverse& u, const Scope& scope,
                          const std::string& id, const std::string& where) {
  auto global = u.index_of(id);
  if (!global || *global < scope.offset || *global >= scope.offset + scope.width) {
    throw Error(ErrorKind::scope_violation,
                where + ": item '" + id + "' is outside the function's scope");
  }
  return *global - scope.offset;
}

inline SetFunction parse_function(const Json& spec, const ItemUniverse& u,
                                  const Scope& scope, bool is_cost,
                                  const std::string& where) {
  if (!spec.is_object()) bad_document(where + ": function spec must be an object");
  const Json& type_node = member(spec, "type", where);
  if (!type_node.is_string()) bad_document(where + ": \"type\" must be a string");
  const std::string type = type_node.get<std::string>();

  if (type == "table") {
    const Json& entries = member(spec, "entries", where);
    if (!entries.is_object()) bad_document(where + ": \"entries\" must be an object");
    if (scope.width > 26) {
      throw Error(ErrorKind::size_limit, where + ": table scope too large");
    }
    std::vector<double> values(std::size_t{1} << scope.width, 0.0);
    std::vector<char> seen(values.size(), 0);
    for (auto it = entries.begin(); it != entries.end(); ++it) {
      const std::string& key = it.key();
      ItemMask s = 0;
      const auto ids = split_key(key);
      for (std::size_t k = 0; k < ids.size(); ++k) {
        if (k > 0 && !(ids[k - 1] < ids[k])) {
          bad_document(where + ": key \"" + key +
                       "\" is not canonical (sorted, duplicate-free)");
        }
        s |= ItemMask{1} << local_bit(u, scope, ids[k], where);
      }
      if (seen[s]) bad_document(where + ": key \"" + key + "\" listed twice");
      seen[s] = 1;
      values[s] = number(it.value(), where + "[\"" + key + "\"]");
    }
    for (std::size_t s = 0; s < seen.size(); ++s) {
      if (!seen[s]) {
        bad_document(where + ": missing entry for \"" +
                     bundle_key(u, ItemMask{s} << scope.offset) + "\"");
      }
    }
    return SetFunction::table(scope, std::move(values));
  }
  if (type == "additive") {
    const Json& weights = member(spec, "weights", where);
    if (!weights.is_object()) bad_document(where + ": \"weights\" must be an object");
    std::vector<double> w(scope.width, 0.0);
    for (auto it = weights.begin(); it != weights.end(); ++it) {
      w[local_bit(u, scope, it.key(), where)] =
          number(it.value(), where + ".weights");
    }
    return SetFunction::additive(scope, std::move(w));
  }
  if (type == "unit_demand") {
    return SetFunction::unit_demand(scope,
                                    number(member(spec, "value", where), where));
  }
  if (type == "symmetric") {
    const Json& levels = member(spec, "levels", where);
    if (!levels.is_array()) bad_document(where + ": \"levels\" must be an array");
    std::vector<double> l;
    for (const auto& x : levels) l.push_back(number(x, where + ".levels"));
    return SetFunction::symmetric(scope, std::move(l));
  }
  if (type == "xos") {
    const Json& clauses = member(spec, "clauses", where);
    if (!clauses.is_array()) bad_document(where + ": \"clauses\" must be an array");
    std::vector<std::vector<double>> out;
    for (const auto& clause : clauses) {
      if (!clause.is_object()) bad_document(where + ": clause must be an object");
      std::vector<double> w(scope.width, 0.0);
      for (auto it = clause.begin(); it != clause.end(); ++it) {
        w[local_bit(u, scope, it.key(), where)] =
            number(it.value(), where + ".clauses");
      }
      out.push_back(std::move(w));
    }
    return SetFunction::xos(scope, std::move(out));
  }
  if (type == "epg") return SetFunction::epg(scope);
  if (type == "player_symmetric") {
    if (!is_cost) {
      bad_document(where + ": player_symmetric is only defined for the cost");
    }
    const Json& entries = member(spec, "entries", where);
    if (!entries.is_object()) bad_document(where + ": \"entries\" must be an object");
    std::size_t size = 1;
    for (unsigned g : scope.groups) size *= g + 1;
    std::vector<double> values(size, 0.0);
    std::vector<char> seen(size, 0);
    for (auto it = entries.begin(); it != entries.end(); ++it) {
      const auto parts = split_key(it.key());
      if (parts.size() != scope.groups.size()) {
        bad_document(where + ": count key \"" + it.key() + "\" needs " +
                     std::to_string(scope.groups.size()) + " components");
      }
      std::size_t index = 0;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string& p = parts[i];
        if (p.empty() || p.find_first_not_of("0123456789") != std::string::npos ||
            (p.size() > 1 && p[0] == '0') || p.size() > 3) {
          bad_document(where + ": count key \"" + it.key() + "\" is not canonical");
        }
        const unsigned k = static_cast<unsigned>(std::stoul(p));
        if (k > scope.groups[i]) {
          throw Error(ErrorKind::scope_violation,
                      where + ": count " + p + " exceeds player " +
                          std::to_string(i + 1) + "'s universe");
        }
        index = index * (scope.groups[i] + 1) + k;
      }
      if (seen[index]) bad_document(where + ": key \"" + it.key() + "\" listed twice");
      seen[index] = 1;
      values[index] = number(it.value(), where + "[\"" + it.key() + "\"]");
    }
    for (char s : seen) {
      if (!s) bad_document(where + ": player_symmetric entries are incomplete");
    }
    return SetFunction::player_symmetric(scope, std::move(values));
  }
  bad_document(where + ": unknown function type \"" + type + "\"");
}

/// Rejects objects that repeat a key; the default parser would keep the
/// last one silently.
inline Json parse_strict(std::string_view text) {
  std::vector<std::set<std::string>> keys;
  auto callback = [&](int, Json::parse_event_t event, Json& parsed) {
    switch (event) {
      case Json::parse_event_t::object_start:
        keys.emplace_back();
        break;
      case Json::parse_event_t::object_end:
        keys.pop_back();
        break;
      case Json::parse_event_t::key: {
        const auto key = parsed.get<std::string>();
        if (!keys.back().insert(key).second) {
          bad_document("duplicate key \"" + key + "\"");
        }
        break;
      }
      default:
        break;
    }
    return true;
  };
  try {
    return Json::parse(text.begin(), text.end(), callback);
  } catch (const Json::exception& e) {
    bad_document(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace detail

/// Structural parse plus every instance invariant.
inline Instance validate_instance(const Json& doc, SizeGuard guard = SizeGuard::generic) {
  if (!doc.is_object()) detail::bad_document("instance must be a JSON object");
  const Json& schema = detail::member(doc, "schema", "instance");
  if (!schema.is_string() || schema.get<std::string>() != kInstanceSchema) {
    detail::bad_document("schema must be \"" + std::string(kInstanceSchema) + "\"");
  }
  const Json& players = detail::member(doc, "players", "instance");
  if (!players.is_number_integer() || players.get<long long>() < 0) {
    detail::bad_document("\"players\" must be a non-negative integer");
  }
  const auto n = static_cast<std::size_t>(players.get<long long>());
  const Json& items = detail::member(doc, "items", "instance");
  if (!items.is_array() || items.size() != n) {
    detail::bad_document("\"items\" must list one array per player");
  }
  std::vector<std::vector<std::string>> lists;
  for (const auto& list : items) {
    if (!list.is_array()) detail::bad_document("\"items\" entries must be arrays");
    std::vector<std::string> ids;
    for (const auto& id : list) {
      if (!id.is_string()) detail::bad_document("item identifiers must be strings");
      ids.push_back(id.get<std::string>());
    }
    lists.push_back(std::move(ids));
  }
  Instance inst;
  inst.universe = ItemUniverse(std::move(lists));
  if (guard == SizeGuard::generic && inst.universe.item_count() > kGenericLimitLog2) {
    throw Error(ErrorKind::size_limit,
                "allocation lattice has 2^" +
                    std::to_string(inst.universe.item_count()) +
                    " elements; the generic path accepts at most 2^20");
  }
  const Json& vals = detail::member(doc, "valuations", "instance");
  if (!vals.is_array() || vals.size() != n) {
    detail::bad_document("\"valuations\" must list one function per player");
  }
  for (std::size_t i = 0; i < n; ++i) {
    inst.valuations.push_back(detail::parse_function(
        vals[i], inst.universe, Scope::of_player(inst.universe, i), false,
        "valuation " + std::to_string(i + 1)));
  }
  inst.cost = detail::parse_function(detail::member(doc, "cost", "instance"),
                                     inst.universe, Scope::of_cost(inst.universe),
                                     true, "cost");
  check_instance(inst, guard);
  return inst;
}

inline Instance parse_instance(std::string_view text,
                               SizeGuard guard = SizeGuard::generic) {
  return validate_instance(detail::parse_strict(text), guard);
}

inline Instance load_instance(const std::filesystem::path& path,
                              SizeGuard guard = SizeGuard::generic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) detail::bad_document("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str(), guard);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline Json function_to_json(const SetFunction& f, const ItemUniverse& u) {
  const Scope& scope = f.scope();
  Json out;
  out["type"] = std::string(to_string(f.kind()));
  switch (f.kind()) {
    case FunctionKind::table: {
      // Entries in canonical-key order for stable documents.
      std::vector<std::pair<std::string, double>> rows;
      for (ItemMask s = 0; s < f.payload().size(); ++s) {
        rows.emplace_back(bundle_key(u, s << scope.offset), f.payload()[s]);
      }
      std::sort(rows.begin(), rows.end());
      Json entries = Json::object();
      for (auto& [k, v] : rows) entries[k] = v;
      out["entries"] = std::move(entries);
      break;
    }
    case FunctionKind::additive: {
      Json weights = Json::object();
      for (unsigned k = 0; k < scope.width; ++k) {
        weights[u.name(scope.offset + k)] = f.payload()[k];
      }
      out["weights"] = std::move(weights);
      break;
    }
    case FunctionKind::unit_demand:
      out["value"] = f.scalar();
      break;
    case FunctionKind::symmetric:
      out["levels"] = f.payload();
      break;
    case FunctionKind::xos: {
      Json clauses = Json::array();
      for (const auto& clause : f.clauses()) {
        Json c = Json::object();
        for (unsigned k = 0; k < scope.width; ++k) c[u.name(scope.offset + k)] = clause[k];
        clauses.push_back(std::move(c));
      }
      out["clauses"] = std::move(clauses);
      break;
    }
    case FunctionKind::epg:
      break;
    case FunctionKind::player_symmetric: {
      Json entries = Json::object();
      const auto& groups = scope.groups;
      std::vector<unsigned> k(groups.size(), 0);
      for (std::size_t index = 0; index < f.payload().size(); ++index) {
        std::size_t rest = index;
        for (std::size_t i = groups.size(); i-- > 0;) {
          k[i] = static_cast<unsigned>(rest % (groups[i] + 1));
          rest /= groups[i] + 1;
        }
        std::string key;
        for (std::size_t i = 0; i < k.size(); ++i) {
          if (i) key += ',';
          key += std::to_string(k[i]);
        }
        entries[key] = f.payload()[index];
      }
      out["entries"] = std::move(entries);
      break;
    }
  }
  return out;
}

inline Json instance_to_json(const Instance& inst) {
  const ItemUniverse& u = inst.universe;
  Json out;
  out["schema"] = std::string(kInstanceSchema);
  out["players"] = u.players();
  Json items = Json::array();
  for (std::size_t i = 0; i < u.players(); ++i) items.push_back(u.items(i));
  out["items"] = std::move(items);
  Json vals = Json::array();
  for (const auto& v : inst.valuations) vals.push_back(function_to_json(v, u));
  out["valuations"] = std::move(vals);
  out["cost"] = function_to_json(inst.cost, u);
  return out;
}

inline Json allocation_to_json(const ItemUniverse& u, Allocation a) {
  return Json(canonical_encoding(u, a));
}

/// "%.17g"; non-finite values become null.
inline std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Deterministic pretty printer: insertion-ordered keys, two-space indent,
/// floats with 17 significant digits.
inline void write_json(std::string& out, const Json& j, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(it.key()).dump() + ": ";
        write_json(out, it.value(), indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& x) {
        return x.is_primitive();
      });
      if (flat) {
        out += "[";
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k) out += ", ";
          write_json(out, j[k], indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out += ",\n";
        out += inner;
        write_json(out, j[k], indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_number(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

inline std::string to_document(const Json& j) {
  std::string out;
  write_json(out, j);
  out += '\n';
  return out;
}

/// Writes to a sibling temporary file, then renames over the target.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::invalid_argument, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorKind::invalid_argument, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace costshare

#endif  // COSTSHARE_IO_HPP
