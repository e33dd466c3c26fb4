#pragma once

/// @file model_json.hpp
/// Canonical JSON form of system and safety models, plus content
/// fingerprints.
///
/// Canonical output: object keys sorted, arrays in model order (models are
/// kept sorted by name), two-space indentation, LF newlines, trailing LF.
/// Structurally equal models therefore serialize byte-identically.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "insider/error.hpp"
#include "insider/safety_model.hpp"
#include "insider/system_model.hpp"

namespace insider {

using Json = nlohmann::json;

inline constexpr const char* kFormatTag = "insider/1";

namespace json_detail {

[[noreturn]] inline void SchemaFail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kSchemaError, (path.empty() ? std::string("/") : path) + ": " + what);
}

inline const Json& Member(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) SchemaFail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) SchemaFail(path, "missing member \"" + key + "\"");
  return *it;
}

inline std::string String(const Json& obj, const std::string& key, const std::string& path) {
  const Json& v = Member(obj, key, path);
  if (!v.is_string()) SchemaFail(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

inline const Json& Array(const Json& obj, const std::string& key, const std::string& path) {
  const Json& v = Member(obj, key, path);
  if (!v.is_array()) SchemaFail(path + "/" + key, "expected an array");
  return v;
}

/// Rejects members outside @p allowed so typos do not pass silently.
inline void OnlyKeys(const Json& obj, std::initializer_list<const char*> allowed,
                     const std::string& path) {
  if (!obj.is_object()) SchemaFail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) SchemaFail(path, "unexpected member \"" + key + "\"");
  }
}

inline void CheckFormat(const Json& doc) {
  if (!doc.is_object()) SchemaFail("", "expected an object");
  if (String(doc, "format", "") != kFormatTag)
    SchemaFail("/format", std::string("expected \"") + kFormatTag + "\"");
}

inline Direction ParseDir(const Json& obj, const std::string& path) {
  auto d = ParseDirection(String(obj, "direction", path));
  if (!d) SchemaFail(path + "/direction", "expected \"in\" or \"out\"");
  return *d;
}

inline QualifiedName ParseRef(const Json& obj, const std::string& key, const std::string& path) {
  auto ref = QualifiedName::Parse(String(obj, key, path));
  if (!ref) SchemaFail(path + "/" + key, "expected a component.element reference");
  return *ref;
}

}  // namespace json_detail

// Expressions ---------------------------------------------------------------

inline Json ExprToJson(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kEvent: return Json{{"event", e.name}};
    case Expr::Kind::kInput: return Json{{"in", e.name}};
    default: break;
  }
  Json args = Json::array();
  for (const Expr& a : e.args) args.push_back(ExprToJson(a));
  const char* op = e.kind == Expr::Kind::kAnd ? "and" : e.kind == Expr::Kind::kOr ? "or" : "not";
  return Json{{"op", op}, {"args", std::move(args)}};
}

inline Expr ExprFromJson(const Json& j, const std::string& path) {
  using namespace json_detail;
  if (!j.is_object()) SchemaFail(path, "expected an expression object");
  if (j.contains("event")) {
    OnlyKeys(j, {"event"}, path);
    return Expr::Event(String(j, "event", path));
  }
  if (j.contains("in")) {
    OnlyKeys(j, {"in"}, path);
    return Expr::Input(String(j, "in", path));
  }
  OnlyKeys(j, {"op", "args"}, path);
  std::string op = String(j, "op", path);
  const Json& args = Array(j, "args", path);
  Expr e;
  if (op == "and") e.kind = Expr::Kind::kAnd;
  else if (op == "or") e.kind = Expr::Kind::kOr;
  else if (op == "not") e.kind = Expr::Kind::kNot;
  else SchemaFail(path + "/op", "unknown operator \"" + op + "\"");
  for (std::size_t i = 0; i < args.size(); ++i)
    e.args.push_back(ExprFromJson(args[i], path + "/args/" + std::to_string(i)));
  auto shape = ValidateExprShape(e, path);
  if (!shape.empty()) SchemaFail(path, shape.front().message);
  return e;
}

// System model --------------------------------------------------------------

inline Json ToJson(const SystemModel& sm) {
  Json components = Json::array(), ports = Json::array(), connections = Json::array();
  for (const Component& c : sm.components()) components.push_back({{"name", c.name}});
  for (const Port& p : sm.ports())
    ports.push_back({{"name", p.name}, {"owner", p.owner}, {"direction", to_string(p.direction)}});
  for (const Connection& c : sm.connections())
    connections.push_back(
        {{"name", c.name}, {"source", c.source.str()}, {"target", c.target.str()}});
  return Json{{"format", kFormatTag},
              {"components", std::move(components)},
              {"ports", std::move(ports)},
              {"connections", std::move(connections)}};
}

inline SystemModel SystemModelFromJson(const Json& doc) {
  using namespace json_detail;
  CheckFormat(doc);
  OnlyKeys(doc, {"format", "components", "ports", "connections"}, "");
  std::vector<Component> components;
  std::vector<Port> ports;
  std::vector<Connection> connections;
  const Json& jc = Array(doc, "components", "");
  for (std::size_t i = 0; i < jc.size(); ++i) {
    std::string path = "/components/" + std::to_string(i);
    OnlyKeys(jc[i], {"name"}, path);
    components.push_back({String(jc[i], "name", path)});
  }
  const Json& jp = Array(doc, "ports", "");
  std::set<QualifiedName> declared;
  for (std::size_t i = 0; i < jp.size(); ++i) {
    std::string path = "/ports/" + std::to_string(i);
    OnlyKeys(jp[i], {"name", "owner", "direction"}, path);
    Port p{String(jp[i], "name", path), String(jp[i], "owner", path), ParseDir(jp[i], path)};
    declared.insert(p.ref());
    ports.push_back(std::move(p));
  }
  const Json& jn = Array(doc, "connections", "");
  for (std::size_t i = 0; i < jn.size(); ++i) {
    std::string path = "/connections/" + std::to_string(i);
    OnlyKeys(jn[i], {"name", "source", "target"}, path);
    Connection c{String(jn[i], "name", path), ParseRef(jn[i], "source", path),
                 ParseRef(jn[i], "target", path)};
    if (!declared.count(c.source))
      SchemaFail(path + "/source", "port \"" + c.source.str() + "\" is not declared");
    if (!declared.count(c.target))
      SchemaFail(path + "/target", "port \"" + c.target.str() + "\" is not declared");
    connections.push_back(std::move(c));
  }
  return BuildSystemModel(std::move(components), std::move(ports), std::move(connections));
}

// Safety model --------------------------------------------------------------

inline Json ToJson(const SamComponent& c) {
  Json events = Json::array(), ports = Json::array(), defs = Json::object();
  for (const BasicEvent& e : c.events) {
    Json je{{"name", e.name}};
    if (e.probability) je["probability"] = *e.probability;
    events.push_back(std::move(je));
  }
  for (const FailurePort& p : c.failure_ports)
    ports.push_back({{"name", p.name},
                     {"direction", to_string(p.direction)},
                     {"traces_to", p.traces_to.str()},
                     {"failure_mode", p.failure_mode}});
  for (const auto& [out, def] : c.definitions) defs[out] = def ? ExprToJson(*def) : Json(nullptr);
  return Json{{"name", c.name},
              {"events", std::move(events)},
              {"failure_ports", std::move(ports)},
              {"definitions", std::move(defs)}};
}

inline SamComponent SamComponentFromJson(const Json& j, const std::string& path) {
  using namespace json_detail;
  OnlyKeys(j, {"name", "events", "failure_ports", "definitions"}, path);
  SamComponent c;
  c.name = String(j, "name", path);
  const Json& events = Array(j, "events", path);
  for (std::size_t i = 0; i < events.size(); ++i) {
    std::string ep = path + "/events/" + std::to_string(i);
    OnlyKeys(events[i], {"name", "probability"}, ep);
    BasicEvent e{String(events[i], "name", ep), std::nullopt};
    if (events[i].contains("probability")) {
      const Json& p = events[i]["probability"];
      if (!p.is_number()) SchemaFail(ep + "/probability", "expected a number");
      e.probability = p.get<double>();
    }
    c.events.push_back(std::move(e));
  }
  const Json& ports = Array(j, "failure_ports", path);
  for (std::size_t i = 0; i < ports.size(); ++i) {
    std::string pp = path + "/failure_ports/" + std::to_string(i);
    OnlyKeys(ports[i], {"name", "direction", "traces_to", "failure_mode"}, pp);
    FailurePort p{String(ports[i], "name", pp), ParseDir(ports[i], pp),
                  ParseRef(ports[i], "traces_to", pp), kDefaultFailureMode};
    if (ports[i].contains("failure_mode")) p.failure_mode = String(ports[i], "failure_mode", pp);
    c.failure_ports.push_back(std::move(p));
  }
  const Json& defs = Member(j, "definitions", path);
  if (!defs.is_object()) SchemaFail(path + "/definitions", "expected an object");
  for (const auto& [out, def] : defs.items()) {
    std::string dp = path + "/definitions/" + out;
    if (def.is_null()) c.definitions[out] = std::nullopt;
    else c.definitions[out] = ExprFromJson(def, dp);
  }
  return c;
}

inline Json ToJson(const SafetyAnalysisModel& sam) {
  Json components = Json::array(), connections = Json::array();
  for (const SamComponent& c : sam.components()) components.push_back(ToJson(c));
  for (const FailureConnection& fc : sam.failure_connections())
    connections.push_back(
        {{"name", fc.name}, {"source", fc.source.str()}, {"target", fc.target.str()}});
  return Json{{"format", kFormatTag},
              {"components", std::move(components)},
              {"failure_connections", std::move(connections)}};
}

inline SafetyAnalysisModel SafetyModelFromJson(const Json& doc) {
  using namespace json_detail;
  CheckFormat(doc);
  OnlyKeys(doc, {"format", "components", "failure_connections"}, "");
  std::vector<SamComponent> components;
  std::vector<FailureConnection> connections;
  const Json& jc = Array(doc, "components", "");
  for (std::size_t i = 0; i < jc.size(); ++i)
    components.push_back(SamComponentFromJson(jc[i], "/components/" + std::to_string(i)));
  const Json& jn = Array(doc, "failure_connections", "");
  for (std::size_t i = 0; i < jn.size(); ++i) {
    std::string path = "/failure_connections/" + std::to_string(i);
    OnlyKeys(jn[i], {"name", "source", "target"}, path);
    connections.push_back({String(jn[i], "name", path), ParseRef(jn[i], "source", path),
                           ParseRef(jn[i], "target", path)});
  }
  return BuildSafetyModel(std::move(components), std::move(connections));
}

// Text and files -------------------------------------------------------------

inline std::string CanonicalText(const Json& doc) { return doc.dump(2) + "\n"; }

/// FNV-1a 64-bit over the compact canonical serialization.
inline std::string Fingerprint(const Json& doc) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : doc.dump()) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return std::string("fnv1a64:") + buf;
}

inline std::string Fingerprint(const SystemModel& sm) { return Fingerprint(ToJson(sm)); }
inline std::string Fingerprint(const SafetyAnalysisModel& sam) { return Fingerprint(ToJson(sam)); }

inline std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  out << text;
  if (!out.flush()) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
}

/// Parses JSON text; syntax errors become ParseError with line and column.
inline Json ParseJson(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParseError, origin + ": " + e.what());
  }
}

inline Json LoadJsonFile(const std::filesystem::path& path) {
  return ParseJson(ReadTextFile(path), path.string());
}

namespace json_detail {

/// Prefixes schema errors with the file they came from.
template <class F>
auto WithOrigin(const std::string& origin, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSchemaError) throw;
    throw Error(ErrorCode::kSchemaError, origin + ": " + e.issues().front().message);
  }
}

}  // namespace json_detail

inline SystemModel LoadSystemModel(const std::filesystem::path& path) {
  Json doc = LoadJsonFile(path);
  return json_detail::WithOrigin(path.string(), [&] { return SystemModelFromJson(doc); });
}

inline void SaveSystemModel(const SystemModel& sm, const std::filesystem::path& path) {
  WriteTextFile(path, CanonicalText(ToJson(sm)));
}

inline SafetyAnalysisModel LoadSafetyModel(const std::filesystem::path& path) {
  Json doc = LoadJsonFile(path);
  return json_detail::WithOrigin(path.string(), [&] { return SafetyModelFromJson(doc); });
}

inline void SaveSafetyModel(const SafetyAnalysisModel& sam, const std::filesystem::path& path) {
  WriteTextFile(path, CanonicalText(ToJson(sam)));
}

}  // namespace insider
