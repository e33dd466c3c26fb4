#pragma once

/// @file io.hpp
/// File formats and report renderings beyond the two models: change sets,
/// findings, the trace table, analysis reports, rename hints, probability
/// maps, the on-disk component repository and the project reference file.

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "insider/analysis.hpp"
#include "insider/binding.hpp"
#include "insider/consistency.hpp"
#include "insider/model_json.hpp"
#include "insider/repository.hpp"
#include "insider/synchronizer.hpp"

namespace insider {

namespace io_detail {

inline std::string Plural(std::size_t n, const char* word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

inline std::string Join(const std::vector<std::string>& items, const char* sep = ", ") {
  std::string out;
  for (const std::string& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

inline std::string FormatProbability(double p) {
  std::ostringstream os;
  os << std::setprecision(12) << p;
  return os.str();
}

}  // namespace io_detail

// Change sets -----------------------------------------------------------------

inline Json ToJson(const ChangeOp& op) {
  Json payload = Json::object();
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, change::Rename>) {
          payload = {{"scope", p.scope == change::RenameScope::kComponent ? "component" : "port"},
                     {"new_name", p.new_name}};
        } else if constexpr (std::is_same_v<P, change::CreateComponent>) {
          payload = {{"component", ToJson(p.component)},
                     {"repo_key", p.repo_key ? Json(*p.repo_key) : Json(nullptr)}};
        } else if constexpr (std::is_same_v<P, change::CreatePort>) {
          payload = {{"direction", to_string(p.direction)},
                     {"traces_to", p.traces_to.str()},
                     {"failure_mode", p.failure_mode}};
        } else if constexpr (std::is_same_v<P, change::CreateConnection>) {
          payload = {{"source", p.source.str()}, {"target", p.target.str()}};
        }
      },
      op.payload);
  return Json{{"kind", to_string(op.kind)}, {"target", op.target}, {"payload", std::move(payload)}};
}

inline Json ToJson(const ChangeSet& cs) {
  Json ops = Json::array();
  for (const ChangeOp& op : cs.ops) ops.push_back(ToJson(op));
  return Json{{"format", kFormatTag},
              {"sm_fingerprint", cs.sm_fingerprint},
              {"sam_fingerprint", cs.sam_fingerprint},
              {"ops", std::move(ops)},
              {"notes", cs.notes}};
}

inline ChangeSet ChangeSetFromJson(const Json& doc) {
  using namespace json_detail;
  CheckFormat(doc);
  OnlyKeys(doc, {"format", "sm_fingerprint", "sam_fingerprint", "ops", "notes"}, "");
  ChangeSet cs;
  cs.sm_fingerprint = String(doc, "sm_fingerprint", "");
  cs.sam_fingerprint = String(doc, "sam_fingerprint", "");
  const Json& ops = Array(doc, "ops", "");
  for (std::size_t i = 0; i < ops.size(); ++i) {
    std::string path = "/ops/" + std::to_string(i);
    OnlyKeys(ops[i], {"kind", "target", "payload"}, path);
    auto kind = ParseChangeKind(String(ops[i], "kind", path));
    if (!kind) SchemaFail(path + "/kind", "unknown change kind");
    ChangeOp op{*kind, String(ops[i], "target", path), {}};
    const Json& p = Member(ops[i], "payload", path);
    std::string pp = path + "/payload";
    switch (*kind) {
      case ChangeKind::kRenameElement: {
        OnlyKeys(p, {"scope", "new_name"}, pp);
        std::string scope = String(p, "scope", pp);
        if (scope != "component" && scope != "port")
          SchemaFail(pp + "/scope", "expected \"component\" or \"port\"");
        op.payload = change::Rename{scope == "component" ? change::RenameScope::kComponent
                                                         : change::RenameScope::kPort,
                                    String(p, "new_name", pp)};
        break;
      }
      case ChangeKind::kCreateSamComponent: {
        OnlyKeys(p, {"component", "repo_key"}, pp);
        change::CreateComponent c;
        c.component = SamComponentFromJson(Member(p, "component", pp), pp + "/component");
        const Json& key = Member(p, "repo_key", pp);
        if (key.is_string()) c.repo_key = key.get<std::string>();
        else if (!key.is_null()) SchemaFail(pp + "/repo_key", "expected a string or null");
        op.payload = std::move(c);
        break;
      }
      case ChangeKind::kCreateFailurePort:
        OnlyKeys(p, {"direction", "traces_to", "failure_mode"}, pp);
        op.payload = change::CreatePort{ParseDir(p, pp), ParseRef(p, "traces_to", pp),
                                        String(p, "failure_mode", pp)};
        break;
      case ChangeKind::kCreateFailureConnection:
        OnlyKeys(p, {"source", "target"}, pp);
        op.payload = change::CreateConnection{ParseRef(p, "source", pp), ParseRef(p, "target", pp)};
        break;
      default:
        OnlyKeys(p, {}, pp);
        break;
    }
    cs.ops.push_back(std::move(op));
  }
  const Json& notes = Array(doc, "notes", "");
  for (std::size_t i = 0; i < notes.size(); ++i) {
    if (!notes[i].is_string()) SchemaFail("/notes/" + std::to_string(i), "expected a string");
    cs.notes.push_back(notes[i].get<std::string>());
  }
  return cs;
}

inline std::string RenderText(const ChangeSet& cs) {
  std::ostringstream os;
  os << io_detail::Plural(cs.ops.size(), "change") << "\n";
  for (const ChangeOp& op : cs.ops) {
    os << "  " << to_string(op.kind) << " " << op.target;
    if (auto* r = std::get_if<change::Rename>(&op.payload)) {
      os << " -> " << r->new_name;
    } else if (auto* c = std::get_if<change::CreateComponent>(&op.payload)) {
      if (c->repo_key) os << " (from repository entry " << *c->repo_key << ")";
    } else if (auto* p = std::get_if<change::CreatePort>(&op.payload)) {
      os << " (" << to_string(p->direction) << ", traces " << p->traces_to << ", "
         << p->failure_mode << ")";
    } else if (auto* fc = std::get_if<change::CreateConnection>(&op.payload)) {
      os << " (" << fc->source << " -> " << fc->target << ")";
    }
    os << "\n";
  }
  for (const std::string& note : cs.notes) os << "note: " << note << "\n";
  return os.str();
}

// Findings --------------------------------------------------------------------

inline Json FindingsToJson(const std::vector<Finding>& findings) {
  Json list = Json::array();
  for (const Finding& f : findings)
    list.push_back({{"kind", to_string(f.kind)},
                    {"subject", f.subject},
                    {"detail", f.detail},
                    {"related", f.related}});
  return Json{{"format", kFormatTag}, {"count", findings.size()}, {"findings", std::move(list)}};
}

inline std::vector<Finding> FindingsFromJson(const Json& doc) {
  using namespace json_detail;
  CheckFormat(doc);
  OnlyKeys(doc, {"format", "count", "findings"}, "");
  const Json& list = Array(doc, "findings", "");
  std::vector<Finding> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    std::string path = "/findings/" + std::to_string(i);
    OnlyKeys(list[i], {"kind", "subject", "detail", "related"}, path);
    auto kind = ParseFindingKind(String(list[i], "kind", path));
    if (!kind) SchemaFail(path + "/kind", "unknown finding kind");
    Finding f{*kind, String(list[i], "subject", path), String(list[i], "detail", path), {}};
    for (const Json& r : Array(list[i], "related", path)) {
      if (!r.is_string()) SchemaFail(path + "/related", "expected strings");
      f.related.push_back(r.get<std::string>());
    }
    out.push_back(std::move(f));
  }
  const Json& count = Member(doc, "count", "");
  if (!count.is_number_unsigned() || count.get<std::size_t>() != out.size())
    SchemaFail("/count", "does not match the number of findings");
  return out;
}

inline std::string RenderText(const std::vector<Finding>& findings) {
  std::ostringstream os;
  for (const Finding& f : findings) os << to_string(f.kind) << " " << f.subject << ": " << f.detail << "\n";
  os << io_detail::Plural(findings.size(), "finding") << "\n";
  return os.str();
}

// Trace table -----------------------------------------------------------------

inline Json TraceToJson(const SystemModel& sm, const Binding& b) {
  Json components = Json::object(), ports = Json::object(), connections = Json::object();
  for (const Component& c : sm.components()) {
    auto it = b.component_map.find(c.name);
    components[c.name] = it == b.component_map.end() ? Json(nullptr) : Json(it->second);
  }
  for (const auto& [port, members] : b.gamma) {
    Json list = Json::array();
    for (const QualifiedName& f : members) list.push_back(f.str());
    ports[port.str()] = std::move(list);
  }
  for (const auto& [con, linked] : b.connection_map) connections[con] = linked;
  return Json{{"format", kFormatTag},
              {"sm_fingerprint", b.sm_ref},
              {"sam_fingerprint", b.sam_ref},
              {"components", std::move(components)},
              {"ports", std::move(ports)},
              {"connections", std::move(connections)}};
}

/// One `element => counterparts` line per component, port and connection.
/// Failure ports of the port's own component are shown by local name.
inline std::string RenderTraceTable(const SystemModel& sm, const Binding& b) {
  std::ostringstream os;
  for (const Component& c : sm.components()) {
    auto it = b.component_map.find(c.name);
    os << c.name << " => " << (it == b.component_map.end() ? "(none)" : "SAM_" + it->second)
       << "\n";
  }
  for (const auto& [port, members] : b.gamma) {
    std::vector<std::string> names;
    for (const QualifiedName& f : members)
      names.push_back(f.component == port.component ? f.element : f.str());
    os << port << " => " << (names.empty() ? "(none)" : io_detail::Join(names)) << "\n";
  }
  for (const auto& [con, linked] : b.connection_map) {
    std::vector<std::string> names(linked.begin(), linked.end());
    os << con << " => " << (names.empty() ? "(none)" : io_detail::Join(names)) << "\n";
  }
  return os.str();
}

// Analysis reports ------------------------------------------------------------

struct AnalysisReport {
  FaultTree tree;
  std::optional<std::vector<CutSet>> cut_sets;
  std::optional<double> probability;
};

inline Json ToJson(const AnalysisReport& r) {
  Json leaves = Json::object();
  for (const auto& [leaf, kind] : r.tree.leaf_kinds) leaves[leaf] = to_string(kind);
  Json doc{{"format", kFormatTag},
           {"top", r.tree.top.str()},
           {"expression", ToString(r.tree.expr)},
           {"tree", ExprToJson(r.tree.expr)},
           {"leaves", std::move(leaves)}};
  if (r.cut_sets) doc["minimal_cut_sets"] = *r.cut_sets;
  if (r.probability) doc["probability"] = *r.probability;
  return doc;
}

inline std::string RenderText(const AnalysisReport& r) {
  std::ostringstream os;
  os << "top: " << r.tree.top << "\n";
  os << "expression: " << ToString(r.tree.expr) << "\n";
  std::vector<std::string> leaves;
  for (const auto& [leaf, kind] : r.tree.leaf_kinds)
    leaves.push_back(leaf + (kind == LeafKind::kEvent ? " (event)" : " (boundary input)"));
  os << "leaves: " << io_detail::Join(leaves) << "\n";
  if (r.cut_sets) {
    os << "minimal cut sets: " << r.cut_sets->size() << "\n";
    for (const CutSet& cs : *r.cut_sets) os << "  {" << io_detail::Join(cs) << "}\n";
  }
  if (r.probability) os << "probability: " << io_detail::FormatProbability(*r.probability) << "\n";
  return os.str();
}

// Rename hints and probability maps -------------------------------------------

inline RenameHints RenameHintsFromJson(const Json& doc) {
  using namespace json_detail;
  CheckFormat(doc);
  OnlyKeys(doc, {"format", "renames"}, "");
  const Json& renames = Member(doc, "renames", "");
  if (!renames.is_object()) SchemaFail("/renames", "expected an object");
  RenameHints hints;
  for (const auto& [from, to] : renames.items()) {
    if (!to.is_string()) SchemaFail("/renames/" + from, "expected a string");
    hints.renames[from] = to.get<std::string>();
  }
  return hints;
}

/// A flat object mapping qualified leaf names to probabilities in [0,1].
inline std::map<std::string, double> ProbabilitiesFromJson(const Json& doc) {
  using namespace json_detail;
  if (!doc.is_object()) SchemaFail("", "expected an object");
  std::map<std::string, double> out;
  for (const auto& [leaf, value] : doc.items()) {
    if (!QualifiedName::Parse(leaf)) SchemaFail("/" + leaf, "expected a component.element key");
    if (!value.is_number()) SchemaFail("/" + leaf, "expected a number");
    double p = value.get<double>();
    if (!(p >= 0.0 && p <= 1.0)) SchemaFail("/" + leaf, "probability outside [0,1]");
    out[leaf] = p;
  }
  return out;
}

// On-disk repository ------------------------------------------------------------
//
// <dir>/index.json   {"format":"insider/1","entries":{"<key>":"<key>.json"}}
// <dir>/<key>.json   {"format":"insider/1","key":"<key>","component":{...}}
// <dir>/.lock        exists while a writer holds the repository

/// Exclusive writer lock on a repository directory.
class RepositoryLock {
 public:
  explicit RepositoryLock(const std::filesystem::path& dir) : path_(dir / ".lock") {
    int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
      throw Error(ErrorCode::kIoError, "repository '" + dir.string() + "' is locked (" +
                                           path_.string() + " exists)");
    ::close(fd);
  }
  ~RepositoryLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  RepositoryLock(const RepositoryLock&) = delete;
  RepositoryLock& operator=(const RepositoryLock&) = delete;

 private:
  std::filesystem::path path_;
};

/// A missing directory reads as an empty repository.
inline ComponentRepository LoadRepository(const std::filesystem::path& dir) {
  ComponentRepository repo;
  std::filesystem::path index_path = dir / "index.json";
  if (!std::filesystem::exists(index_path)) return repo;
  Json index = LoadJsonFile(index_path);
  json_detail::WithOrigin(index_path.string(), [&] {
    using namespace json_detail;
    CheckFormat(index);
    OnlyKeys(index, {"format", "entries"}, "");
    const Json& entries = Member(index, "entries", "");
    if (!entries.is_object()) SchemaFail("/entries", "expected an object");
    for (const auto& [key, file] : entries.items()) {
      if (!file.is_string()) SchemaFail("/entries/" + key, "expected a file name");
      std::filesystem::path entry_path = dir / file.get<std::string>();
      Json doc = LoadJsonFile(entry_path);
      json_detail::WithOrigin(entry_path.string(), [&] {
        CheckFormat(doc);
        OnlyKeys(doc, {"format", "key", "component"}, "");
        if (String(doc, "key", "") != key) SchemaFail("/key", "does not match the index");
        repo.store(SamComponentFromJson(Member(doc, "component", ""), "/component"), key);
        return 0;
      });
    }
    return 0;
  });
  return repo;
}

/// Stores @p component under @p key, creating the directory if needed.
inline void StoreInRepository(const std::filesystem::path& dir, const SamComponent& component,
                              const std::string& key) {
  std::filesystem::create_directories(dir);
  RepositoryLock lock(dir);
  ComponentRepository repo = LoadRepository(dir);
  repo.store(component, key);
  Json entries = Json::object();
  for (const auto& [k, c] : repo.entries()) entries[k] = k + ".json";
  WriteTextFile(dir / (key + ".json"),
                CanonicalText(Json{{"format", kFormatTag},
                                   {"key", key},
                                   {"component", ToJson(repo.fetch(key))}}));
  WriteTextFile(dir / "index.json",
                CanonicalText(Json{{"format", kFormatTag}, {"entries", std::move(entries)}}));
}

// Project reference file ------------------------------------------------------
//
// {"format":"insider/1",
//  "sm":  {"path": "<relative to this file>", "fingerprint": "..."},
//  "sam": {"path": "...", "fingerprint": "..."}}

struct ModelReference {
  std::string path;
  std::string fingerprint;
};

struct ProjectFile {
  ModelReference sm;
  ModelReference sam;
};

inline Json ToJson(const ProjectFile& p) {
  return Json{{"format", kFormatTag},
              {"sm", {{"path", p.sm.path}, {"fingerprint", p.sm.fingerprint}}},
              {"sam", {{"path", p.sam.path}, {"fingerprint", p.sam.fingerprint}}}};
}

inline ProjectFile ProjectFileFromJson(const Json& doc) {
  using namespace json_detail;
  CheckFormat(doc);
  OnlyKeys(doc, {"format", "sm", "sam"}, "");
  auto ref = [&](const char* key) {
    const Json& r = Member(doc, key, "");
    std::string path = std::string("/") + key;
    OnlyKeys(r, {"path", "fingerprint"}, path);
    return ModelReference{String(r, "path", path), String(r, "fingerprint", path)};
  };
  return {ref("sm"), ref("sam")};
}

/// Models loaded through a project file, with a warning per reference whose
/// fingerprint no longer matches the model.
struct LoadedProject {
  SystemModel sm;
  SafetyAnalysisModel sam;
  std::filesystem::path sm_path;
  std::filesystem::path sam_path;
  std::vector<std::string> warnings;
};

inline LoadedProject LoadProject(const std::filesystem::path& project_path) {
  Json doc = LoadJsonFile(project_path);
  ProjectFile p =
      json_detail::WithOrigin(project_path.string(), [&] { return ProjectFileFromJson(doc); });
  std::filesystem::path base = project_path.parent_path();
  LoadedProject out;
  out.sm_path = base / p.sm.path;
  out.sam_path = base / p.sam.path;
  out.sm = LoadSystemModel(out.sm_path);
  out.sam = LoadSafetyModel(out.sam_path);
  if (Fingerprint(out.sm) != p.sm.fingerprint)
    out.warnings.push_back("system model '" + p.sm.path + "' changed since it was linked");
  if (Fingerprint(out.sam) != p.sam.fingerprint)
    out.warnings.push_back("safety model '" + p.sam.path + "' changed since it was linked");
  return out;
}

}  // namespace insider
