#pragma once

/// @file cli.hpp
/// The `insider` command line, callable in-process for testing.
///
/// Exit codes: 0 success, 1 findings present (check) or a non-empty plan
/// with --fail-on-change (sync), 2 usage, I/O or validation error.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "insider/analysis.hpp"
#include "insider/binding.hpp"
#include "insider/consistency.hpp"
#include "insider/io.hpp"
#include "insider/synchronizer.hpp"

namespace insider::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitError = 2;

struct Environment {
  /// Default for --repo, normally taken from INSIDER_REPO.
  std::optional<std::string> repo_dir;
};

namespace detail {

struct ModelOptions {
  std::string sm;
  std::string sam;
  std::string project;
};

inline void AddModelOptions(CLI::App* cmd, ModelOptions& o) {
  auto* sm = cmd->add_option("--sm", o.sm, "System model file");
  auto* sam = cmd->add_option("--sam", o.sam, "Safety analysis model file");
  auto* project = cmd->add_option("--project", o.project, "Project reference file (see 'link')");
  sm->excludes(project);
  sam->excludes(project);
}

struct Models {
  SystemModel sm;
  SafetyAnalysisModel sam;
  std::filesystem::path sam_path;
  std::optional<std::filesystem::path> project_path;
};

inline Models LoadModels(const ModelOptions& o, std::ostream& err) {
  Models m;
  if (!o.project.empty()) {
    LoadedProject p = LoadProject(o.project);
    for (const std::string& w : p.warnings) err << "warning: " << w << "\n";
    m.sm = std::move(p.sm);
    m.sam = std::move(p.sam);
    m.sam_path = p.sam_path;
    m.project_path = o.project;
    return m;
  }
  if (o.sm.empty() || o.sam.empty())
    throw CLI::ValidationError("--sm and --sam (or --project) are required");
  m.sm = LoadSystemModel(o.sm);
  m.sam = LoadSafetyModel(o.sam);
  m.sam_path = o.sam;
  return m;
}

inline constexpr const char* kHelpHint = "Run with --help for more information.\n";

inline bool IsJson(const std::string& format) { return format == "json"; }

inline void AddFormat(CLI::App* cmd, std::string& format) {
  cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
}

/// Re-homes a stored component under another name.
inline SamComponent Rehome(SamComponent c, const std::string& name) {
  for (FailurePort& f : c.failure_ports)
    if (f.traces_to.component == c.name) f.traces_to.component = name;
  c.name = name;
  return c;
}

}  // namespace detail

inline int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               const Environment& env = {}) {
  CLI::App app{"Bind, check, synchronize and analyze system and component fault tree models",
               "insider"};
  app.require_subcommand(1);

  std::string format = "text";
  detail::ModelOptions models;

  auto* check = app.add_subcommand("check", "Report inconsistencies between the two models");
  detail::AddModelOptions(check, models);
  detail::AddFormat(check, format);

  bool dry_run = false, fail_on_change = false;
  std::string renames_path, repo_dir = env.repo_dir.value_or(""), out_path;
  auto* sync = app.add_subcommand("sync", "Synchronize the safety model with the system model");
  detail::AddModelOptions(sync, models);
  detail::AddFormat(sync, format);
  sync->add_flag("--dry-run", dry_run, "Print the change set without writing");
  sync->add_flag("--fail-on-change", fail_on_change, "Exit 1 when the change set is not empty");
  sync->add_option("--renames", renames_path, "Rename hints file");
  sync->add_option("--repo", repo_dir, "Component repository directory");
  sync->add_option("--out", out_path, "Where to write the synchronized model (default: --sam)");

  auto* trace = app.add_subcommand("trace", "Print the traceability mapping");
  detail::AddModelOptions(trace, models);
  detail::AddFormat(trace, format);

  std::string top, prob_path;
  bool want_mcs = false;
  auto* analyze = app.add_subcommand("analyze", "Fault tree analysis of one failure outport");
  detail::AddModelOptions(analyze, models);
  detail::AddFormat(analyze, format);
  analyze->add_option("--top", top, "Failure outport, e.g. c3.j")->required();
  analyze->add_flag("--mcs", want_mcs, "Compute minimal cut sets");
  analyze->add_option("--prob", prob_path, "Leaf probability file");

  std::string component, key, sam_path;
  auto* repo = app.add_subcommand("repo", "Store or fetch reusable component logic");
  repo->require_subcommand(1);
  auto* store = repo->add_subcommand("store", "Store a component of --sam under --key");
  store->add_option("--repo", repo_dir, "Repository directory");
  store->add_option("--sam", sam_path, "Safety analysis model file")->required();
  store->add_option("--component", component, "Component to store")->required();
  store->add_option("--key", key, "Repository key, e.g. c1@v1")->required();
  auto* fetch = repo->add_subcommand("fetch", "Print a stored component");
  fetch->add_option("--repo", repo_dir, "Repository directory");
  fetch->add_option("--key", key, "Repository key")->required();
  fetch->add_option("--component", component, "Re-home the component under this name");
  fetch->add_option("--out", out_path, "Write to a file instead of standard output");

  std::string link_out;
  auto* link = app.add_subcommand("link", "Write a project file referencing both models");
  link->add_option("--sm", models.sm, "System model file")->required();
  link->add_option("--sam", models.sam, "Safety analysis model file")->required();
  link->add_option("--out", link_out, "Project file to write")->required();

  if (!args.empty() && !args.front().starts_with("-") && !app.get_subcommand_no_throw(args.front())) {
    err << "error: unknown command '" << args.front() << "'\n" << detail::kHelpHint;
    return kExitError;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << detail::kHelpHint;
    return kExitError;
  }

  try {
    if (check->parsed()) {
      auto m = detail::LoadModels(models, err);
      auto findings = CheckConsistency(m.sm, m.sam, Bind(m.sm, m.sam));
      out << (detail::IsJson(format) ? CanonicalText(FindingsToJson(findings)) : RenderText(findings));
      return findings.empty() ? kExitOk : kExitFindings;
    }

    if (sync->parsed()) {
      auto m = detail::LoadModels(models, err);
      std::optional<RenameHints> hints;
      if (!renames_path.empty()) {
        Json doc = LoadJsonFile(renames_path);
        hints = json_detail::WithOrigin(renames_path, [&] { return RenameHintsFromJson(doc); });
      }
      std::optional<ComponentRepository> components;
      if (!repo_dir.empty()) components = LoadRepository(repo_dir);
      ChangeSet cs = PlanSync(m.sm, m.sam, Bind(m.sm, m.sam), hints ? &*hints : nullptr,
                              components ? &*components : nullptr);
      if (!dry_run) {
        SafetyAnalysisModel result = ApplyChangeSet(m.sam, cs);
        std::filesystem::path target = out_path.empty() ? m.sam_path : std::filesystem::path(out_path);
        if (!cs.empty() || target != m.sam_path) SaveSafetyModel(result, target);
        if (m.project_path && target == m.sam_path) {
          Json doc = LoadJsonFile(*m.project_path);
          ProjectFile p = ProjectFileFromJson(doc);
          p.sam.fingerprint = Fingerprint(result);
          WriteTextFile(*m.project_path, CanonicalText(ToJson(p)));
        }
      }
      out << (detail::IsJson(format) ? CanonicalText(ToJson(cs)) : RenderText(cs));
      return fail_on_change && !cs.empty() ? kExitFindings : kExitOk;
    }

    if (trace->parsed()) {
      auto m = detail::LoadModels(models, err);
      Binding b = Bind(m.sm, m.sam);
      out << (detail::IsJson(format) ? CanonicalText(TraceToJson(m.sm, b))
                                   : RenderTraceTable(m.sm, b));
      return kExitOk;
    }

    if (analyze->parsed()) {
      auto m = detail::LoadModels(models, err);
      std::size_t structural =
          CountStructural(CheckConsistency(m.sm, m.sam, Bind(m.sm, m.sam), {.advisories = false}));
      if (structural > 0)
        err << "warning: models are inconsistent (" << structural
            << " structural findings); run 'insider check'\n";
      AnalysisReport report{Flatten(m.sam, top), std::nullopt, std::nullopt};
      if (want_mcs) report.cut_sets = MinimalCutSets(report.tree);
      if (!prob_path.empty()) {
        auto probs = EventProbabilities(m.sam);
        Json doc = LoadJsonFile(prob_path);
        for (const auto& [leaf, p] :
             json_detail::WithOrigin(prob_path, [&] { return ProbabilitiesFromJson(doc); }))
          probs[leaf] = p;
        report.probability = TopEventProbability(report.tree, probs);
      }
      out << (detail::IsJson(format) ? CanonicalText(ToJson(report)) : RenderText(report));
      return kExitOk;
    }

    if (store->parsed() || fetch->parsed()) {
      if (repo_dir.empty())
        throw CLI::ValidationError("--repo is required when INSIDER_REPO is not set");
      if (store->parsed()) {
        SafetyAnalysisModel sam = LoadSafetyModel(sam_path);
        const SamComponent* c = sam.find_component(component);
        if (!c) throw Error(ErrorCode::kUnknownElement, "no component '" + component + "' in " + sam_path);
        StoreInRepository(repo_dir, *c, key);
        out << "stored " << component << " as " << key << "\n";
        return kExitOk;
      }
      SamComponent c = LoadRepository(repo_dir).fetch(key);
      if (!component.empty()) c = detail::Rehome(std::move(c), component);
      std::string text = CanonicalText(ToJson(c));
      if (out_path.empty()) out << text;
      else WriteTextFile(out_path, text);
      return kExitOk;
    }

    if (link->parsed()) {
      SystemModel sm = LoadSystemModel(models.sm);
      SafetyAnalysisModel sam = LoadSafetyModel(models.sam);
      std::filesystem::path base = std::filesystem::absolute(link_out).parent_path();
      auto rel = [&](const std::string& p) {
        return std::filesystem::absolute(p).lexically_relative(base).generic_string();
      };
      ProjectFile p{{rel(models.sm), Fingerprint(sm)}, {rel(models.sam), Fingerprint(sam)}};
      WriteTextFile(link_out, CanonicalText(ToJson(p)));
      out << "linked " << p.sm.path << " and " << p.sam.path << "\n";
      return kExitOk;
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const Error& e) {
    for (const Issue& issue : e.issues())
      err << "error: " << to_string(issue.code) << ": " << issue.message << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace insider::cli
