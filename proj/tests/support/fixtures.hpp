#pragma once

// The running example: a three-component system and its component fault
// tree, plus the single-element mutations used by the consistency tests.

#include <filesystem>
#include <string>
#include <vector>

#include "insider/insider.hpp"

namespace insider::testing {

inline QualifiedName Q(const std::string& text) { return QualifiedName::ParseOrThrow(text); }

inline std::vector<Component> SmExComponents() { return {{"c1"}, {"c2"}, {"c3"}}; }

inline std::vector<Port> SmExPorts() {
  return {{"in1", "c1", Direction::kIn},   {"in2", "c2", Direction::kIn},
          {"in3", "c3", Direction::kIn},   {"out1", "c1", Direction::kOut},
          {"out2", "c1", Direction::kOut}, {"out3", "c2", Direction::kOut},
          {"out4", "c3", Direction::kOut}};
}

inline std::vector<Connection> SmExConnections() {
  return {{"con1", Q("c1.out1"), Q("c2.in2")}, {"con2", Q("c1.out2"), Q("c3.in3")}};
}

inline SystemModel SmEx() {
  return BuildSystemModel(SmExComponents(), SmExPorts(), SmExConnections());
}

inline FailurePort FIn(const std::string& name, const std::string& traces,
                       const std::string& mode = kDefaultFailureMode) {
  return {name, Direction::kIn, Q(traces), mode};
}

inline FailurePort FOut(const std::string& name, const std::string& traces,
                        const std::string& mode = kDefaultFailureMode) {
  return {name, Direction::kOut, Q(traces), mode};
}

inline SamComponent SamC1() {
  SamComponent c;
  c.name = "c1";
  c.events = {{"w", std::nullopt}, {"x", std::nullopt}};
  c.failure_ports = {FIn("a", "c1.in1"), FOut("b", "c1.out1"),
                     FOut("c", "c1.out1", "commission"), FOut("d", "c1.out2")};
  c.definitions["b"] = Expr::And({Expr::Input("a"), Expr::Event("w")});
  c.definitions["d"] = Expr::Or({Expr::Input("a"), Expr::Event("x")});
  c.definitions["c"] = Expr::Input("a");
  return c;
}

inline SamComponent SamC2() {
  SamComponent c;
  c.name = "c2";
  c.events = {{"y", std::nullopt}};
  c.failure_ports = {FIn("e", "c2.in2"), FIn("f", "c2.in2", "commission"),
                     FOut("h", "c2.out3"), FOut("i", "c2.out3", "commission")};
  c.definitions["h"] = Expr::Or({Expr::Input("e"), Expr::Event("y")});
  c.definitions["i"] = Expr::Input("f");
  return c;
}

inline SamComponent SamC3() {
  SamComponent c;
  c.name = "c3";
  c.events = {{"z", std::nullopt}};
  c.failure_ports = {FIn("g", "c3.in3"), FOut("j", "c3.out4")};
  c.definitions["j"] = Expr::And({Expr::Input("g"), Expr::Event("z")});
  return c;
}

inline std::vector<FailureConnection> SamExConnections() {
  return {{"con1'", Q("c1.b"), Q("c2.e")},
          {"con2'", Q("c1.c"), Q("c2.f")},
          {"con3'", Q("c1.d"), Q("c3.g")}};
}

inline SafetyAnalysisModel SamEx() {
  return BuildSafetyModel({SamC1(), SamC2(), SamC3()}, SamExConnections());
}

inline std::filesystem::path DataDir() { return INSIDER_TEST_DATA_DIR; }

// Single-element mutations of the example pair ---------------------------------

/// Expected finding, compared by kind, subject and related names.
struct ExpectedFinding {
  FindingKind kind;
  std::string subject;
  std::vector<std::string> related;

  friend auto operator<=>(const ExpectedFinding&, const ExpectedFinding&) = default;
};

struct Mutation {
  std::string name;
  SystemModel sm;
  SafetyAnalysisModel sam;
  std::vector<ExpectedFinding> expected;
};

inline std::vector<FailureConnection> SamExConnectionsWithout(const std::string& name) {
  auto out = SamExConnections();
  std::erase_if(out, [&](const FailureConnection& fc) { return fc.name == name; });
  return out;
}

/// The expectations were worked out by hand from the correspondence rules,
/// not by running the checker.
inline std::vector<Mutation> Mutations() {
  std::vector<Mutation> out;
  using K = FindingKind;

  // SAM_c3 deleted; con3' goes with it since it would dangle.
  out.push_back({"remove SAM_c3", SmEx(),
                 BuildSafetyModel({SamC1(), SamC2()}, SamExConnectionsWithout("con3'")),
                 {{K::kMissingSamComponent, "c3", {}},
                  {K::kMissingFailurePort, "c3.in3", {}},
                  {K::kMissingFailurePort, "c3.out4", {}},
                  {K::kMissingFailureConnection, "con2", {"c1.out2", "c3.in3"}}}});

  // Failure port g deleted with its connection; j's logic read g and is
  // left undefined.
  SamComponent c3 = SamC3();
  std::erase_if(c3.failure_ports, [](const FailurePort& f) { return f.name == "g"; });
  c3.definitions["j"] = std::nullopt;
  out.push_back({"remove failure port g", SmEx(),
                 BuildSafetyModel({SamC1(), SamC2(), c3}, SamExConnectionsWithout("con3'")),
                 {{K::kMissingFailurePort, "c3.in3", {}},
                  {K::kMissingFailureConnection, "con2", {"c1.out2", "c3.in3"}},
                  {K::kUndefinedOutportExpression, "c3.j", {}}}});

  out.push_back({"remove con3'", SmEx(),
                 BuildSafetyModel({SamC1(), SamC2(), SamC3()}, SamExConnectionsWithout("con3'")),
                 {{K::kMissingFailureConnection, "con2", {"c1.out2", "c3.in3"}}}});

  auto components = SmExComponents();
  components.push_back({"c4"});
  out.push_back({"add component c4", BuildSystemModel(components, SmExPorts(), SmExConnections()),
                 SamEx(),
                 {{K::kMissingSamComponent, "c4", {}}}});

  // a stops tracing in1; traces_to is mandatory, so it now names a port
  // that does not exist.
  SamComponent c1 = SamC1();
  c1.failure_ports[0].traces_to = Q("c1.in9");
  out.push_back({"remove in1's trace", SmEx(),
                 BuildSafetyModel({c1, SamC2(), SamC3()}, SamExConnections()),
                 {{K::kMissingFailurePort, "c1.in1", {}},
                  {K::kDanglingTrace, "c1.a", {"c1.in9"}}}});

  // g is already driven by con3', so the spurious link needs g free.
  auto connections = SamExConnectionsWithout("con3'");
  connections.push_back({"spur", Q("c2.h"), Q("c3.g")});
  out.push_back({"add spurious failure connection", SmEx(),
                 BuildSafetyModel({SamC1(), SamC2(), SamC3()}, connections),
                 {{K::kMissingFailureConnection, "con2", {"c1.out2", "c3.in3"}},
                  {K::kOrphanFailureConnection, "spur", {"c2.h", "c3.g"}}}});
  return out;
}

inline std::vector<ExpectedFinding> Observed(const std::vector<Finding>& findings) {
  std::vector<ExpectedFinding> out;
  for (const Finding& f : findings) out.push_back({f.kind, f.subject, f.related});
  return out;
}

}  // namespace insider::testing
