#include <gtest/gtest.h>

#include <filesystem>

#include "insider/io.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

namespace insider {
namespace {

namespace fs = std::filesystem;
using testing::DataDir;
using testing::Q;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("insider-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

ErrorCode CodeOf(const std::function<void()>& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

TEST(ModelFiles, FixturesTranscribeTheExample) {
  EXPECT_EQ(LoadSystemModel(DataDir() / "sm_ex.json"), testing::SmEx());
  EXPECT_EQ(LoadSafetyModel(DataDir() / "sam_ex.json"), testing::SamEx());
  EXPECT_TRUE(LoadSafetyModel(DataDir() / "empty_sam.json").components().empty());
}

TEST(ModelFiles, FixturesAreCanonical) {
  for (const char* name : {"sm_ex.json", "sm_without_c3.json", "sm_renamed_c1.json"})
    EXPECT_EQ(CanonicalText(ToJson(LoadSystemModel(DataDir() / name))),
              ReadTextFile(DataDir() / name))
        << name;
  for (const char* name : {"sam_ex.json", "empty_sam.json", "sam_undefined_j.json"})
    EXPECT_EQ(CanonicalText(ToJson(LoadSafetyModel(DataDir() / name))),
              ReadTextFile(DataDir() / name))
        << name;
}

TEST(ModelFiles, SaveThenLoad) {
  TempDir dir;
  SaveSystemModel(testing::SmEx(), dir.path() / "sm.json");
  SaveSafetyModel(testing::SamEx(), dir.path() / "sam.json");
  EXPECT_EQ(LoadSystemModel(dir.path() / "sm.json"), testing::SmEx());
  EXPECT_EQ(LoadSafetyModel(dir.path() / "sam.json"), testing::SamEx());
}

TEST(ModelFiles, UnknownPortNamesItsPath) {
  std::string message;
  EXPECT_EQ(CodeOf([&] { LoadSystemModel(DataDir() / "bad_unknown_port.json"); }, &message),
            ErrorCode::kSchemaError);
  EXPECT_NE(message.find("/connections/"), std::string::npos) << message;
  EXPECT_NE(message.find("c9.out9"), std::string::npos) << message;
}

TEST(ModelFiles, SyntaxErrorCarriesPosition) {
  std::string message;
  EXPECT_EQ(CodeOf([&] { LoadSystemModel(DataDir() / "bad_syntax.json"); }, &message),
            ErrorCode::kParseError);
  EXPECT_NE(message.find("line 5"), std::string::npos) << message;
}

TEST(ModelFiles, MissingFile) {
  EXPECT_EQ(CodeOf([&] { LoadSystemModel(DataDir() / "does_not_exist.json"); }),
            ErrorCode::kIoError);
}

TEST(ModelFiles, UndefinedLogicLoads) {
  SafetyAnalysisModel sam = LoadSafetyModel(DataDir() / "sam_undefined_j.json");
  EXPECT_EQ(UndefinedOutports(sam), std::vector<QualifiedName>{Q("c3.j")});
}

TEST(ModelFiles, SchemaViolations) {
  auto sm_error = [](const std::string& text) {
    std::string message;
    CodeOf([&] { SystemModelFromJson(ParseJson(text, "t")); }, &message);
    return message;
  };
  EXPECT_NE(sm_error(R"({"components":[],"ports":[],"connections":[]})").find("format"),
            std::string::npos);
  EXPECT_NE(sm_error(R"({"format":"insider/2","components":[],"ports":[],"connections":[]})")
                .find("format"),
            std::string::npos);
  EXPECT_NE(sm_error(R"({"format":"insider/1","components":[{"name":"a","x":1}],"ports":[],"connections":[]})")
                .find("/components/0"),
            std::string::npos);
  EXPECT_NE(sm_error(R"({"format":"insider/1","components":[{"name":"a"}],"ports":[{"name":"p","owner":"a","direction":"up"}],"connections":[]})")
                .find("/ports/0/direction"),
            std::string::npos);

  std::string message;
  EXPECT_EQ(CodeOf([&] {
              SafetyModelFromJson(ParseJson(
                  R"({"format":"insider/1","components":[{"name":"a","events":[],"failure_ports":[],
                      "definitions":{"o":{"op":"xor","args":[]}}}],"failure_connections":[]})",
                  "t"));
            }, &message),
            ErrorCode::kSchemaError);
  EXPECT_NE(message.find("/components/0/definitions/o"), std::string::npos) << message;
}

TEST(ModelFiles, ValidationErrorsPassThrough) {
  // Well-formed JSON, invalid model: two connections drive one inport.
  Json doc = ToJson(testing::SmEx());
  doc["connections"].push_back({{"name", "con3"}, {"source", "c1.out2"}, {"target", "c2.in2"}});
  EXPECT_EQ(CodeOf([&] { SystemModelFromJson(doc); }), ErrorCode::kMultipleDrivers);
}

TEST(Expressions, PrefixTermFormat) {
  Expr b = Expr::And({Expr::Input("a"), Expr::Event("w")});
  EXPECT_EQ(ExprToJson(b).dump(), R"({"args":[{"in":"a"},{"event":"w"}],"op":"and"})");
  EXPECT_EQ(ExprFromJson(ExprToJson(b), ""), b);
  Expr n = Expr::Not(Expr::Or({Expr::Input("a"), Expr::Event("x")}));
  EXPECT_EQ(ExprFromJson(ExprToJson(n), ""), n);
}

TEST(ChangeSets, RoundTrip) {
  ChangeSet cs = PlanSync(testing::SmEx(), BuildSafetyModel({}, {}),
                          Bind(testing::SmEx(), BuildSafetyModel({}, {})));
  cs.notes.push_back("a note");
  std::string text = CanonicalText(ToJson(cs));
  ChangeSet back = ChangeSetFromJson(ParseJson(text, "t"));
  EXPECT_EQ(back, cs);
  EXPECT_EQ(CanonicalText(ToJson(back)), text);
}

TEST(Findings, RoundTrip) {
  for (const testing::Mutation& m : testing::Mutations()) {
    auto findings = CheckConsistency(m.sm, m.sam, Bind(m.sm, m.sam));
    std::string text = CanonicalText(FindingsToJson(findings));
    EXPECT_EQ(FindingsFromJson(ParseJson(text, "t")), findings) << m.name;
  }
}

TEST(Findings, CountMustMatch) {
  Json doc = FindingsToJson({});
  doc["count"] = 3;
  EXPECT_EQ(CodeOf([&] { FindingsFromJson(doc); }), ErrorCode::kSchemaError);
}

TEST(RoundTripProperty, RandomModels) {
  testing::Rng rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int round = 0; round < 100; ++round) {
    SystemModel sm = testing::RandomSystemModel(rng);
    SafetyAnalysisModel generated = testing::RandomSafetyModel(rng, sm);
    auto components = generated.components();
    for (SamComponent& c : components)
      for (BasicEvent& e : c.events)
        if (testing::Coin(rng, 0.5)) e.probability = u(rng);
    SafetyAnalysisModel sam = BuildSafetyModel(components, generated.failure_connections());
    std::string sm_text = CanonicalText(ToJson(sm));
    std::string sam_text = CanonicalText(ToJson(sam));
    SystemModel sm2 = SystemModelFromJson(ParseJson(sm_text, "t"));
    SafetyAnalysisModel sam2 = SafetyModelFromJson(ParseJson(sam_text, "t"));
    ASSERT_EQ(sm2, sm);
    ASSERT_EQ(sam2, sam);
    ASSERT_EQ(CanonicalText(ToJson(sm2)), sm_text);
    ASSERT_EQ(CanonicalText(ToJson(sam2)), sam_text);

    ChangeSet cs = PlanSync(sm, sam, Bind(sm, sam));
    std::string cs_text = CanonicalText(ToJson(cs));
    ASSERT_EQ(ChangeSetFromJson(ParseJson(cs_text, "t")), cs);
    auto findings = CheckConsistency(sm, sam, Bind(sm, sam));
    ASSERT_EQ(FindingsFromJson(ParseJson(CanonicalText(FindingsToJson(findings)), "t")), findings);
  }
}

TEST(Inputs, RenameHintsAndProbabilities) {
  RenameHints hints = RenameHintsFromJson(LoadJsonFile(DataDir() / "renames_c1.json"));
  EXPECT_EQ(hints.renames, (std::map<std::string, std::string>{{"c1", "cA"}}));
  auto p = ProbabilitiesFromJson(LoadJsonFile(DataDir() / "probs_ex.json"));
  EXPECT_EQ(p, (std::map<std::string, double>{{"c1.a", 0.1}, {"c1.x", 0.2}, {"c3.z", 0.5}}));
  EXPECT_EQ(CodeOf([] { ProbabilitiesFromJson(Json{{"c1.a", 2.0}}); }), ErrorCode::kSchemaError);
  EXPECT_EQ(CodeOf([] { ProbabilitiesFromJson(Json{{"a", 0.5}}); }), ErrorCode::kSchemaError);
}

TEST(DiskRepository, StoreFetchAndLock) {
  TempDir dir;
  fs::path repo_dir = dir.path() / "repo";
  EXPECT_TRUE(LoadRepository(repo_dir).empty());
  StoreInRepository(repo_dir, testing::SamC1(), "c1@v1");
  StoreInRepository(repo_dir, testing::SamC3(), "c3");
  ComponentRepository repo = LoadRepository(repo_dir);
  EXPECT_EQ(repo.fetch("c1@v1"), testing::SamC1());
  EXPECT_EQ(repo.fetch("c3"), testing::SamC3());
  EXPECT_FALSE(fs::exists(repo_dir / ".lock"));
  {
    RepositoryLock held(repo_dir);
    EXPECT_EQ(CodeOf([&] { StoreInRepository(repo_dir, testing::SamC2(), "c2"); }),
              ErrorCode::kIoError);
  }
  EXPECT_NO_THROW(StoreInRepository(repo_dir, testing::SamC2(), "c2"));
  EXPECT_EQ(LoadRepository(repo_dir).entries().size(), 3u);
}

TEST(ProjectFiles, FingerprintMismatchWarns) {
  TempDir dir;
  SaveSystemModel(testing::SmEx(), dir.path() / "sm.json");
  SaveSafetyModel(testing::SamEx(), dir.path() / "sam.json");
  ProjectFile p{{"sm.json", Fingerprint(testing::SmEx())}, {"sam.json", Fingerprint(testing::SamEx())}};
  WriteTextFile(dir.path() / "project.json", CanonicalText(ToJson(p)));
  LoadedProject loaded = LoadProject(dir.path() / "project.json");
  EXPECT_TRUE(loaded.warnings.empty());
  EXPECT_EQ(loaded.sam, testing::SamEx());

  SaveSafetyModel(BuildSafetyModel({}, {}), dir.path() / "sam.json");
  loaded = LoadProject(dir.path() / "project.json");
  ASSERT_EQ(loaded.warnings.size(), 1u);
  EXPECT_NE(loaded.warnings[0].find("sam.json"), std::string::npos);
}

}  // namespace
}  // namespace insider
