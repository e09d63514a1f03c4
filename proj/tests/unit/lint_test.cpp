#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"
#include "kum/core/machine.hpp"
#include "kum/lang/lint.hpp"
#include "test_util.hpp"

namespace kum::lang {
namespace {

using testing::program_or_throw;

std::vector<LintKind> kinds(const std::vector<LintFinding>& f) {
  std::vector<LintKind> out;
  for (const auto& x : f) out.push_back(x.kind);
  return out;
}

TEST(Lint, Fig6IsClean) {
  const auto p =
      program_or_throw("rule grow: active a:A, node b:B, edge(a,b) => new c:C, link(b,c), cut(a,b), move c;");
  EXPECT_TRUE(lint_program(p).empty());
}

TEST(Lint, TwinNeighborsAreNonDeterministic) {
  const auto p = program_or_throw("rule r: active a:A, node b:B, node c:B, edge(a,b), edge(a,c) => halt;");
  EXPECT_EQ(kinds(lint_program(p)), std::vector<LintKind>{LintKind::NonDeterministic});
}

TEST(Lint, UnreachableVariableIsNonDeterministic) {
  const auto p = program_or_throw("rule r: active a:A, node b:B => halt;");
  EXPECT_EQ(kinds(lint_program(p)), std::vector<LintKind>{LintKind::NonDeterministic});
}

TEST(Lint, FourLinksExceedDegreeThree) {
  const auto p = program_or_throw(
      "rule r: active a:A, node b:B, edge(a,b) => new c:C, new d:D, new e:E, new f:F, link(b,c);");
  const auto findings = lint_program(p);
  auto it = std::find_if(findings.begin(), findings.end(),
                         [](const LintFinding& f) { return f.kind == LintKind::DegreeUnsafe; });
  ASSERT_NE(it, findings.end());
  ASSERT_TRUE(it->witness);
}

TEST(Lint, RadiusExceeded) {
  const auto p = program_or_throw(
      "rule r: active a:A, node b:B, node c:C, edge(a,b), edge(b,c) => halt;");
  EXPECT_EQ(kinds(lint_program(p)), std::vector<LintKind>{LintKind::RadiusExceeded});
}

TEST(Lint, NewLabelClash) {
  const auto p = program_or_throw("rule r: active a:A, node b:B, edge(a,b) => new c:B;");
  const auto k = kinds(lint_program(p));
  EXPECT_NE(std::find(k.begin(), k.end(), LintKind::NewLabelClash), k.end());
}

TEST(Lint, Shadowed) {
  const auto p = program_or_throw(
      "rule general: active a:A, node b:B, edge(a,b) => halt;\n"
      "rule specific: active x:A, node y:B, node z:C, edge(x,y), edge(x,z) => halt;\n"
      "rule other: active x:A, node z:C, edge(x,z) => halt;\n");
  const auto findings = lint_program(p);
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].kind, LintKind::Shadowed);
  EXPECT_EQ(findings[0].rule, "specific");
}

TEST(Lint, ForbiddenEdgeBlocksShadowing) {
  const auto p = program_or_throw(
      "rule guarded: active a:A, node b:B, node c:C, edge(a,b), edge(a,c), noedge(b,c) => halt;\n"
      "rule open: active a:A, node b:B, node c:C, edge(a,b), edge(a,c) => halt;\n");
  EXPECT_TRUE(lint_program(p).empty());
}

TEST(Lint, DiagnosticFormat) {
  const auto p = program_or_throw("rule r: active a:A, node b:B => halt;");
  const auto d = to_diagnostic(lint_program(p).at(0));
  EXPECT_EQ(d.severity, Severity::Warning);
  EXPECT_EQ(format(d).rfind("<input>:1:9: warning: [non-deterministic] rule r:", 0), 0u) << format(d);
}

// Soundness: every degree-unsafe finding carries a witness that is a valid
// graph on which the rule matches and its application exceeds the bound.
TEST(Lint, DegreeWitnessesAreSound) {
  std::mt19937_64 rng(31);
  std::size_t flagged = 0;
  for (int i = 0; i < 3000; ++i) {
    const Program p = testing::random_program(rng);
    for (const auto& f : lint_program(p)) {
      if (f.kind != LintKind::DegreeUnsafe) continue;
      ++flagged;
      ASSERT_TRUE(f.witness);
      ASSERT_TRUE(validate_graph(*f.witness, p.degree_bound).ok());
      const RewriteRule& rule = *std::find_if(p.rules.begin(), p.rules.end(),
                                              [&](const RewriteRule& r) { return r.name == f.rule; });
      const MachineState s = initial_state(*f.witness);
      const auto binding = match_rule(s, rule);
      ASSERT_TRUE(binding);
      try {
        apply_rule(s, rule, *binding, ApplyOptions{p.degree_bound, false, 0});
        FAIL() << "witness applied cleanly for rule " << f.rule;
      } catch (const InvariantBreach& e) {
        EXPECT_TRUE(e.report().has(ViolationKind::DegreeExceeded));
      }
    }
  }
  EXPECT_GT(flagged, 50u);
}

}  // namespace
}  // namespace kum::lang
