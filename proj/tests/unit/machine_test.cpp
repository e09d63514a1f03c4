#include <gtest/gtest.h>

#include "kum/core/canonical.hpp"
#include "kum/core/machine.hpp"
#include "reference_interpreter.hpp"
#include "test_util.hpp"

namespace kum {
namespace {

using testing::graph_or_throw;
using testing::program_or_throw;

const char* kFig6Rule = "rule grow: active a:A, node b:B, edge(a,b) => new c:C, link(b,c), cut(a,b), move c;";
const char* kFig6Graph = "graph g active 1\nnode 1 A\nnode 2 B\nedge 1 2\n";

std::vector<std::string> op_lines(const std::vector<TraceRecord>& records) {
  std::vector<std::string> out;
  for (const auto& r : records) {
    std::string s(to_string(r.op.kind));
    for (const auto& ref : r.op.operands) s += " " + std::to_string(to_uint(ref.id));
    out.push_back(s);
  }
  return out;
}

TEST(Match, Fig6Binding) {
  const auto p = program_or_throw(kFig6Rule);
  const auto s = initial_state(graph_or_throw(kFig6Graph));
  auto b = match_rule(s, p.rules[0]);
  ASSERT_TRUE(b);
  EXPECT_EQ(*b, (Binding{{"a", NodeId{1}}, {"b", NodeId{2}}}));
}

TEST(Match, LabelMismatch) {
  const auto p = program_or_throw(kFig6Rule);
  const auto s = initial_state(graph_or_throw("graph g active 1\nnode 1 A\nnode 2 C\nedge 1 2\n"));
  EXPECT_FALSE(match_rule(s, p.rules[0]));
}

TEST(Match, ForbiddenEdge) {
  const auto p = program_or_throw("rule r: active a:A, node b:B, node c:C, edge(a,b), edge(b,c), noedge(a,c) => halt;");
  const auto open = initial_state(graph_or_throw("graph g active 1\nnode 1 A\nnode 2 B\nnode 3 C\nedge 1 2\nedge 2 3\n"));
  EXPECT_TRUE(match_rule(open, p.rules[0]));
  const auto closed = initial_state(
      graph_or_throw("graph g active 1\nnode 1 A\nnode 2 B\nnode 3 C\nedge 1 2\nedge 2 3\nedge 1 3\n"));
  EXPECT_FALSE(match_rule(closed, p.rules[0]));
}

TEST(Match, NonDeterministicPatternThrows) {
  Program p;
  RewriteRule r;
  r.name = "twins";
  r.pattern.active_var = "a";
  r.pattern.active_label = "A";
  r.pattern.nodes = {{"b", "B", {}}, {"c", "B", {}}};
  r.pattern.edges = {{"a", "b", false, {}}, {"a", "c", false, {}}};
  r.actions.push_back(Action{act::Halt{}, {}});
  const auto s = initial_state(graph_or_throw(kFig6Graph));
  try {
    match_rule(s, r);
    FAIL() << "expected AmbiguousPattern";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AmbiguousPattern);
  }
}

TEST(Apply, Fig6Transition) {
  const auto p = program_or_throw(kFig6Rule);
  const auto s = initial_state(graph_or_throw(kFig6Graph));
  auto step_result = step(s, p, ApplyOptions{3, true, 64});
  EXPECT_EQ(op_lines(step_result.records),
            (std::vector<std::string>{"ADD_NODE 3", "ADD_EDGE 1 3", "ADD_EDGE 2 3", "REMOVE_EDGE 1 2", "MOVE_ACTIVE 3"}));
  const StorageGraph& g = step_result.state.graph;
  EXPECT_EQ(g.edges(), (std::vector<Edge>{{NodeId{1}, NodeId{3}}, {NodeId{2}, NodeId{3}}}));
  EXPECT_EQ(g.active(), NodeId{3});
  EXPECT_EQ(g.label(NodeId{3}), Label{"C"});
  EXPECT_EQ(step_result.records.back().hash, canonical_hash(g));
}

TEST(Apply, HaltOnly) {
  const auto p = program_or_throw("rule stop: active a:A => halt;");
  const auto r = step(initial_state(graph_or_throw(kFig6Graph)), p);
  EXPECT_EQ(r.state.status, Status::Halted);
  EXPECT_EQ(op_lines(r.records), std::vector<std::string>{"HALT"});
}

TEST(Apply, DeleteOnlyNeighborLeavesSingleNode) {
  const auto p = program_or_throw("rule eat: active a:A, node b:B, edge(a,b) => del b;");
  const auto r = step(initial_state(graph_or_throw(kFig6Graph)), p);
  EXPECT_EQ(r.state.graph.node_count(), 1u);
  EXPECT_EQ(op_lines(r.records), (std::vector<std::string>{"REMOVE_EDGE 2 1", "REMOVE_NODE 2"}));
}

TEST(Apply, BreachIsAtomic) {
  // cutting the only edge disconnects the graph
  const auto p = program_or_throw("rule split: active a:A, node b:B, edge(a,b) => cut(a,b);");
  const auto s = initial_state(graph_or_throw(kFig6Graph));
  const MachineState before = s;
  try {
    step(s, p);
    FAIL() << "expected InvariantBreach";
  } catch (const InvariantBreach& e) {
    EXPECT_TRUE(e.report().has(ViolationKind::Disconnected));
  }
  EXPECT_EQ(s, before);
}

TEST(Apply, TransientDisconnectionWithinOneRuleIsAllowed) {
  const auto p = program_or_throw("rule swap: active a:A, node b:B, edge(a,b) => cut(a,b), new c:C, link(b,c);");
  const auto r = step(initial_state(graph_or_throw(kFig6Graph)), p);
  EXPECT_TRUE(validate_graph(r.state.graph, 3).ok());
}

TEST(Apply, NewAndDeleteCountEdges) {
  const auto p = program_or_throw(
      "rule grow: active a:A => new b:B;\n"
      "rule shrink: active a:A, node b:B, node c:C, edge(a,b), edge(a,c) => del a, move b;");
  StorageGraph g = graph_or_throw("graph g active 1\nnode 1 A\nnode 2 C\nedge 1 2\n");
  auto s1 = step(initial_state(g), p);
  EXPECT_EQ(s1.state.graph.node_count(), g.node_count() + 1);
  EXPECT_EQ(s1.state.graph.edge_count(), g.edge_count() + 1);
}

TEST(Step, EmptyProgramIsStuck) {
  const auto r = step(initial_state(graph_or_throw(kFig6Graph)), Program{});
  EXPECT_EQ(r.state.status, Status::Stuck);
  EXPECT_FALSE(r.rule);
  EXPECT_TRUE(r.records.empty());
}

TEST(Step, FirstMatchWins) {
  const std::string never = "rule never: active a:Z => halt;\n";
  const std::string stop = "rule stop: active a:A => out \"x\", halt;\n";
  const std::string grow = "rule grow: active a:A, node b:B, edge(a,b) => new c:C, link(b,c), cut(a,b), move c;\n";
  const auto g = graph_or_throw(kFig6Graph);
  for (const auto& order : {never + stop + grow, never + grow + stop, grow + stop, stop + grow}) {
    const auto p = program_or_throw(order);
    const auto r = step(initial_state(g), p);
    // oracle: the reference interpreter scans rules independently
    const auto ref = testing::reference_run(g, p, 1);
    std::string expected_rule;
    for (const auto& rule : p.rules) {
      if (rule.pattern.active_label == Label{"A"}) {
        expected_rule = rule.name;
        break;
      }
    }
    EXPECT_EQ(r.rule, expected_rule);
    auto expected = testing::from_ref(ref.graph);
    expected.set_name(g.name());
    EXPECT_EQ(r.state.graph, expected);
    EXPECT_EQ(r.state.output, ref.output);
  }
}

TEST(Step, HaltedMachineRejectsStep) {
  MachineState s = initial_state(graph_or_throw(kFig6Graph));
  s.status = Status::Halted;
  EXPECT_THROW(step(s, Program{}), Error);
}

TEST(Run, ZeroStepsLeavesStateAlone) {
  const auto p = program_or_throw(kFig6Rule);
  const auto s = initial_state(graph_or_throw(kFig6Graph));
  const auto r = run(s, p, 0);
  EXPECT_TRUE(r.trace.empty());
  EXPECT_EQ(r.final_state, s);
  EXPECT_EQ(r.reason, StopReason::StepLimit);
}

TEST(Run, StepLimitOnEndlessRelabel) {
  const auto p = program_or_throw("rule spin: active a:A => relabel a:A;");
  const auto r = run(initial_state(graph_or_throw(kFig6Graph)), p, 100);
  EXPECT_EQ(r.reason, StopReason::StepLimit);
  EXPECT_EQ(r.trace.size(), 100u);
  EXPECT_EQ(r.final_state.status, Status::Running);
  EXPECT_EQ(r.final_state.step_count, 100u);
}

TEST(Run, ReportsBreachAndKeepsLastGoodState) {
  const auto p = program_or_throw("rule grow: active a:A => new b:B;");
  const auto r = run(initial_state(graph_or_throw("graph g active 1\nnode 1 A\n")), p, 10);
  EXPECT_EQ(r.reason, StopReason::InvariantBreach);
  EXPECT_EQ(r.final_state.graph.node_count(), 2u);
  EXPECT_NE(r.breach.find("addressing"), std::string::npos);
}

TEST(Run, Deterministic) {
  const auto p = program_or_throw(kFig6Rule);
  const auto s = initial_state(graph_or_throw(kFig6Graph));
  EXPECT_EQ(run(s, p, 10).trace, run(s, p, 10).trace);
}

TEST(Trace, FormatAndParseRoundTrip) {
  const auto p = program_or_throw(
      "rule r: active a:A, node b:B, edge(a,b) => relabel b:C, out \"say \\\"hi\\\"\\n\", new c:D, move c;\n"
      "rule h: active a:D => halt;");
  const auto r = run(initial_state(graph_or_throw(kFig6Graph)), p, 10);
  ASSERT_EQ(r.reason, StopReason::Halted);
  std::ostringstream out;
  write_trace(out, r.trace);
  EXPECT_NE(out.str().find("op=RELABEL args=2:B>C"), std::string::npos);
  EXPECT_EQ(parse_trace(out.str()), r.trace);
}

TEST(Trace, ReplayOpsReproducesFinalGraph) {
  const auto p = program_or_throw(kFig6Rule);
  const auto s = initial_state(graph_or_throw(kFig6Graph));
  const auto r = run(s, p, 1);
  StorageGraph g = s.graph;
  for (const auto& rec : r.trace) apply_op(g, rec.op);
  EXPECT_EQ(g, r.final_state.graph);
}

TEST(Trace, MalformedLineIsAParseError) {
  EXPECT_THROW(parse_trace("step=1 rule=r op=NOPE args= hash=-\n"), Error);
  EXPECT_THROW(parse_trace("garbage\n"), Error);
}

}  // namespace
}  // namespace kum
