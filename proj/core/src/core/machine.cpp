#include "kum/core/machine.hpp"

#include <deque>
#include <set>

#include "kum/core/canonical.hpp"
#include "kum/core/pattern.hpp"

namespace kum {

std::string_view to_string(Status status) noexcept {
  switch (status) {
    case Status::Running: return "Running";
    case Status::Halted: return "Halted";
    case Status::Stuck: return "Stuck";
  }
  return "?";
}

std::string_view to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::Halted: return "Halted";
    case StopReason::Stuck: return "Stuck";
    case StopReason::StepLimit: return "StepLimit";
    case StopReason::InvariantBreach: return "InvariantBreach";
  }
  return "?";
}

MachineState initial_state(StorageGraph graph) {
  MachineState s;
  s.graph = std::move(graph);
  return s;
}

std::optional<Binding> match_rule(const MachineState& state, const RewriteRule& rule) {
  const Pattern& pat = rule.pattern;
  if (auto problem = address_determinism_problem(pat)) {
    throw Error(ErrorCode::AmbiguousPattern, "rule " + rule.name + ": " + *problem);
  }
  const StorageGraph& g = state.graph;
  if (!g.contains(g.active()) || g.label(g.active()) != pat.active_label) return std::nullopt;

  Binding binding{{pat.active_var, g.active()}};
  std::deque<VarName> work{pat.active_var};
  while (!work.empty()) {
    const VarName u = work.front();
    work.pop_front();
    const NodeId at = binding.at(u);
    for (const EdgeAtom& e : pat.edges) {
      if (e.forbidden || (e.a != u && e.b != u)) continue;
      const VarName& v = e.a == u ? e.b : e.a;
      if (binding.contains(v)) continue;
      const Label want = *pat.label_of(v);
      std::optional<NodeId> found;
      for (NodeId n : g.neighbors(at)) {
        if (g.label(n) != want) continue;
        if (found) {
          throw Error(ErrorCode::AmbiguousPattern,
                      "rule " + rule.name + ": node " + std::to_string(to_uint(at)) + " has several neighbors labeled " +
                          want.name + " (addressing property violated)");
        }
        found = n;
      }
      if (!found) return std::nullopt;
      binding.emplace(v, *found);
      work.push_back(v);
    }
  }

  std::set<NodeId> used;
  for (const auto& [var, id] : binding) {
    if (!used.insert(id).second) return std::nullopt;  // distinct variables need distinct nodes
  }
  for (const EdgeAtom& e : pat.edges) {
    if (g.has_edge(binding.at(e.a), binding.at(e.b)) == e.forbidden) return std::nullopt;
  }
  return binding;
}

namespace {

class Rewriter {
 public:
  Rewriter(const MachineState& state, const RewriteRule& rule, const Binding& binding, const ApplyOptions& options)
      : next_(state), rule_(rule), vars_(binding), options_(options), step_(state.step_count + 1) {}

  Applied run() {
    for (const Action& action : rule_.actions) std::visit([this](const auto& a) { apply(a); }, action.op);
    StorageGraph& g = next_.graph;
    if (rule_.move_to) {
      const NodeId target = lookup(*rule_.move_to);
      g.set_active(target);
      emit(OpKind::MoveActive, {ref(target)});
    }
    auto report = validate_graph(g, options_.degree_bound);
    if (!report.ok()) throw InvariantBreach(rule_.name, std::move(report));
    ++next_.step_count;
    return Applied{std::move(next_), std::move(records_)};
  }

 private:
  NodeRef ref(NodeId id) const { return NodeRef{id, next_.graph.label(id)}; }

  NodeId lookup(const VarName& var) const {
    auto it = vars_.find(var);
    if (it == vars_.end()) throw InvariantBreach(rule_.name, "variable " + var + " is not bound to a live node");
    return it->second;
  }

  void emit(OpKind kind, std::vector<NodeRef> operands, std::string text = {}) {
    TraceRecord r;
    r.step = step_;
    r.rule = rule_.name;
    r.op = PrimOp{kind, std::move(operands), std::move(text)};
    if (options_.hash_ops && next_.graph.node_count() <= options_.hash_size_limit) {
      try {
        r.hash = canonical_hash(next_.graph, options_.hash_size_limit);
      } catch (const Error&) {
        r.hash = std::string(kNoHash);  // active transiently deleted
      }
    }
    records_.push_back(std::move(r));
  }

  template <typename F>
  void guarded(F&& f) {
    try {
      f();
    } catch (const InvariantBreach&) {
      throw;
    } catch (const Error& e) {
      throw InvariantBreach(rule_.name, e.what());
    }
  }

  void apply(const act::New& a) {
    guarded([&] {
      StorageGraph& g = next_.graph;
      const NodeId id = g.add_node(a.label);
      emit(OpKind::AddNode, {ref(id)});
      g.add_edge(g.active(), id);
      emit(OpKind::AddEdge, {ref(g.active()), ref(id)});
      vars_[a.var] = id;
    });
  }

  void apply(const act::Delete& a) {
    guarded([&] {
      StorageGraph& g = next_.graph;
      const NodeId id = lookup(a.var);
      const auto nbrs = g.neighbors(id);
      for (NodeId n : nbrs) {
        const NodeRef from = ref(id);
        const NodeRef to = ref(n);
        g.remove_edge(id, n);
        emit(OpKind::RemoveEdge, {from, to});
      }
      const NodeRef gone = ref(id);
      g.remove_node(id);
      emit(OpKind::RemoveNode, {gone});
      vars_.erase(a.var);
    });
  }

  void apply(const act::Link& a) {
    guarded([&] {
      const NodeId x = lookup(a.a);
      const NodeId y = lookup(a.b);
      next_.graph.add_edge(x, y);
      emit(OpKind::AddEdge, {ref(x), ref(y)});
    });
  }

  void apply(const act::Cut& a) {
    guarded([&] {
      const NodeId x = lookup(a.a);
      const NodeId y = lookup(a.b);
      next_.graph.remove_edge(x, y);
      emit(OpKind::RemoveEdge, {ref(x), ref(y)});
    });
  }

  void apply(const act::Relabel& a) {
    guarded([&] {
      const NodeId x = lookup(a.var);
      const NodeRef before = ref(x);
      next_.graph.relabel(x, a.label);
      emit(OpKind::Relabel, {before}, a.label.name);
    });
  }

  void apply(const act::Output& a) {
    next_.output += a.text;
    emit(OpKind::Output, {}, a.text);
  }

  void apply(const act::Halt&) {
    next_.status = Status::Halted;
    emit(OpKind::Halt, {});
  }

  MachineState next_;
  const RewriteRule& rule_;
  Binding vars_;
  const ApplyOptions& options_;
  std::uint64_t step_;
  std::vector<TraceRecord> records_;
};

}  // namespace

Applied apply_rule(const MachineState& state, const RewriteRule& rule, const Binding& binding,
                   const ApplyOptions& options) {
  return Rewriter(state, rule, binding, options).run();
}

StepResult step(const MachineState& state, const Program& program, const ApplyOptions& options) {
  if (state.status != Status::Running) {
    throw Error(ErrorCode::HaltedError, "machine is " + std::string(to_string(state.status)));
  }
  ApplyOptions opts = options;
  opts.degree_bound = program.degree_bound;
  for (const RewriteRule& rule : program.rules) {
    if (auto binding = match_rule(state, rule)) {
      auto applied = apply_rule(state, rule, *binding, opts);
      return StepResult{std::move(applied.state), std::move(applied.records), rule.name};
    }
  }
  MachineState stuck = state;
  stuck.status = Status::Stuck;
  return StepResult{std::move(stuck), {}, std::nullopt};
}

RunResult run(const MachineState& initial, const Program& program, std::uint64_t max_steps,
              const RunOptions& options) {
  RunResult result;
  result.final_state = initial;
  ApplyOptions opts;
  opts.hash_ops = options.hash_ops;
  opts.hash_size_limit = options.hash_size_limit;

  auto settle = [&result] {
    switch (result.final_state.status) {
      case Status::Halted: result.reason = StopReason::Halted; return true;
      case Status::Stuck: result.reason = StopReason::Stuck; return true;
      case Status::Running: return false;
    }
    return false;
  };

  if (settle()) return result;
  for (std::uint64_t i = 0; i < max_steps; ++i) {
    try {
      auto s = step(result.final_state, program, opts);
      result.final_state = std::move(s.state);
      for (auto& r : s.records) result.trace.push_back(std::move(r));
    } catch (const InvariantBreach& e) {
      result.reason = StopReason::InvariantBreach;
      result.breach = e.what();
      return result;
    }
    if (settle()) return result;
  }
  result.reason = StopReason::StepLimit;
  return result;
}

}  // namespace kum
