#include "kum/lang/lint.hpp"

#include <map>
#include <set>

#include "kum/core/address.hpp"
#include "kum/core/machine.hpp"
#include "kum/core/pattern.hpp"

namespace kum::lang {

std::string_view to_string(LintKind kind) noexcept {
  switch (kind) {
    case LintKind::NonDeterministic: return "non-deterministic";
    case LintKind::DegreeUnsafe: return "degree-unsafe";
    case LintKind::NewLabelClash: return "new-label-clash";
    case LintKind::Shadowed: return "shadowed";
    case LintKind::RadiusExceeded: return "radius-exceeded";
  }
  return "?";
}

Diagnostic to_diagnostic(const LintFinding& f) {
  return Diagnostic{Severity::Warning, "[" + std::string(to_string(f.kind)) + "] rule " + f.rule + ": " + f.message,
                    f.span, {}};
}

namespace {

// The pattern's required structure as a concrete graph, active at the active variable.
struct PatternGraph {
  StorageGraph graph;
  std::map<VarName, NodeId> ids;
};

PatternGraph pattern_graph(const Pattern& p) {
  PatternGraph pg;
  pg.ids[p.active_var] = pg.graph.add_node(p.active_label);
  for (const NodeAtom& n : p.nodes) pg.ids[n.var] = pg.graph.add_node(n.label);
  for (const EdgeAtom& e : p.edges) {
    if (!e.forbidden) pg.graph.add_edge(pg.ids.at(e.a), pg.ids.at(e.b));
  }
  pg.graph.set_active(pg.ids.at(p.active_var));
  return pg;
}

std::set<Label> rule_labels(const RewriteRule& r) {
  std::set<Label> out{r.pattern.active_label};
  for (const NodeAtom& n : r.pattern.nodes) out.insert(n.label);
  for (const Action& a : r.actions) {
    if (auto* n = std::get_if<act::New>(&a.op)) out.insert(n->label);
    if (auto* n = std::get_if<act::Relabel>(&a.op)) out.insert(n->label);
  }
  return out;
}

std::optional<StorageGraph> degree_witness(const Program& prog, const RewriteRule& r) {
  PatternGraph pg = pattern_graph(r.pattern);
  const std::size_t bound = prog.degree_bound;

  const std::set<Label> used = rule_labels(r);
  std::vector<Label> pool;
  for (const Label& l : prog.alphabet) {
    if (!used.contains(l)) pool.push_back(l);
  }
  for (std::size_t k = 1; pool.size() < bound; ++k) {
    Label fresh{"_pad" + std::to_string(k)};
    if (!used.contains(fresh)) pool.push_back(fresh);
  }

  for (const auto& [var, id] : pg.ids) {
    const std::size_t have = pg.graph.degree(id);
    if (have > bound) return std::nullopt;  // can never match a valid graph
    for (std::size_t k = 0; have + k < bound; ++k) pg.graph.add_edge(id, pg.graph.add_node(pool[k]));
  }
  if (!validate_graph(pg.graph, bound).ok()) return std::nullopt;

  const MachineState state = initial_state(pg.graph);
  std::optional<Binding> binding;
  try {
    binding = match_rule(state, r);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (!binding) return std::nullopt;
  try {
    apply_rule(state, r, *binding, ApplyOptions{bound, false, 0});
  } catch (const InvariantBreach& e) {
    if (e.report().has(ViolationKind::DegreeExceeded)) return pg.graph;
  }
  return std::nullopt;
}

std::vector<std::string> new_label_clashes(const RewriteRule& r) {
  PatternGraph pg = pattern_graph(r.pattern);
  StorageGraph& g = pg.graph;
  std::map<NodeId, VarName> created;
  try {
    for (const Action& a : r.actions) {
      if (auto* n = std::get_if<act::New>(&a.op)) {
        const NodeId id = g.add_node(n->label);
        g.add_edge(g.active(), id);
        pg.ids[n->var] = id;
        created[id] = n->var;
      } else if (auto* d = std::get_if<act::Delete>(&a.op)) {
        g.remove_node(pg.ids.at(d->var));
      } else if (auto* l = std::get_if<act::Link>(&a.op)) {
        g.add_edge(pg.ids.at(l->a), pg.ids.at(l->b));
      } else if (auto* c = std::get_if<act::Cut>(&a.op)) {
        g.remove_edge(pg.ids.at(c->a), pg.ids.at(c->b));
      } else if (auto* rl = std::get_if<act::Relabel>(&a.op)) {
        g.relabel(pg.ids.at(rl->var), rl->label);
      }
    }
  } catch (const std::exception&) {
    return {};
  }
  std::map<NodeId, VarName> names;
  for (const auto& [var, id] : pg.ids) names[id] = var;

  std::vector<std::string> out;
  for (NodeId x : g.node_ids()) {
    std::map<Label, NodeId> seen;
    for (NodeId n : g.neighbors(x)) {
      auto [it, fresh] = seen.emplace(g.label(n), n);
      if (fresh) continue;
      const NodeId other = it->second;
      if (!created.contains(n) && !created.contains(other)) continue;
      const NodeId made = created.contains(n) ? n : other;
      const NodeId clash = made == n ? other : n;
      out.push_back("new node " + names[made] + ":" + g.label(made).name + " shares its label with " + names[clash] +
                    ", both adjacent to " + names[x]);
    }
  }
  return out;
}

// True when every graph matched by `later` is also matched by `earlier`.
bool subsumes(const RewriteRule& earlier, const RewriteRule& later) {
  const Pattern& e = earlier.pattern;
  const Pattern& l = later.pattern;
  if (e.active_label != l.active_label) return false;
  const PatternGraph pg = pattern_graph(l);
  std::map<VarName, NodeId> image;
  std::set<NodeId> taken;
  for (const auto& [var, word] : pattern_addresses(e)) {
    auto id = resolve_address(pg.graph, word);
    if (!id || !taken.insert(*id).second) return false;
    image[var] = *id;
  }
  std::set<std::pair<NodeId, NodeId>> forbidden;
  for (const EdgeAtom& a : l.edges) {
    if (a.forbidden) forbidden.insert(std::minmax(pg.ids.at(a.a), pg.ids.at(a.b)));
  }
  for (const EdgeAtom& a : e.edges) {
    const NodeId x = image.at(a.a);
    const NodeId y = image.at(a.b);
    if (a.forbidden ? !forbidden.contains(std::minmax(x, y)) : !pg.graph.has_edge(x, y)) return false;
  }
  return true;
}

void lint_rule(const Program& p, const RewriteRule& r, std::vector<const RewriteRule*>& deterministic,
               std::vector<LintFinding>& out) {
  const SourceSpan& span = r.span.value;
  if (auto problem = address_determinism_problem(r.pattern)) {
    out.push_back({LintKind::NonDeterministic, r.name, *problem, r.pattern.active_span.value, std::nullopt});
    return;
  }
  if (auto depth = pattern_depth(r.pattern); depth && *depth > p.radius) {
    out.push_back({LintKind::RadiusExceeded, r.name,
                   "pattern reaches distance " + std::to_string(*depth) + " but the zone radius is " +
                       std::to_string(p.radius),
                   span, std::nullopt});
  }
  if (auto witness = degree_witness(p, r)) {
    out.push_back({LintKind::DegreeUnsafe, r.name,
                   "applying it to a matched graph whose nodes already have degree " +
                       std::to_string(p.degree_bound) + " exceeds the bound",
                   span, std::move(witness)});
  }
  for (std::string& msg : new_label_clashes(r)) {
    out.push_back({LintKind::NewLabelClash, r.name, std::move(msg), span, std::nullopt});
  }
  for (const RewriteRule* earlier : deterministic) {
    if (subsumes(*earlier, r)) {
      out.push_back({LintKind::Shadowed, r.name, "never fires: earlier rule " + earlier->name + " matches first", span,
                     std::nullopt});
      break;
    }
  }
  deterministic.push_back(&r);
}

}  // namespace

std::vector<LintFinding> lint_program(const Program& p) {
  std::vector<LintFinding> out;
  std::vector<const RewriteRule*> deterministic;
  for (const RewriteRule& r : p.rules) {
    try {
      lint_rule(p, r, deterministic, out);
    } catch (const std::exception&) {
      // malformed hand-built pattern; the parser never produces one
    }
  }
  return out;
}

}  // namespace kum::lang
