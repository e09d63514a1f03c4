#include "kum/lang/print.hpp"

#include <sstream>

namespace kum::lang {

std::string quote_string(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

namespace {

struct ActionPrinter {
  std::string operator()(const act::New& a) const { return "new " + a.var + ":" + a.label.name; }
  std::string operator()(const act::Delete& a) const { return "del " + a.var; }
  std::string operator()(const act::Link& a) const { return "link(" + a.a + "," + a.b + ")"; }
  std::string operator()(const act::Cut& a) const { return "cut(" + a.a + "," + a.b + ")"; }
  std::string operator()(const act::Relabel& a) const { return "relabel " + a.var + ":" + a.label.name; }
  std::string operator()(const act::Output& a) const { return "out " + quote_string(a.text); }
  std::string operator()(const act::Halt&) const { return "halt"; }
};

}  // namespace

std::string print_program(const Program& p) {
  std::ostringstream out;
  out << "machine " << p.name << " labels {";
  for (std::size_t i = 0; i < p.alphabet.size(); ++i) out << (i ? ", " : "") << p.alphabet[i].name;
  out << "} degree " << p.degree_bound << " radius " << p.radius << '\n';
  for (const RewriteRule& r : p.rules) {
    const Pattern& pat = r.pattern;
    out << "\nrule " << r.name << ": active " << pat.active_var << ':' << pat.active_label.name;
    for (const NodeAtom& n : pat.nodes) out << ", node " << n.var << ':' << n.label.name;
    for (const EdgeAtom& e : pat.edges) out << ", " << (e.forbidden ? "noedge(" : "edge(") << e.a << ',' << e.b << ')';
    out << " =>";
    bool first = true;
    for (const Action& a : r.actions) {
      out << (first ? " " : ", ") << std::visit(ActionPrinter{}, a.op);
      first = false;
    }
    if (r.move_to) out << (first ? " " : ", ") << "move " << *r.move_to;
    out << ";\n";
  }
  return out.str();
}

std::string print_graph(const StorageGraph& g) {
  std::ostringstream out;
  out << "graph " << (g.name().empty() ? "g" : g.name()) << " active " << to_uint(g.active()) << '\n';
  for (NodeId id : g.node_ids()) out << "node " << to_uint(id) << ' ' << g.label(id).name << '\n';
  for (const auto& [a, b] : g.edges()) {
    out << "edge " << to_uint(a) << ' ' << to_uint(b);
    if (auto l = g.edge_label(a, b)) out << ' ' << l->name;
    out << '\n';
  }
  return out.str();
}

}  // namespace kum::lang
