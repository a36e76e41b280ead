#include <sstream>

#include "symsum/scfg.hpp"

namespace symsum {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string statementText(const ir::Method& m, std::size_t i) {
  std::string s = ir::printStatement(m.body[i]);
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  auto first = s.find_first_not_of(' ');
  return first == std::string::npos ? s : s.substr(first);
}

}  // namespace

std::string dumpScfg(const Scfg& g) {
  Store& st = *g.store;
  std::ostringstream out;
  out << "digraph \"" << escape(g.method.sig().str()) << "\" {\n";
  out << "  // heap model " << toString(g.model) << ", " << st.varCount() << " variables\n";
  out << "  // init:";
  for (const auto& [n, v] : g.init_constants) out << ' ' << n << '=' << (v ? "tt" : "ff");
  out << '\n';
  for (std::size_t l = 0; l < g.locations(); ++l) {
    std::string label = l == g.exit ? "exit" : std::to_string(l) + ": " + statementText(g.method, l);
    out << "  l" << l << " [label=\"" << escape(label) << "\"";
    if (auto it = g.invariants.find(l); it != g.invariants.end())
      out << ", xlabel=\"" << escape(printSym(st, it->second, PrintStyle::Guard)) << "\"";
    out << "];\n";
  }
  for (const auto& t : g.transitions) {
    std::string label = escape(printSym(st, t.guard, PrintStyle::Guard));
    for (const auto& [k, v] : t.update) {
      auto style = st.decl(k).sort == Sort::Level ? PrintStyle::Level : PrintStyle::Bool;
      label += "\\n" + escape(k + " := " + printSym(st, v, style));
    }
    out << "  l" << t.from << " -> l" << t.to << " [label=\"" << label << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace symsum
