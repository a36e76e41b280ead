#include <sstream>

#include "symsum/cli.hpp"

namespace symsum {

std::string summaryHeader(const Summary& s) {
  std::ostringstream out;
  bool instance = !s.formals.empty() && s.formals.front().name == "this";
  if (!instance) out << "static ";
  out << s.return_type << ' ' << s.sig.recv_type << ':' << s.sig.name << '(';
  bool first = true;
  for (std::size_t i = instance ? 1 : 0; i < s.formals.size(); ++i) {
    if (!first) out << ", ";
    first = false;
    out << s.formals[i].type << ' ' << s.formals[i].name;
  }
  out << ')';
  return out.str();
}

std::string emitSummary(const Summary& s, const EmitOptions& opts) {
  Store store(summaryDecls(s.model, s.formals, s.return_type, s.sources()));
  std::ostringstream out;
  out << summaryHeader(s) << " {\n";
  out << "  // --- Guard ---\n";
  out << "  guard := " << printSym(store, store.importSym(s.guard), PrintStyle::Guard) << ";\n";
  std::vector<std::string> levels, aliasing;
  for (const auto& v : s.footprintVars()) {
    if (!opts.verbose_effects && s.isIdentity(v)) continue;
    bool isLevel = v.rfind("level_", 0) == 0 || v.rfind("objlevel_", 0) == 0;
    (isLevel ? levels : aliasing).push_back(v);
  }
  auto section = [&](const char* title, const std::vector<std::string>& vars, PrintStyle style) {
    out << "  // --- " << title << " ---\n";
    for (const auto& v : vars)
      out << "  " << v << " := " << printSym(store, store.importSym(s.effect.at(v)), style) << ";\n";
  };
  section("Updates to security levels", levels, PrintStyle::Level);
  section("Updates to aliasing specification", aliasing, PrintStyle::Bool);
  out << "}\n";
  return out.str();
}

bool hasArgumentFlow(const Summary& s) {
  auto readsOtherLevel = [&](const PortableSym& p, const std::string& self) {
    for (const auto& f : s.formals) {
      if (f.name == self) continue;
      if (p.mentions(names::level(f.name))) return true;
    }
    return false;
  };
  if (auto it = s.effect.find(names::level(names::kRet)); it != s.effect.end())
    if (readsOtherLevel(it->second, "")) return true;
  for (const auto& r : s.refFormals())
    if (auto it = s.effect.find(names::obj(r)); it != s.effect.end())
      if (readsOtherLevel(it->second, r)) return true;
  return false;
}

ReportCounts countReport(const SummaryTable& t) {
  ReportCounts c;
  for (const auto& [sig, s] : t.summaries) {
    const auto& rep = t.reports.at(sig);
    ++c.methods;
    if (rep.provenance == Provenance::Stub) {
      ++c.stubs;
      continue;
    }
    if (rep.inferences == 0) continue;  // native without stub
    if (!rep.note.empty()) {
      ++c.skipped;
    } else {
      ++c.inferred;
    }
    if (!s.guard.isTrue()) ++c.guarded;
    if (hasArgumentFlow(s)) ++c.flows;
  }
  return c;
}

std::string renderReport(const SummaryTable& t, const std::vector<std::string>& extra) {
  std::ostringstream out;
  for (const auto& [sig, s] : t.summaries) {
    const auto& rep = t.reports.at(sig);
    std::string status = rep.provenance == Provenance::Stub ? "stub"
                         : !rep.note.empty() || rep.provenance == Provenance::Pessimistic
                             ? "skipped"
                             : "inferred";
    out << sig.str() << "  " << status;
    if (status == "inferred") out << "  guard=" << (s.guard.isTrue() ? "tt" : "guarded");
    if (rep.inferences) out << "  inferences=" << rep.inferences;
    if (!rep.note.empty()) out << "  (" << rep.note << ")";
    out << '\n';
  }
  for (const auto& d : t.diagnostics) out << "warning: " << d << '\n';
  auto c = countReport(t);
  out << "methods " << c.methods << ", inferred " << c.inferred << ", stubs " << c.stubs
      << ", skipped " << c.skipped << ", #guarded " << c.guarded << ", #flows " << c.flows << '\n';
  for (const auto& e : extra) out << e << '\n';
  return out.str();
}

}  // namespace symsum
