#include "symsum/ir.hpp"

namespace symsum::ir {

namespace {

void renameExpr(Expr& e, const std::string& from, const std::string& to) {
  if (e.kind == Expr::Kind::Var && e.name == from) e.name = to;
  for (auto& a : e.args) renameExpr(a, from, to);
}

void renameStatement(Statement& s, const std::string& from, const std::string& to) {
  for (std::string* f : {&s.target, &s.base, &s.source, &s.receiver})
    if (*f == from) *f = to;
  renameExpr(s.expr, from, to);
  for (auto& a : s.args)
    if (a.isVar() && a.name == from) a.name = to;
  if (s.value && s.value->isVar() && s.value->name == from) s.value->name = to;
}

}  // namespace

Method normalizeMethod(const Method& m) {
  if (!m.hasBody()) return m;
  std::set<std::string> assigned;
  for (const auto& s : m.body)
    if (auto t = s.assigned(); t && m.isArg(*t) && m.isRefVar(*t)) assigned.insert(*t);
  if (assigned.empty()) return m;

  Method out = m;
  std::vector<Statement> prologue;
  for (const auto& formal : out.refArgs()) {
    if (!assigned.count(formal)) continue;
    std::string fresh = formal + "_local";
    for (int k = 1; out.lookup(fresh); ++k) fresh = formal + "_local" + std::to_string(k);
    out.locals.push_back({out.typeOf(formal), fresh});
    for (auto& s : out.body) renameStatement(s, formal, fresh);
    Statement copy;
    copy.kind = StmtKind::Copy;
    copy.target = fresh;
    copy.source = formal;
    prologue.push_back(copy);
  }
  out.body.insert(out.body.begin(), prologue.begin(), prologue.end());
  return out;
}

void normalizeProgram(Program& p) {
  for (auto& c : p.classes)
    for (auto& m : c.methods) m = normalizeMethod(m);
}

}  // namespace symsum::ir
