#include <algorithm>
#include <deque>
#include <functional>

#include "symsum/interproc.hpp"

namespace symsum {

using ir::MethodSig;

namespace {

std::string actualType(const ir::Method& caller, const ir::Operand& o) {
  switch (o.kind) {
    case ir::Operand::Kind::Var: return caller.typeOf(o.name);
    case ir::Operand::Kind::Int: return "int";
    case ir::Operand::Kind::Null: return "";
  }
  return "";
}

bool compatible(const ir::TypeHierarchy& h, const std::string& actual, const std::string& formal) {
  if (actual.empty()) return ir::isRefType(formal);
  if (!h.has(actual) || !h.has(formal)) return actual == formal;
  return h.subtype(actual, formal);
}

}  // namespace

std::vector<MethodSig> resolveTargets(const ir::Program& p, const ir::Method& caller,
                                      const ir::Statement& call,
                                      const std::set<MethodSig>& external) {
  const auto& h = p.hierarchy;
  std::vector<std::string> types;
  for (const auto& a : call.args) types.push_back(actualType(caller, a));
  auto fits = [&](const std::vector<std::string>& formals) {
    if (formals.size() != types.size()) return false;
    for (std::size_t i = 0; i < types.size(); ++i)
      if (!compatible(h, types[i], formals[i])) return false;
    return true;
  };
  // nearest declaration on the superclass chain starting at `cls`
  auto lookup = [&](std::string cls) -> std::optional<MethodSig> {
    std::set<std::string> seen;
    while (!cls.empty() && seen.insert(cls).second) {
      std::vector<MethodSig> here;
      for (const auto& sig : external)
        if (sig.recv_type == cls && sig.name == call.method && fits(sig.arg_types)) here.push_back(sig);
      for (const ir::Method* m : p.declared(cls, call.method, types.size()))
        if (m->is_static == call.is_static && fits(m->sig().arg_types)) here.push_back(m->sig());
      if (!here.empty()) return *std::min_element(here.begin(), here.end());
      if (!h.has(cls) || ir::isPrimitiveType(cls) || ir::isArrayType(cls)) break;
      cls = h.node(cls).superclass;
    }
    return std::nullopt;
  };

  std::set<MethodSig> out;
  if (call.is_static) {
    if (auto s = lookup(call.class_name)) out.insert(*s);
  } else {
    std::string recv = caller.typeOf(call.receiver);
    std::vector<std::string> classes;
    if (h.has(recv) && !ir::isArrayType(recv)) classes = h.concreteSubtypes(recv);
    for (const auto& c : classes)
      if (auto s = lookup(c)) out.insert(*s);
    if (out.empty())
      if (auto s = lookup(recv)) out.insert(*s);
  }
  return {out.begin(), out.end()};
}

MethodShape unresolvedShape(const ir::Method& caller, const ir::Statement& call) {
  MethodShape shape;
  shape.sig.name = call.method;
  if (call.is_static) {
    shape.sig.recv_type = call.class_name;
  } else {
    shape.sig.recv_type = caller.typeOf(call.receiver);
    shape.formals.push_back({shape.sig.recv_type, "this"});
  }
  for (std::size_t i = 0; i < call.args.size(); ++i) {
    std::string t = actualType(caller, call.args[i]);
    if (t.empty()) t = "Object";
    shape.sig.arg_types.push_back(t);
    shape.formals.push_back({t, "a" + std::to_string(i)});
  }
  shape.return_type = call.target.empty() ? "void" : caller.typeOf(call.target);
  return shape;
}

std::set<MethodSig> CallGraph::callees(const MethodSig& m) const {
  std::set<MethodSig> out;
  auto it = sites.find(m);
  if (it == sites.end()) return out;
  for (const auto& [i, targets] : it->second) out.insert(targets.begin(), targets.end());
  return out;
}

std::vector<std::vector<MethodSig>> CallGraph::components() const {
  // Tarjan; components come out callees first.
  std::map<MethodSig, int> index, low;
  std::set<MethodSig> onStack;
  std::vector<MethodSig> stack;
  std::vector<std::vector<MethodSig>> out;
  int counter = 0;
  std::function<void(const MethodSig&)> visit = [&](const MethodSig& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    onStack.insert(v);
    for (const auto& w : callees(v)) {
      if (!analyzed.count(w)) continue;
      if (!index.count(w)) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (onStack.count(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<MethodSig> comp;
      MethodSig w;
      do {
        w = stack.back();
        stack.pop_back();
        onStack.erase(w);
        comp.push_back(w);
      } while (!(w == v));
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (const auto& m : analyzed)
    if (!index.count(m)) visit(m);
  return out;
}

CallGraph buildCallGraph(const ir::Program& p, const std::set<MethodSig>& external) {
  CallGraph g;
  for (const ir::Method* m : p.methods())
    if (m->hasBody() && !external.count(m->sig())) g.analyzed.insert(m->sig());
  for (const ir::Method* m : p.methods()) {
    if (!g.analyzed.count(m->sig())) continue;
    auto& sites = g.sites[m->sig()];
    for (std::size_t i = 0; i < m->body.size(); ++i)
      if (m->body[i].kind == ir::StmtKind::Call)
        sites[i] = resolveTargets(p, *m, m->body[i], external);
  }
  return g;
}

const Summary* SummaryTable::find(const MethodSig& sig) const {
  auto it = summaries.find(sig);
  return it == summaries.end() ? nullptr : &it->second;
}

std::vector<const Summary*> callTargets(const SummaryTable& t, const MethodSig& caller,
                                        std::size_t stmt) {
  const auto& targets = t.sites.at(caller).at(stmt);
  if (targets.empty()) return {&t.unresolved.at({caller, stmt})};
  std::vector<const Summary*> out;
  for (const auto& s : targets) out.push_back(&t.summaries.at(s));
  return out;
}

bool guardEntails(const Summary& a, const Summary& b) {
  auto sa = a.sources(), sb = b.sources();
  std::set<std::string> src(sa.begin(), sa.end());
  src.insert(sb.begin(), sb.end());
  Store st(summaryDecls(a.model, a.formals, a.return_type, {src.begin(), src.end()}));
  return st.entails(st.importSym(a.guard), st.importSym(b.guard));
}

SummaryTable solveProgram(const ir::Program& p, const std::map<MethodSig, Summary>& stubs,
                          const SolveOptions& opts) {
  SummaryTable table;
  std::set<MethodSig> external;
  for (const auto& [sig, s] : stubs) {
    external.insert(sig);
    table.summaries[sig] = s;
    table.reports[sig].provenance = s.provenance;
  }
  std::map<MethodSig, ir::Method> bodies;
  for (const ir::Method* m : p.methods()) {
    if (external.count(m->sig())) continue;
    if (!m->hasBody()) {
      table.summaries[m->sig()] = pessimisticSummary(MethodShape::of(*m), opts.model);
      table.reports[m->sig()] = {Provenance::Pessimistic, "native method without a stub", 0, {}, {}};
      continue;
    }
    bodies.emplace(m->sig(), ir::normalizeMethod(*m));
  }

  ir::Program normalized = p;
  ir::normalizeProgram(normalized);
  CallGraph cg = buildCallGraph(normalized, external);
  for (const auto& [caller, sites] : cg.sites)
    for (const auto& [i, targets] : sites)
      if (targets.empty()) {
        const ir::Method& m = bodies.at(caller);
        auto shape = unresolvedShape(m, m.body[i]);
        table.unresolved.emplace(std::make_pair(caller, i), pessimisticSummary(shape, opts.model));
        table.diagnostics.push_back(caller.str() + ": call to " + shape.sig.str() +
                                    " has no target; assuming a pessimistic summary");
      }

  table.sites = cg.sites;
  auto envFor = [&](const MethodSig& sig) -> CallEnv {
    return [&, sig](std::size_t i) { return callTargets(table, sig, i); };
  };

  for (const auto& comp : cg.components()) {
    std::set<MethodSig> members(comp.begin(), comp.end());
    std::map<MethodSig, std::vector<MethodSig>> callers;  // within the component
    for (const auto& m : comp)
      for (const auto& c : cg.callees(m))
        if (members.count(c)) callers[c].push_back(m);
    for (const auto& m : comp) {
      table.summaries[m] = bottomSummary(MethodShape::of(bodies.at(m)), opts.model);
      table.reports[m] = {Provenance::Bottom, "", 0, {}, {}};
    }
    std::deque<MethodSig> work(comp.begin(), comp.end());
    std::set<MethodSig> queued(comp.begin(), comp.end());
    std::set<MethodSig> skipped;
    while (!work.empty()) {
      MethodSig m = work.front();
      work.pop_front();
      queued.erase(m);
      if (skipped.count(m)) continue;
      MethodReport& rep = table.reports[m];
      if (++rep.inferences > opts.max_iters) {
        std::string names;
        for (const auto& c : comp) names += (names.empty() ? "" : ", ") + c.str();
        throw NonTermination("summaries did not stabilize within " +
                                 std::to_string(opts.max_iters) + " iterations: " + names,
                             comp);
      }
      Summary fresh;
      try {
        fresh = inferSummary(bodies.at(m), envFor(m), opts.model, opts.max_nodes, &rep.stats);
      } catch (const NodeLimitExceeded& e) {
        fresh = pessimisticSummary(MethodShape::of(bodies.at(m)), opts.model);
        rep.note = e.what();
        skipped.insert(m);
      } catch (const IrreducibleCfg& e) {
        fresh = pessimisticSummary(MethodShape::of(bodies.at(m)), opts.model);
        rep.note = e.what();
        skipped.insert(m);
      }
      Summary& current = table.summaries[m];
      bool changed = !fresh.sameAs(current);
      if (!skipped.count(m)) {
        if (!guardEntails(fresh, current))
          throw MonotonicityViolation(m.str() + ": guard weakened between iterations");
        rep.history.push_back(fresh.guard);
      }
      rep.provenance = fresh.provenance;
      current = std::move(fresh);
      if (changed)
        for (const auto& c : callers[m])
          if (queued.insert(c).second) work.push_back(c);
    }
  }
  return table;
}

}  // namespace symsum
