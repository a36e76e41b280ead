#include <algorithm>
#include <set>

#include "symsum/summary.hpp"

namespace symsum {

const char* toString(Provenance p) {
  switch (p) {
    case Provenance::Inferred: return "inferred";
    case Provenance::Stub: return "stub";
    case Provenance::Pessimistic: return "pessimistic";
    case Provenance::Bottom: return "bottom";
  }
  return "?";
}

namespace {

std::vector<std::string> refNames(const std::vector<ir::VarDecl>& formals) {
  std::vector<std::string> out;
  for (const auto& f : formals)
    if (ir::isRefType(f.type)) out.push_back(f.name);
  return out;
}

void checkFormals(const std::vector<ir::VarDecl>& formals) {
  for (const auto& f : formals)
    if (f.name == names::kRet) throw SymError("formal parameter may not be named 'ret'");
}

Sort sortOf(const std::string& name) {
  return name.rfind("share_", 0) == 0 || name.rfind("falias_", 0) == 0 ? Sort::Bool : Sort::Level;
}

}  // namespace

std::vector<std::string> supportVarNames(HeapModel model, const std::vector<ir::VarDecl>& formals,
                                         const std::vector<std::string>& sources) {
  checkFormals(formals);
  std::vector<std::string> out{names::kPc};
  for (const auto& f : formals) out.push_back(names::level(f.name));
  HeapVars hv{model, refNames(formals)};
  for (const auto& v : hv.all()) out.push_back(v);
  out.insert(out.end(), sources.begin(), sources.end());
  return out;
}

std::vector<std::string> footprintVarNames(HeapModel model,
                                           const std::vector<ir::VarDecl>& formals,
                                           const std::string& return_type) {
  checkFormals(formals);
  std::vector<std::string> out;
  if (!ir::isVoidType(return_type)) out.push_back(names::level(names::kRet));
  auto refs = refNames(formals);
  if (ir::isRefType(return_type)) refs.push_back(names::kRet);
  HeapVars hv{model, refs};
  for (const auto& v : hv.all()) out.push_back(v);
  return out;
}

std::vector<SymVarDecl> summaryDecls(HeapModel model, const std::vector<ir::VarDecl>& formals,
                                     const std::string& /*return_type*/,
                                     const std::vector<std::string>& sources) {
  std::vector<SymVarDecl> out;
  for (const auto& n : supportVarNames(model, formals, sources))
    out.push_back({n, sortOf(n), VarRole::State});
  return out;
}

std::vector<std::string> Summary::formalNames() const {
  std::vector<std::string> out;
  for (const auto& f : formals) out.push_back(f.name);
  return out;
}

std::vector<std::string> Summary::refFormals() const { return refNames(formals); }

std::vector<std::string> Summary::sources() const {
  std::set<std::string> out;
  auto scan = [&](const PortableSym& p) {
    for (const auto& n : p.names)
      if (names::isSource(n)) out.insert(n);
  };
  scan(guard);
  for (const auto& [k, v] : effect) scan(v);
  return {out.begin(), out.end()};
}

std::vector<std::string> Summary::supportVars() const {
  return supportVarNames(model, formals, sources());
}

std::vector<std::string> Summary::footprintVars() const {
  return footprintVarNames(model, formals, return_type);
}

bool Summary::isIdentity(const std::string& var) const {
  auto it = effect.find(var);
  if (it == effect.end()) return false;
  const PortableSym& p = it->second;
  return p.nodes.size() == 1 && p.names[p.nodes[0].var] == var && p.nodes[0].lo == 0 &&
         p.nodes[0].hi == 1 && p.root == 2;
}

bool Summary::sameAs(const Summary& other) const {
  return guard == other.guard && effect == other.effect;
}

MethodShape MethodShape::of(const ir::Method& m) {
  return {m.sig(), m.args(), m.return_type};
}

namespace {

/// Builds a summary over a scratch store. `effect_of` returns nullopt to
/// keep a footprint variable unchanged.
Summary buildSummary(const MethodShape& shape, HeapModel model,
                     const std::vector<std::string>& sources,
                     const std::function<Sym(Store&)>& guard_of,
                     const std::function<std::optional<Sym>(Store&, const std::string&)>& effect_of) {
  Store st(summaryDecls(model, shape.formals, shape.return_type, sources));
  Summary s;
  s.sig = shape.sig;
  s.model = model;
  s.formals = shape.formals;
  s.return_type = shape.return_type;
  s.guard = st.exportSym(guard_of(st));
  for (const auto& v : footprintVarNames(model, shape.formals, shape.return_type)) {
    auto e = effect_of(st, v);
    s.effect[v] = st.exportSym(e ? *e : st.var(v));
  }
  return s;
}

/// Footprint variables describing the returned value.
std::set<std::string> returnVars(const MethodShape& shape, HeapModel model) {
  auto all = footprintVarNames(model, shape.formals, shape.return_type);
  auto own = footprintVarNames(model, shape.formals, "void");
  std::set<std::string> out(all.begin(), all.end());
  for (const auto& v : own) out.erase(v);
  return out;
}

/// A freshly returned object: possibly non-null, related to nothing else.
std::optional<Sym> freshReturn(Store& st, HeapModel model, const std::string& v) {
  if (v == names::rel(model, names::kRet, names::kRet)) return st.tt();
  return st.ff();
}

Sym lowInputs(Store& st, const MethodShape& shape) {
  Sym high = st.var(names::kPc);
  for (const auto& f : shape.formals) {
    high = st.lor(high, st.var(names::level(f.name)));
    if (ir::isRefType(f.type)) high = st.lor(high, st.var(names::obj(f.name)));
  }
  return st.lnot(high);
}

}  // namespace

Summary bottomSummary(const MethodShape& shape, HeapModel model) {
  Summary s = buildSummary(
      shape, model, {}, [](Store& st) { return st.tt(); },
      [&, ret = returnVars(shape, model)](Store& st, const std::string& v) -> std::optional<Sym> {
        if (ret.count(v)) return freshReturn(st, model, v);
        return std::nullopt;
      });
  s.provenance = Provenance::Bottom;
  return s;
}

Summary pessimisticSummary(const MethodShape& shape, HeapModel model) {
  Summary s = buildSummary(
      shape, model, {}, [&](Store& st) { return lowInputs(st, shape); },
      [&, ret = returnVars(shape, model)](Store& st, const std::string& v) -> std::optional<Sym> {
        if (ret.count(v)) return freshReturn(st, model, v);
        return std::nullopt;
      });
  s.provenance = Provenance::Pessimistic;
  s.stub = Summary::StubKind::Opaque;
  return s;
}

Summary sinkSummary(const MethodShape& shape, HeapModel model) {
  Summary s = pessimisticSummary(shape, model);
  s.provenance = Provenance::Stub;
  s.stub = Summary::StubKind::Sink;
  return s;
}

Summary sourceSummary(const MethodShape& shape, HeapModel model, const std::string& symbol) {
  if (!names::isSource(symbol)) throw SymError("bad source symbol '" + symbol + "'");
  std::set<std::string> tainted;
  for (const auto& f : shape.formals)
    if (ir::isRefType(f.type) && f.name != "this") tainted.insert(names::obj(f.name));
  Summary s = buildSummary(
      shape, model, {symbol}, [](Store& st) { return st.tt(); },
      [&, ret = returnVars(shape, model)](Store& st, const std::string& v) -> std::optional<Sym> {
        Sym taint = st.lor(st.var(names::kPc), st.var(symbol));
        if (v == names::level(names::kRet) || v == names::obj(names::kRet)) return taint;
        if (ret.count(v)) return freshReturn(st, model, v);
        if (tainted.count(v)) return st.lor(st.var(v), taint);
        return std::nullopt;
      });
  s.provenance = Provenance::Stub;
  s.stub = Summary::StubKind::Source;
  s.source_symbol = symbol;
  return s;
}

bool InstantiatedCall::isIdentity(const SlotKey& k) const {
  auto it = identity.find(k);
  return it != identity.end() && it->second;
}

namespace {

/// Footprint variable name → slot key for one summary.
std::map<std::string, SlotKey> slotKeys(const Summary& s) {
  std::map<std::string, SlotKey> out;
  if (s.returnsValue()) out[names::level(names::kRet)] = {SlotKey::Kind::Level, -1, -1};
  std::vector<std::pair<std::string, int>> refs;
  for (std::size_t i = 0; i < s.formals.size(); ++i)
    if (ir::isRefType(s.formals[i].type)) refs.push_back({s.formals[i].name, static_cast<int>(i)});
  if (s.returnsRef()) refs.push_back({names::kRet, -1});
  for (const auto& [n, i] : refs) {
    out[names::obj(n)] = {SlotKey::Kind::Obj, i, -1};
    for (const auto& [m, j] : refs) {
      SlotKey k{SlotKey::Kind::Rel, i, j};
      if (s.model == HeapModel::LPrec && k.a > k.b) std::swap(k.a, k.b);
      out[names::rel(s.model, n, m)] = k;
    }
  }
  return out;
}

}  // namespace

InstantiatedCall combineSummaries(Store& store, const std::vector<const Summary*>& targets,
                                  const CallBinding& binding) {
  if (targets.empty()) throw SymError("call has no dispatch target");
  const Summary& first = *targets.front();
  for (const Summary* t : targets) {
    if (t->formals.size() != first.formals.size())
      throw SymError("dispatch targets of " + first.sig.str() + " differ in arity");
    if (t->returnsValue() != first.returnsValue() || t->returnsRef() != first.returnsRef())
      throw SymError("dispatch targets of " + first.sig.str() + " differ in return kind");
    if (t->model != first.model) throw SymError("summaries from different heap models");
  }
  Sym pc = binding.pc;
  if (targets.size() > 1 && binding.receiver_level) pc = store.lor(pc, *binding.receiver_level);

  InstantiatedCall out;
  out.return_type = first.return_type;
  out.guard = store.tt();
  for (const Summary* t : targets) {
    std::map<std::string, Sym> sigma;
    sigma[names::kPc] = pc;
    std::vector<std::pair<std::string, int>> refs;
    for (std::size_t i = 0; i < t->formals.size(); ++i) {
      const auto& f = t->formals[i];
      int idx = static_cast<int>(i);
      sigma[names::level(f.name)] = binding.level(idx);
      if (ir::isRefType(f.type)) {
        sigma[names::obj(f.name)] = binding.obj(idx);
        refs.push_back({f.name, idx});
      }
    }
    for (const auto& [n, i] : refs)
      for (const auto& [m, j] : refs) sigma[names::rel(t->model, n, m)] = binding.rel(i, j);
    auto rename = [&](const std::string& name) -> Sym {
      if (auto it = sigma.find(name); it != sigma.end()) return it->second;
      if (names::isSource(name)) return store.var(name);
      throw SymError("summary of " + t->sig.str() + " mentions unknown variable " + name);
    };
    out.guard = store.land(out.guard, store.importSym(t->guard, rename));
    for (const auto& [name, key] : slotKeys(*t)) {
      auto it = t->effect.find(name);
      if (it == t->effect.end())
        throw SymError("summary of " + t->sig.str() + " lacks an effect for " + name);
      Sym e = store.importSym(it->second, rename);
      bool id = t->isIdentity(name);
      auto [pos, fresh] = out.effect.emplace(key, e);
      if (fresh) {
        out.identity[key] = id;
      } else {
        pos->second = store.lor(pos->second, e);
        out.identity[key] = out.identity[key] && id;
      }
    }
  }
  return out;
}

}  // namespace symsum
