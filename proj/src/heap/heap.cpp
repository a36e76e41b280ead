#include <algorithm>
#include <cctype>
#include <set>

#include "symsum/heap.hpp"

namespace symsum {

HeapModel parseHeapModel(const std::string& text) {
  if (text == "lprec" || text == "LPrec") return HeapModel::LPrec;
  if (text == "hprec" || text == "HPrec") return HeapModel::HPrec;
  throw SymError("unknown heap model '" + text + "' (expected lprec or hprec)");
}

const char* toString(HeapModel m) { return m == HeapModel::LPrec ? "lprec" : "hprec"; }

namespace names {

std::string level(const std::string& x) { return "level_" + x; }
std::string obj(const std::string& r) { return "objlevel_" + r; }

std::string rel(HeapModel m, const std::string& r, const std::string& s) {
  if (m == HeapModel::LPrec) return r <= s ? "share_" + r + "_" + s : "share_" + s + "_" + r;
  return "falias_" + r + "_" + s;
}

std::string snapshot(const std::string& var) { return var + "^r"; }

bool isSnapshot(const std::string& var) {
  return var.size() > 2 && var.compare(var.size() - 2, 2, "^r") == 0;
}

std::string plain(const std::string& var) {
  return isSnapshot(var) ? var.substr(0, var.size() - 2) : var;
}

bool isSource(const std::string& var) {
  return var.size() > 1 && var[0] == 'p' &&
         std::all_of(var.begin() + 1, var.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace names

// ---------------------------------------------------------------- HeapVars

std::vector<std::string> HeapVars::objVars() const {
  std::vector<std::string> out;
  for (const auto& r : refs) out.push_back(names::obj(r));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> HeapVars::relVarsAmong(const std::vector<std::string>& subset) const {
  std::set<std::string> out;
  for (const auto& r : subset)
    for (const auto& s : subset) out.insert(names::rel(model, r, s));
  return {out.begin(), out.end()};
}

std::vector<std::string> HeapVars::relVars() const { return relVarsAmong(refs); }

std::vector<std::string> HeapVars::all() const {
  std::vector<std::string> out = objVars();
  auto rels = relVars();
  out.insert(out.end(), rels.begin(), rels.end());
  return out;
}

std::vector<SymVarDecl> HeapVars::decls(VarRole role) const {
  std::vector<SymVarDecl> out;
  auto name = [&](const std::string& n) {
    return role == VarRole::Snapshot ? names::snapshot(n) : n;
  };
  for (const auto& v : objVars()) out.push_back({name(v), Sort::Level, role});
  for (const auto& v : relVars()) out.push_back({name(v), Sort::Bool, role});
  return out;
}

// ---------------------------------------------------------------- HeapOps

HeapOps::HeapOps(Store& store, HeapVars vars) : store_(store), vars_(std::move(vars)) {
  for (const auto& v : vars_.all())
    if (!store_.has(v)) throw SymError("heap variable " + v + " is not declared");
}

bool HeapOps::has(const std::string& r) const {
  return std::find(vars_.refs.begin(), vars_.refs.end(), r) != vars_.refs.end();
}

Sym HeapOps::obj(const std::string& r) const { return store_.var(names::obj(r)); }

Sym HeapOps::rel(const std::string& r, const std::string& s) const {
  return store_.var(names::rel(vars_.model, r, s));
}

Sym HeapOps::sees(const std::string& t, const std::string& r) const { return rel(t, r); }

Sym HeapOps::touch(const std::string& t, const std::string& a) const {
  if (vars_.model == HeapModel::LPrec) return rel(t, a);
  Store& s = store_;
  return s.lor(s.lor(rel(t, a), rel(a, t)), s.land(nonNull(t), nonNull(a)));
}

SymUpdate HeapOps::copy(const std::string& r, const std::string& s) const {
  SymUpdate u;
  if (r == s) return u;
  u[names::obj(r)] = obj(s);
  for (const auto& t : vars_.refs) {
    if (t == r) continue;
    u[names::rel(model(), r, t)] = rel(s, t);
    if (model() == HeapModel::HPrec) u[names::rel(model(), t, r)] = rel(t, s);
  }
  u[names::rel(model(), r, r)] = rel(s, s);
  return u;
}

SymUpdate HeapOps::nullify(const std::string& r) const {
  SymUpdate u;
  u[names::obj(r)] = store_.ff();
  for (const auto& t : vars_.refs) {
    u[names::rel(model(), r, t)] = store_.ff();
    u[names::rel(model(), t, r)] = store_.ff();
  }
  return u;
}

SymUpdate HeapOps::alloc(const std::string& r, Sym object_level) const {
  SymUpdate u = nullify(r);
  u[names::obj(r)] = object_level;
  u[names::rel(model(), r, r)] = store_.tt();
  return u;
}

SymUpdate HeapOps::load(const std::string& r, const std::string& s) const {
  Store& st = store_;
  SymUpdate u;
  u[names::obj(r)] = obj(s);
  if (model() == HeapModel::LPrec) {
    for (const auto& t : vars_.refs)
      if (t != r) u[names::rel(model(), r, t)] = rel(s, t);
    u[names::rel(model(), r, r)] = rel(s, s);
    return u;
  }
  // r's object is reachable from s; what r reaches is reachable from s.
  for (const auto& t : vars_.refs) {
    if (t == r) continue;
    u[names::rel(model(), r, t)] = rel(s, t);
    Sym via = t == s ? nonNull(s) : st.lor(rel(t, s), st.land(nonNull(t), nonNull(s)));
    u[names::rel(model(), t, r)] = via;
  }
  u[names::rel(model(), r, r)] = nonNull(s);
  return u;
}

SymUpdate HeapOps::storePrim(const std::string& r, Sym cap) const {
  Store& st = store_;
  SymUpdate u;
  for (const auto& t : vars_.refs) {
    Sym hit = t == r ? st.tt() : sees(t, r);
    u[names::obj(t)] = st.lor(obj(t), st.land(hit, cap));
  }
  return u;
}

SymUpdate HeapOps::storeRef(const std::string& r, const std::string& s, Sym cap) const {
  Store& st = store_;
  SymUpdate u = storePrim(r, cap);
  const auto& R = vars_.refs;
  if (model() == HeapModel::LPrec) {
    for (std::size_t i = 0; i < R.size(); ++i)
      for (std::size_t j = i; j < R.size(); ++j) {
        const auto &t = R[i], &v = R[j];
        Sym n = rel(t, v);
        n = st.lor(n, st.land(rel(t, r), rel(s, v)));
        n = st.lor(n, st.land(rel(v, r), rel(t, s)));
        n = st.lor(n, st.land(st.land(rel(t, r), rel(v, r)), rel(s, s)));
        u[names::rel(model(), t, v)] = n;
      }
    return u;
  }
  for (const auto& t : R)
    for (const auto& v : R) {
      Sym hit = t == r ? nonNull(r) : rel(t, r);
      u[names::rel(model(), t, v)] = st.lor(rel(t, v), st.land(hit, rel(s, v)));
    }
  return u;
}

Bindings HeapOps::extendWithReturn(const std::string& ret, const std::optional<std::string>& r) const {
  Bindings b;
  b[names::obj(ret)] = r ? obj(*r) : store_.ff();
  for (const auto& t : vars_.refs) {
    if (t == ret) continue;
    b[names::rel(model(), ret, t)] = relOrConst(r, t);
    if (model() == HeapModel::HPrec) b[names::rel(model(), t, ret)] = relOrConst(t, r);
  }
  b[names::rel(model(), ret, ret)] = relOrConst(r, r);
  return b;
}

Sym HeapOps::relOrConst(const std::optional<std::string>& a,
                        const std::optional<std::string>& b) const {
  if (!a || !b) return store_.ff();
  return rel(*a, *b);
}

Sym HeapOps::order(const std::vector<std::string>& subset,
                   const std::map<std::string, std::optional<std::string>>& alias) const {
  Store& st = store_;
  auto live = [&](const std::string& n) -> std::optional<std::string> {
    auto it = alias.find(n);
    return it == alias.end() ? std::optional<std::string>(n) : it->second;
  };
  auto snap = [&](const std::string& var) { return st.var(names::snapshot(var)); };
  Sym out = st.tt();
  for (const auto& r : subset) {
    auto lr = live(r);
    Sym level = lr ? obj(*lr) : st.ff();
    out = st.land(out, st.implies(level, snap(names::obj(r))));
  }
  for (const auto& r : subset)
    for (const auto& s : subset) {
      if (model() == HeapModel::LPrec && s < r) continue;
      Sym fact = relOrConst(live(r), live(s));
      Sym bound = snap(names::rel(model(), r, s));
      if (model() == HeapModel::LPrec) {
        bound = st.land(bound, st.land(snap(names::rel(model(), r, r)),
                                       snap(names::rel(model(), s, s))));
      } else {
        bound = st.land(bound, snap(names::rel(model(), r, r)));
      }
      out = st.land(out, st.implies(fact, bound));
    }
  return out;
}

}  // namespace symsum
