#include <bit>
#include <set>

#include "symsum/scfg.hpp"

namespace symsum {

namespace names {
std::string retvarBit(std::size_t i) { return "retvar_" + std::to_string(i); }
std::string brlevel(std::size_t stmt) { return "brlevel_" + std::to_string(stmt); }
std::string omega(std::size_t stmt) { return "omega_" + std::to_string(stmt); }
}  // namespace names

std::vector<const Transition*> Scfg::outgoing(std::size_t loc) const {
  std::vector<const Transition*> out;
  for (const auto& t : transitions)
    if (t.from == loc) out.push_back(&t);
  return out;
}

Sym Scfg::retvarIs(std::size_t k) const {
  Store& st = *store;
  Sym out = st.tt();
  for (std::size_t i = 0; i < retvar_bits; ++i) {
    Sym bit = st.var(names::retvarBit(i));
    out = st.land(out, (k >> i) & 1 ? bit : st.lnot(bit));
  }
  return out;
}

namespace {

using ir::Operand;
using ir::Statement;
using ir::StmtKind;

class Builder {
 public:
  Builder(const ir::Method& m, const CallEnv& env, HeapModel model, std::size_t max_nodes)
      : m_(m), env_(env), max_nodes_(max_nodes) {
    g_.method = m;
    g_.model = model;
  }

  Scfg build() {
    if (!m_.hasBody()) throw SymError(m_.sig().str() + " has no body");
    for (const auto& a : m_.args())
      if (a.name == names::kRet) throw SymError(m_.sig().str() + ": parameter named 'ret'");
    g_.control = analyzeControl(m_);
    g_.exit = m_.body.size();
    collect();
    declare();
    ops_ = std::make_unique<HeapOps>(*g_.store, HeapVars{g_.model, m_.refVars()});
    contexts();
    instantiateCalls();
    for (std::size_t i = 0; i < m_.body.size(); ++i) statement(i);
    g_.transitions.push_back({g_.exit, g_.exit, st().tt(), {}});
    g_.invariants[g_.exit] = exitInvariant();
    initial();
    return std::move(g_);
  }

 private:
  Store& st() { return *g_.store; }
  Sym var(const std::string& n) { return st().var(n); }
  Sym level(const std::string& x) { return var(names::level(x)); }

  Sym levelOf(const ir::Expr& e) {
    Sym out = st().ff();
    for (const auto& v : e.vars()) out = st().lor(out, level(v));
    return out;
  }
  Sym levelOf(const std::optional<Operand>& o) {
    return o && o->isVar() ? level(o->name) : st().ff();
  }
  Sym assignLevel(const std::string& x, Sym l, std::size_t i) {
    return st().lor(st().ite(var(names::kUpsilon), level(x), l), effpc_[i]);
  }
  Sym cap(Sym l, std::size_t i) {
    return st().lor(st().ite(var(names::kUpsilon), st().ff(), l), effpc_[i]);
  }

  void collect() {
    std::set<std::string> sources;
    for (std::size_t i = 0; i < m_.body.size(); ++i) {
      const Statement& s = m_.body[i];
      if (s.kind == StmtKind::Return) g_.return_sites.push_back(i);
      if (s.kind == StmtKind::If) branches_.push_back(i);
      if (s.kind == StmtKind::Call) {
        auto t = env_(i);
        if (t.empty())
          throw SymError(m_.sig().str() + ": no summary for the call at statement " +
                         std::to_string(i));
        for (const Summary* sum : t)
          for (const auto& p : sum->sources()) sources.insert(p);
        targets_[i] = std::move(t);
      }
    }
    g_.sources.assign(sources.begin(), sources.end());
    g_.retvar_bits = std::bit_width(g_.return_sites.size());
  }

  void declare() {
    std::vector<SymVarDecl> d;
    auto add = [&](const std::string& n, Sort s, VarRole r = VarRole::State) {
      d.push_back({n, s, r});
    };
    add(names::kPc, Sort::Level);
    add(names::kUpsilon, Sort::Bool);
    for (const auto& v : m_.args()) add(names::level(v.name), Sort::Level);
    for (const auto& v : m_.locals) add(names::level(v.name), Sort::Level);
    for (const auto& v : HeapVars{g_.model, m_.refVars()}.decls(VarRole::State)) d.push_back(v);
    for (std::size_t i = 0; i < g_.retvar_bits; ++i) add(names::retvarBit(i), Sort::Bool);
    for (std::size_t b : branches_) {
      add(names::brlevel(b), Sort::Level);
      add(names::omega(b), Sort::Bool, VarRole::Input);
      g_.inputs.push_back(names::omega(b));
    }
    for (const auto& p : g_.sources) add(p, Sort::Level);

    auto formals = m_.args();
    for (const auto& f : footprintVarNames(g_.model, formals, m_.return_type)) {
      auto sn = names::snapshot(f);
      add(sn, f.rfind("share_", 0) == 0 || f.rfind("falias_", 0) == 0 ? Sort::Bool : Sort::Level,
          VarRole::Snapshot);
      g_.footprint.push_back(sn);
    }
    g_.support = supportVarNames(g_.model, formals, g_.sources);
    g_.store = std::make_unique<Store>(std::move(d), max_nodes_);
  }

  void contexts() {
    for (std::size_t i = 0; i < m_.body.size(); ++i) {
      Sym e = var(names::kPc);
      for (std::size_t b : g_.control.ctx[i]) e = st().lor(e, var(names::brlevel(b)));
      effpc_.push_back(e);
    }
  }

  std::vector<Operand> actuals(const Statement& s) const {
    std::vector<Operand> w;
    if (!s.is_static) w.push_back(Operand::var(s.receiver));
    w.insert(w.end(), s.args.begin(), s.args.end());
    return w;
  }

  void instantiateCalls() {
    for (auto& [i, targets] : targets_) {
      const Statement& s = m_.body[i];
      auto w = actuals(s);
      for (const Summary* t : targets)
        if (t->formals.size() != w.size())
          throw SymError(m_.sig().str() + ": call to " + t->sig.str() + " passes " +
                         std::to_string(w.size()) + " arguments for " +
                         std::to_string(t->formals.size()) + " formals");
      auto isRef = [&](int k) { return w[k].isVar() && m_.isRefVar(w[k].name); };
      CallBinding b;
      b.level = [&, w](int k) { return w[k].isVar() ? level(w[k].name) : st().ff(); };
      b.obj = [&, w, isRef](int k) { return isRef(k) ? ops_->obj(w[k].name) : st().ff(); };
      b.rel = [&, w, isRef](int k, int l) {
        return isRef(k) && isRef(l) ? ops_->rel(w[k].name, w[l].name) : st().ff();
      };
      b.pc = effpc_[i];
      if (!s.is_static) b.receiver_level = level(s.receiver);
      calls_[i] = combineSummaries(st(), targets, b);
      if (!s.target.empty() && ir::isVoidType(calls_[i].return_type))
        throw SymError(m_.sig().str() + ": result of void call " + s.method + " is assigned");
    }
  }

  void add(std::size_t from, std::size_t to, Sym guard, SymUpdate u = {}) {
    g_.transitions.push_back({from, to, guard, std::move(u)});
  }

  static void put(SymUpdate& into, const SymUpdate& from) {
    for (const auto& [k, v] : from) into[k] = v;
  }

  void statement(std::size_t i) {
    const Statement& s = m_.body[i];
    std::size_t next = i + 1;
    SymUpdate u;
    switch (s.kind) {
      case StmtKind::AssignPrim:
        u[names::level(s.target)] = assignLevel(s.target, levelOf(s.expr), i);
        break;
      case StmtKind::LoadPrim:
        u[names::level(s.target)] =
            assignLevel(s.target, st().lor(level(s.base), ops_->obj(s.base)), i);
        break;
      case StmtKind::LoadRef:
        u = ops_->load(s.target, s.base);
        u[names::level(s.target)] =
            assignLevel(s.target, st().lor(level(s.base), ops_->obj(s.base)), i);
        break;
      case StmtKind::StorePrim:
        u = ops_->storePrim(s.base, cap(st().lor(levelOf(s.expr), level(s.base)), i));
        break;
      case StmtKind::StoreRef: {
        Sym carried = st().lor(st().lor(level(s.source), ops_->obj(s.source)), level(s.base));
        u = ops_->storeRef(s.base, s.source, cap(carried, i));
        break;
      }
      case StmtKind::Copy:
        u = ops_->copy(s.target, s.source);
        u[names::level(s.target)] = assignLevel(s.target, level(s.source), i);
        break;
      case StmtKind::Null:
        u = ops_->nullify(s.target);
        u[names::level(s.target)] = assignLevel(s.target, st().ff(), i);
        break;
      case StmtKind::New:
        u = ops_->alloc(s.target, effpc_[i]);
        u[names::level(s.target)] = assignLevel(s.target, st().ff(), i);
        break;
      case StmtKind::Goto:
        next = m_.labelIndex(s.jump);
        break;
      case StmtKind::If:
        branch(i);
        return;
      case StmtKind::Call:
        u = callUpdate(i);
        g_.invariants[i] = calls_.at(i).guard;
        break;
      case StmtKind::Output: {
        Sym ok = st().lnot(effpc_[i]);
        if (s.value && s.value->isVar()) {
          ok = st().land(ok, st().lnot(level(s.value->name)));
          if (m_.isRefVar(s.value->name)) ok = st().land(ok, st().lnot(ops_->obj(s.value->name)));
        }
        g_.invariants[i] = ok;
        break;
      }
      case StmtKind::Return: {
        std::size_t k = 1;
        while (g_.return_sites[k - 1] != i) ++k;
        for (std::size_t b = 0; b < g_.retvar_bits; ++b)
          u[names::retvarBit(b)] = st().constant((k >> b) & 1);
        next = g_.exit;
        break;
      }
    }
    add(i, next, st().tt(), std::move(u));
  }

  // ---------------------------------------------------------------- branches

  void branch(std::size_t b) {
    const Statement& s = m_.body[b];
    std::size_t taken = m_.labelIndex(s.jump);
    std::size_t fall = b + 1;
    Sym c = levelOf(s.expr);
    Sym omega = var(names::omega(b));
    Sym high = st().land(c, st().lnot(effpc_[b]));
    Sym nominal = st().lnot(st().land(st().lnot(var(names::kUpsilon)), high));

    const auto& region = g_.control.region[b];
    bool loops = std::find(region.begin(), region.end(), b) != region.end();
    SymUpdate mark;
    mark[names::brlevel(b)] = loops ? st().lor(c, var(names::brlevel(b))) : c;

    SymUpdate upgraded = regionUpdate(b, st().lor(effpc_[b], c));
    put(upgraded, mark);

    add(b, taken, st().land(omega, nominal), mark);
    add(b, fall, st().land(st().lnot(omega), nominal), mark);
    add(b, taken, st().land(omega, st().lnot(nominal)), upgraded);
    add(b, fall, st().land(st().lnot(omega), st().lnot(nominal)), upgraded);
  }

  /// Upgrades everything the region of branch b may write by `up`.
  SymUpdate regionUpdate(std::size_t b, Sym up) {
    const auto& region = g_.control.region[b];
    std::set<std::string> assigned;
    for (std::size_t v : region)
      if (auto t = m_.body[v].assigned()) assigned.insert(*t);

    std::set<std::string> levels;
    std::vector<std::string> bases;  // references through which the region mutates objects
    for (std::size_t v : region) {
      const Statement& s = m_.body[v];
      if (auto t = s.assigned()) levels.insert(*t);
      if (s.mutatesHeap()) bases.push_back(s.base);
      if (s.kind == StmtKind::Call) {
        auto w = actuals(s);
        const auto& ic = calls_.at(v);
        for (std::size_t k = 0; k < w.size(); ++k) {
          if (!w[k].isVar() || !m_.isRefVar(w[k].name)) continue;
          SlotKey key{SlotKey::Kind::Obj, static_cast<int>(k), -1};
          if (ic.effect.count(key) && !ic.isIdentity(key)) bases.push_back(w[k].name);
        }
      }
    }

    SymUpdate u;
    for (const auto& x : levels) u[names::level(x)] = st().lor(level(x), up);
    bool stale = std::any_of(bases.begin(), bases.end(),
                             [&](const std::string& r) { return assigned.count(r) > 0; });
    for (const auto& t : m_.refVars()) {
      Sym hit = st().ff();
      for (const auto& r : bases) hit = st().lor(hit, t == r ? st().tt() : ops_->touch(t, r));
      if (stale) hit = st().tt();
      if (!hit.isFalse()) u[names::obj(t)] = st().lor(ops_->obj(t), st().land(hit, up));
    }
    return u;
  }

  // ---------------------------------------------------------------- calls

  SymUpdate callUpdate(std::size_t i) {
    const Statement& s = m_.body[i];
    const InstantiatedCall& ic = calls_.at(i);
    auto w = actuals(s);
    Store& S = st();
    const bool lprec = g_.model == HeapModel::LPrec;
    auto eff = [&](SlotKey k) -> Sym {
      if (lprec && k.kind == SlotKey::Kind::Rel && k.a > k.b) std::swap(k.a, k.b);
      auto it = ic.effect.find(k);
      if (it == ic.effect.end()) throw SymError("missing call effect");
      return it->second;
    };
    auto nonIdentity = [&](SlotKey k) {
      if (lprec && k.kind == SlotKey::Kind::Rel && k.a > k.b) std::swap(k.a, k.b);
      return ic.effect.count(k) && !ic.isIdentity(k);
    };
    // argument positions holding reference variables
    std::vector<std::pair<int, std::string>> refSlots;
    for (std::size_t k = 0; k < w.size(); ++k)
      if (w[k].isVar() && m_.isRefVar(w[k].name) &&
          ic.effect.count({SlotKey::Kind::Obj, static_cast<int>(k), -1}))
        refSlots.push_back({static_cast<int>(k), w[k].name});

    auto T = [&](const std::string& t, const std::string& a) {
      return t == a ? S.tt() : ops_->touch(t, a);
    };
    auto R = [&](const std::string& a, const std::string& u) {
      return a == u ? S.tt() : ops_->rel(a, u);
    };

    SymUpdate u;
    const auto refs = m_.refVars();
    for (const auto& t : refs) {
      Sym acc = ops_->obj(t);
      for (const auto& [k, a] : refSlots) {
        SlotKey key{SlotKey::Kind::Obj, k, -1};
        if (nonIdentity(key)) acc = S.lor(acc, S.land(T(t, a), eff(key)));
      }
      if (acc != ops_->obj(t)) u[names::obj(t)] = acc;
    }
    for (std::size_t x = 0; x < refs.size(); ++x)
      for (std::size_t y = lprec ? x : 0; y < refs.size(); ++y) {
        const auto &t = refs[x], &v = refs[y];
        Sym acc = ops_->rel(t, v);
        for (const auto& [k, a] : refSlots)
          for (const auto& [l, b] : refSlots) {
            SlotKey key{SlotKey::Kind::Rel, k, l};
            if (!nonIdentity(key)) continue;
            acc = S.lor(acc, S.land(S.land(T(t, a), eff(key)), R(b, v)));
          }
        if (acc != ops_->rel(t, v)) u[names::rel(g_.model, t, v)] = acc;
      }

    if (!s.target.empty()) {
      const std::string& x = s.target;
      u[names::level(x)] = assignLevel(x, eff({SlotKey::Kind::Level, -1, -1}), i);
      if (m_.isRefVar(x)) {
        if (!ir::isRefType(ic.return_type))
          throw SymError(m_.sig().str() + ": reference assigned from a primitive result");
        u[names::obj(x)] = eff({SlotKey::Kind::Obj, -1, -1});
        u[names::rel(g_.model, x, x)] = eff({SlotKey::Kind::Rel, -1, -1});
        for (const auto& t : refs) {
          if (t == x) continue;
          Sym out = S.ff(), in = S.ff();
          for (const auto& [k, a] : refSlots) {
            out = S.lor(out, S.land(eff({SlotKey::Kind::Rel, -1, k}), R(a, t)));
            if (!lprec) in = S.lor(in, S.land(T(t, a), eff({SlotKey::Kind::Rel, k, -1})));
          }
          u[names::rel(g_.model, x, t)] = out;
          if (!lprec) u[names::rel(g_.model, t, x)] = in;
        }
      }
    }
    return u;
  }

  // ---------------------------------------------------------------- exit

  Sym exitInvariant() {
    Store& S = st();
    Sym out = S.tt();
    bool returnsValue = !ir::isVoidType(m_.return_type);
    auto argRefs = m_.refArgs();
    for (std::size_t k = 1; k <= g_.return_sites.size(); ++k) {
      std::size_t site = g_.return_sites[k - 1];
      const auto& value = m_.body[site].value;
      Sym here = S.tt();
      if (returnsValue) {
        Sym produced = S.lor(effpc_[site], levelOf(value));
        here = S.land(here, S.implies(produced, var(names::snapshot(names::level(names::kRet)))));
      }
      if (m_.returnsRef()) {
        std::optional<std::string> r;
        if (value && value->isVar()) r = value->name;
        auto subset = argRefs;
        subset.push_back(names::kRet);
        here = S.land(here, ops_->order(subset, {{names::kRet, r}}));
      } else {
        here = S.land(here, ops_->order(argRefs));
      }
      out = S.land(out, S.implies(g_.retvarIs(k), here));
    }
    return out;
  }

  void initial() {
    Store& S = st();
    auto& c = g_.init_constants;
    c.push_back({names::kUpsilon, false});
    std::set<std::string> localRefs;
    for (const auto& v : m_.locals) {
      c.push_back({names::level(v.name), false});
      if (ir::isRefType(v.type)) localRefs.insert(v.name);
    }
    const auto refs = m_.refVars();
    for (const auto& r : localRefs) c.push_back({names::obj(r), false});
    std::set<std::string> rels;
    for (const auto& r : localRefs)
      for (const auto& t : refs) {
        rels.insert(names::rel(g_.model, r, t));
        rels.insert(names::rel(g_.model, t, r));
      }
    for (const auto& r : rels) c.push_back({r, false});
    for (std::size_t i = 0; i < g_.retvar_bits; ++i) c.push_back({names::retvarBit(i), false});
    for (std::size_t b : branches_) c.push_back({names::brlevel(b), false});

    Sym init = S.tt();
    for (const auto& [n, v] : c) init = S.land(init, v ? var(n) : S.lnot(var(n)));
    for (const auto& sn : g_.footprint) {
      auto live = names::plain(sn);
      if (S.has(live)) init = S.land(init, S.iff(var(sn), var(live)));
    }
    g_.init = init;
  }

  const ir::Method& m_;
  const CallEnv& env_;
  std::size_t max_nodes_;
  Scfg g_;
  std::unique_ptr<HeapOps> ops_;
  std::vector<std::size_t> branches_;
  std::vector<Sym> effpc_;
  std::map<std::size_t, std::vector<const Summary*>> targets_;
  std::map<std::size_t, InstantiatedCall> calls_;
};

}  // namespace

Scfg buildScfg(const ir::Method& m, const CallEnv& env, HeapModel model, std::size_t max_nodes) {
  return Builder(m, env, model, max_nodes).build();
}

void checkWellFormed(const Scfg& g) {
  Store& st = *g.store;
  for (std::size_t loc = 0; loc < g.locations(); ++loc) {
    auto out = g.outgoing(loc);
    if (out.empty()) throw SymError("location " + std::to_string(loc) + " has no transition");
    Sym any = st.ff();
    for (std::size_t a = 0; a < out.size(); ++a) {
      for (std::size_t b = a + 1; b < out.size(); ++b)
        if (!st.land(out[a]->guard, out[b]->guard).isFalse())
          throw SymError("overlapping guards at location " + std::to_string(loc));
      any = st.lor(any, out[a]->guard);
      for (const auto& [k, v] : out[a]->update) {
        if (names::isSnapshot(k) || names::isSource(k) || !st.has(k) ||
            st.decl(k).role != VarRole::State)
          throw SymError("transition from " + std::to_string(loc) + " writes " + k);
      }
    }
    if (!any.isTrue()) throw SymError("guards at location " + std::to_string(loc) + " are not exhaustive");
  }
}

}  // namespace symsum
