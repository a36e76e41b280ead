#include <deque>
#include <set>
#include <stdexcept>

#include "symsum/infer.hpp"

namespace symsum {

BadStates initialBadStates(const Scfg& g) {
  Store& st = *g.store;
  BadStates b(g.locations(), st.ff());
  for (const auto& [loc, phi] : g.invariants) b[loc] = st.lnot(phi);
  return b;
}

namespace {

std::vector<std::uint32_t> inputIndices(const Scfg& g) {
  std::vector<std::uint32_t> out;
  for (const auto& i : g.inputs) out.push_back(g.store->indexOf(i));
  return out;
}

std::vector<std::optional<Sym>> composition(const Scfg& g, const Transition& t) {
  std::vector<std::optional<Sym>> by(g.store->varCount());
  for (const auto& [k, v] : t.update) by[g.store->indexOf(k)] = v;
  return by;
}

Sym image(const Scfg& g, const Transition& t, const std::vector<std::optional<Sym>>& by,
          const std::vector<std::uint32_t>& inputs, Sym bad) {
  Store& st = *g.store;
  if (bad.isFalse() || t.guard.isFalse()) return st.ff();
  Sym moved = t.update.empty() ? bad : st.compose(bad, by);
  return st.existsIdx(st.land(t.guard, moved), inputs);
}

}  // namespace

Sym preImage(const Scfg& g, const Transition& t, Sym bad_after) {
  return image(g, t, composition(g, t), inputIndices(g), bad_after);
}

namespace {

BadStates solve(const Scfg& g, const BadStates& b0, std::size_t* rounds) {
  Store& st = *g.store;
  auto inputs = inputIndices(g);
  std::vector<std::vector<std::size_t>> into(g.locations());
  std::vector<std::vector<std::optional<Sym>>> comp;
  for (std::size_t i = 0; i < g.transitions.size(); ++i) {
    into[g.transitions[i].to].push_back(i);
    comp.push_back(composition(g, g.transitions[i]));
  }
  BadStates b = b0;
  std::deque<std::size_t> work;
  std::vector<char> queued(g.locations(), 0);
  for (std::size_t l = 0; l < g.locations(); ++l)
    if (!b[l].isFalse()) {
      work.push_back(l);
      queued[l] = 1;
    }
  std::size_t n = 0;
  while (!work.empty()) {
    std::size_t l = work.front();
    work.pop_front();
    queued[l] = 0;
    ++n;
    for (std::size_t ti : into[l]) {
      const Transition& t = g.transitions[ti];
      Sym grown = st.lor(b[t.from], image(g, t, comp[ti], inputs, b[l]));
      if (grown != b[t.from]) {
        b[t.from] = grown;
        if (!queued[t.from]) {
          work.push_back(t.from);
          queued[t.from] = 1;
        }
      }
    }
  }
  if (rounds) *rounds = n;

  // B must equal B0 ∪ pre(B) at every location.
  std::vector<Sym> again = b0;
  for (std::size_t i = 0; i < g.transitions.size(); ++i) {
    const Transition& t = g.transitions[i];
    again[t.from] = st.lor(again[t.from], image(g, t, comp[i], inputs, b[t.to]));
  }
  for (std::size_t l = 0; l < g.locations(); ++l)
    if (again[l] != b[l])
      throw std::logic_error(g.method.sig().str() + ": co-reachability is not a fixed point at " +
                             std::to_string(l));
  return b;
}

}  // namespace

BadStates coreach(const Scfg& g, const BadStates& b0) { return solve(g, b0, nullptr); }

Sym entryConstraint(const Scfg& g, const BadStates& b) {
  Store& st = *g.store;
  Sym ok = st.lnot(b[0]);
  for (const auto& [name, value] : g.init_constants) ok = st.cofactor(ok, name, value);
  return ok;
}

Sym minimize(Store& store, Sym g, const std::string& var) {
  std::uint32_t v = store.indexOf(var);
  Sym someValue = store.existsIdx(g, {v});
  return store.restrict(store.lnot(store.cofactor(g, v, false)), someValue);
}

Triangulation triangularize(Store& store, Sym g, const std::vector<std::string>& footprint) {
  std::vector<Sym> raw;
  Sym rest = g;
  for (const auto& v : footprint) {
    raw.push_back(minimize(store, rest, v));
    rest = store.existsIdx(rest, {store.indexOf(v)});
  }
  Triangulation out;
  out.guard = rest;
  // Each raw effect reads only later footprint variables; resolve them
  // back to front.
  Bindings solved;
  for (std::size_t i = footprint.size(); i-- > 0;) {
    Sym e = store.substitute(raw[i], solved);
    solved[footprint[i]] = e;
  }
  for (const auto& v : footprint) {
    Sym e = rest.isFalse() ? store.ff() : store.restrict(solved.at(v), rest);
    out.effect[v] = e;
  }
  return out;
}

Summary makeSummary(const Scfg& g, const Triangulation& t) {
  Store& st = *g.store;
  std::set<std::string> support(g.support.begin(), g.support.end());
  auto hygienic = [&](Sym f, const std::string& what) {
    for (const auto& n : st.supportNames(f))
      if (!support.count(n))
        throw std::logic_error(g.method.sig().str() + ": " + what + " reads " + n);
  };
  Summary s;
  s.sig = g.method.sig();
  s.model = g.model;
  s.formals = g.method.args();
  s.return_type = g.method.return_type;
  hygienic(t.guard, "guard");
  s.guard = st.exportSym(t.guard);
  for (const auto& v : g.footprint) {
    Sym e = t.effect.at(v);
    hygienic(e, "effect of " + v);
    s.effect[names::plain(v)] = st.exportSym(e);
  }
  s.provenance = Provenance::Inferred;
  return s;
}

Summary inferSummary(const ir::Method& m, const CallEnv& env, HeapModel model,
                     std::size_t max_nodes, InferStats* stats) {
  Scfg g = buildScfg(m, env, model, max_nodes);
  std::size_t rounds = 0;
  BadStates b = solve(g, initialBadStates(g), &rounds);
  Sym G = entryConstraint(g, b);
  Triangulation t = triangularize(*g.store, G, g.footprint);
  Summary s = makeSummary(g, t);
  if (stats) {
    stats->locations = g.locations();
    stats->transitions = g.transitions.size();
    stats->variables = g.store->varCount();
    stats->nodes = g.store->nodeCount();
    stats->fixpoint_rounds = rounds;
  }
  return s;
}

}  // namespace symsum
