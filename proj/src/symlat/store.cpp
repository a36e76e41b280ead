#include "symsum/symlat.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace symsum {

const char* toString(Level l) { return l == Level::High ? "⊤" : "⊥"; }

NodeLimitExceeded::NodeLimitExceeded(std::size_t limit)
    : std::runtime_error("symbolic node ceiling exceeded (" + std::to_string(limit) + " nodes)") {}

Sym Sym::operator!() const { return store_->lnot(*this); }
Sym operator&(const Sym& a, const Sym& b) { return a.store_->land(a, b); }
Sym operator|(const Sym& a, const Sym& b) { return a.store_->lor(a, b); }
Sym operator^(const Sym& a, const Sym& b) { return a.store_->lxor(a, b); }

PortableSym PortableSym::constant(bool value) {
  PortableSym p;
  p.root = value ? 1 : 0;
  return p;
}

bool PortableSym::mentions(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

bool PortableSym::eval(const std::function<bool(const std::string&)>& valuation) const {
  std::vector<char> values(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) values[i] = valuation(names[i]);
  std::uint32_t cur = root;
  while (cur >= 2) {
    const Node& n = nodes[cur - 2];
    cur = values[n.var] ? n.hi : n.lo;
  }
  return cur == 1;
}

Store::Store(std::vector<SymVarDecl> vars, std::size_t max_nodes)
    : vars_(std::move(vars)), max_nodes_(max_nodes) {
  std::sort(vars_.begin(), vars_.end(), [](const SymVarDecl& a, const SymVarDecl& b) {
    bool ai = a.role == VarRole::Input, bi = b.role == VarRole::Input;
    if (ai != bi) return !ai;
    return a.name < b.name;
  });
  for (std::uint32_t i = 0; i < vars_.size(); ++i) {
    if (!index_.emplace(vars_[i].name, i).second)
      throw SymError("duplicate symbolic variable '" + vars_[i].name + "'");
  }
  nodes_.push_back({kTerminalVar, 0, 0});
  nodes_.push_back({kTerminalVar, 1, 1});
}

std::uint32_t Store::indexOf(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw SymError("unknown symbolic variable '" + name + "'");
  return it->second;
}

Sym Store::var(const std::string& name) { return varAt(indexOf(name)); }

Sym Store::varAt(std::uint32_t index) { return {this, mk(index, 0, 1)}; }

std::uint32_t Store::mk(std::uint32_t var, std::uint32_t lo, std::uint32_t hi) {
  if (lo == hi) return lo;
  auto key = std::make_tuple(var, lo, hi);
  auto it = unique_.find(key);
  if (it != unique_.end()) return it->second;
  if (nodes_.size() >= max_nodes_) throw NodeLimitExceeded(max_nodes_);
  auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back({var, lo, hi});
  unique_.emplace(key, id);
  return id;
}

Sym Store::ite(Sym f, Sym g, Sym h) {
  assert(f.store() == this || f.isConst());
  return {this, iteRec(f.id(), g.id(), h.id())};
}

std::uint32_t Store::iteRec(std::uint32_t f, std::uint32_t g, std::uint32_t h) {
  if (f == 1) return g;
  if (f == 0) return h;
  if (g == h) return g;
  if (g == 1 && h == 0) return f;
  if (g == f) g = 1;
  if (h == f) h = 0;
  if (g == h) return g;
  auto key = std::make_tuple(f, g, h);
  if (auto it = ite_cache_.find(key); it != ite_cache_.end()) return it->second;

  std::uint32_t top = std::min({level(f), level(g), level(h)});
  auto cof = [&](std::uint32_t x, bool hi) -> std::uint32_t {
    if (level(x) != top) return x;
    return hi ? nodes_[x].hi : nodes_[x].lo;
  };
  std::uint32_t t = iteRec(cof(f, true), cof(g, true), cof(h, true));
  std::uint32_t e = iteRec(cof(f, false), cof(g, false), cof(h, false));
  std::uint32_t r = mk(top, e, t);
  ite_cache_.emplace(key, r);
  return r;
}

Sym Store::exists(Sym f, const std::vector<std::string>& names) {
  std::vector<std::uint32_t> idx;
  idx.reserve(names.size());
  for (const auto& n : names)
    if (has(n)) idx.push_back(indexOf(n));
  return existsIdx(f, idx);
}

Sym Store::existsIdx(Sym f, const std::vector<std::uint32_t>& indices) {
  if (indices.empty() || f.isConst()) return f;
  std::vector<char> quantified(vars_.size(), 0);
  std::uint32_t deepest = 0;
  for (auto i : indices) {
    quantified[i] = 1;
    deepest = std::max(deepest, i);
  }
  std::unordered_map<std::uint32_t, std::uint32_t> memo;
  std::function<std::uint32_t(std::uint32_t)> rec = [&](std::uint32_t x) -> std::uint32_t {
    if (x < 2 || level(x) > deepest) return x;
    if (auto it = memo.find(x); it != memo.end()) return it->second;
    std::uint32_t lo = rec(nodes_[x].lo);
    std::uint32_t hi = rec(nodes_[x].hi);
    std::uint32_t r = quantified[level(x)] ? iteRec(lo, 1, hi) : mk(level(x), lo, hi);
    memo.emplace(x, r);
    return r;
  };
  return {this, rec(f.id())};
}

Sym Store::forall(Sym f, const std::vector<std::string>& names) {
  return lnot(exists(lnot(f), names));
}

Sym Store::substitute(Sym f, const Bindings& bindings) {
  if (bindings.empty()) return f;
  std::vector<std::optional<Sym>> by_index(vars_.size());
  for (const auto& [name, expr] : bindings) by_index[indexOf(name)] = expr;
  return compose(f, by_index);
}

Sym Store::compose(Sym f, const std::vector<std::optional<Sym>>& by_index) {
  std::unordered_map<std::uint32_t, std::uint32_t> memo;
  std::function<std::uint32_t(std::uint32_t)> rec = [&](std::uint32_t x) -> std::uint32_t {
    if (x < 2) return x;
    if (auto it = memo.find(x); it != memo.end()) return it->second;
    std::uint32_t lo = rec(nodes_[x].lo);
    std::uint32_t hi = rec(nodes_[x].hi);
    const auto& repl = by_index[level(x)];
    std::uint32_t v = repl ? repl->id() : mk(level(x), 0, 1);
    std::uint32_t r = iteRec(v, hi, lo);
    memo.emplace(x, r);
    return r;
  };
  return {this, rec(f.id())};
}

Sym Store::cofactor(Sym f, std::uint32_t index, bool value) {
  std::unordered_map<std::uint32_t, std::uint32_t> memo;
  std::function<std::uint32_t(std::uint32_t)> rec = [&](std::uint32_t x) -> std::uint32_t {
    if (x < 2 || level(x) > index) return x;
    if (level(x) == index) return value ? nodes_[x].hi : nodes_[x].lo;
    if (auto it = memo.find(x); it != memo.end()) return it->second;
    std::uint32_t r = mk(level(x), rec(nodes_[x].lo), rec(nodes_[x].hi));
    memo.emplace(x, r);
    return r;
  };
  return {this, rec(f.id())};
}

std::uint32_t Store::restrictRec(std::uint32_t f, std::uint32_t c, Table& memo) {
  if (c == 0) return 0;
  if (c == 1 || f < 2) return f;
  if (f == c) return 1;
  auto key = std::make_tuple(f, c, 0u);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::uint32_t r;
  std::uint32_t lf = level(f), lc = level(c);
  if (lc < lf) {
    // f does not depend on c's top variable: merge both halves of the care set.
    r = restrictRec(f, iteRec(nodes_[c].lo, 1, nodes_[c].hi), memo);
  } else if (lf < lc) {
    r = mk(lf, restrictRec(nodes_[f].lo, c, memo), restrictRec(nodes_[f].hi, c, memo));
  } else if (nodes_[c].lo == 0) {
    r = restrictRec(nodes_[f].hi, nodes_[c].hi, memo);
  } else if (nodes_[c].hi == 0) {
    r = restrictRec(nodes_[f].lo, nodes_[c].lo, memo);
  } else {
    r = mk(lf, restrictRec(nodes_[f].lo, nodes_[c].lo, memo),
           restrictRec(nodes_[f].hi, nodes_[c].hi, memo));
  }
  memo.emplace(key, r);
  return r;
}

Sym Store::restrict(Sym f, Sym care) {
  Table memo;
  return {this, restrictRec(f.id(), care.id(), memo)};
}

bool Store::eval(Sym f, const std::vector<bool>& valuation_by_index) const {
  std::uint32_t cur = f.id();
  while (cur >= 2) cur = valuation_by_index[level(cur)] ? nodes_[cur].hi : nodes_[cur].lo;
  return cur == 1;
}

std::vector<std::uint32_t> Store::support(Sym f) const {
  std::vector<char> seen_var(vars_.size(), 0);
  std::unordered_map<std::uint32_t, bool> seen;
  std::vector<std::uint32_t> stack{f.id()};
  while (!stack.empty()) {
    auto x = stack.back();
    stack.pop_back();
    if (x < 2 || !seen.emplace(x, true).second) continue;
    seen_var[level(x)] = 1;
    stack.push_back(nodes_[x].lo);
    stack.push_back(nodes_[x].hi);
  }
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < vars_.size(); ++i)
    if (seen_var[i]) out.push_back(i);
  return out;
}

std::vector<std::string> Store::supportNames(Sym f) const {
  std::vector<std::string> out;
  for (auto i : support(f)) out.push_back(vars_[i].name);
  return out;
}

std::size_t Store::size(Sym f) const {
  std::unordered_map<std::uint32_t, bool> seen;
  std::vector<std::uint32_t> stack{f.id()};
  while (!stack.empty()) {
    auto x = stack.back();
    stack.pop_back();
    if (x < 2 || !seen.emplace(x, true).second) continue;
    stack.push_back(nodes_[x].lo);
    stack.push_back(nodes_[x].hi);
  }
  return seen.size();
}

PortableSym Store::exportSym(Sym f) const {
  PortableSym p;
  auto sup = support(f);
  std::unordered_map<std::uint32_t, std::uint32_t> var_slot;
  for (auto v : sup) {
    var_slot.emplace(v, static_cast<std::uint32_t>(p.names.size()));
    p.names.push_back(vars_[v].name);
  }
  std::unordered_map<std::uint32_t, std::uint32_t> memo;
  std::function<std::uint32_t(std::uint32_t)> rec = [&](std::uint32_t x) -> std::uint32_t {
    if (x < 2) return x;
    if (auto it = memo.find(x); it != memo.end()) return it->second;
    std::uint32_t lo = rec(nodes_[x].lo);
    std::uint32_t hi = rec(nodes_[x].hi);
    p.nodes.push_back({var_slot.at(level(x)), lo, hi});
    auto id = static_cast<std::uint32_t>(p.nodes.size() + 1);
    memo.emplace(x, id);
    return id;
  };
  p.root = rec(f.id());
  return p;
}

Sym Store::importSym(const PortableSym& p,
                     const std::function<Sym(const std::string&)>& rename) {
  std::vector<Sym> slot;
  slot.reserve(p.names.size());
  for (const auto& n : p.names) slot.push_back(rename(n));
  std::vector<std::uint32_t> built(p.nodes.size() + 2);
  built[0] = 0;
  built[1] = 1;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    const auto& n = p.nodes[i];
    built[i + 2] = iteRec(slot[n.var].id(), built[n.hi], built[n.lo]);
  }
  return {this, built[p.root]};
}

Sym Store::importSym(const PortableSym& p) {
  return importSym(p, [this](const std::string& n) { return var(n); });
}

std::pair<std::uint32_t, std::vector<Store::Cube>> Store::isopRec(std::uint32_t lower,
                                                                  std::uint32_t upper) {
  if (lower == 0) return {0, {}};
  if (upper == 1) return {1, {Cube{}}};
  std::uint32_t top = std::min(level(lower), level(upper));
  auto cof = [&](std::uint32_t x, bool hi) {
    if (level(x) != top) return x;
    return hi ? nodes_[x].hi : nodes_[x].lo;
  };
  std::uint32_t l0 = cof(lower, false), l1 = cof(lower, true);
  std::uint32_t u0 = cof(upper, false), u1 = cof(upper, true);
  // Minato–Morreale: cubes needing ¬x, cubes needing x, cubes free of x.
  auto [f0, c0] = isopRec(iteRec(l0, iteRec(u1, 0, 1), 0), u0);
  auto [f1, c1] = isopRec(iteRec(l1, iteRec(u0, 0, 1), 0), u1);
  std::uint32_t rest_l = iteRec(iteRec(l0, iteRec(f0, 0, 1), 0), 1,
                                iteRec(l1, iteRec(f1, 0, 1), 0));
  auto [fd, cd] = isopRec(rest_l, iteRec(u0, u1, 0));
  std::vector<Cube> cubes;
  for (auto c : c0) {
    c.insert(c.begin(), {top, false});
    cubes.push_back(std::move(c));
  }
  for (auto c : c1) {
    c.insert(c.begin(), {top, true});
    cubes.push_back(std::move(c));
  }
  for (auto& c : cd) cubes.push_back(std::move(c));
  std::uint32_t x = mk(top, 0, 1);
  std::uint32_t func = iteRec(fd, 1, iteRec(x, f1, f0));
  return {func, std::move(cubes)};
}

std::vector<Store::Cube> Store::isop(Sym f) { return isopRec(f.id(), f.id()).second; }

SymUpdate mergeUpdates(Store& store, const SymUpdate& a, const SymUpdate& b) {
  SymUpdate out = a;
  for (const auto& [name, rhs] : b) {
    if (store.has(name) && store.decl(name).role == VarRole::Snapshot)
      throw SymError("snapshot variable assigned: " + name);
    auto [it, fresh] = out.emplace(name, rhs);
    if (!fresh) it->second = store.lor(it->second, rhs);
  }
  for (const auto& [name, rhs] : a)
    if (store.has(name) && store.decl(name).role == VarRole::Snapshot)
      throw SymError("snapshot variable assigned: " + name);
  return out;
}

}  // namespace symsum
