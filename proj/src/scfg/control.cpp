#include <algorithm>
#include <deque>
#include <limits>
#include <set>

#include "symsum/scfg.hpp"

namespace symsum {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

std::vector<std::size_t> postorder(std::size_t nodes, std::size_t root,
                                   const std::function<std::vector<std::size_t>(std::size_t)>& succ) {
  std::vector<std::size_t> out;
  std::vector<char> seen(nodes, 0);
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> stack;
  seen[root] = 1;
  stack.push_back({root, succ(root)});
  while (!stack.empty()) {
    auto& [n, rest] = stack.back();
    if (rest.empty()) {
      out.push_back(n);
      stack.pop_back();
      continue;
    }
    std::size_t next = rest.front();
    rest.erase(rest.begin());
    if (!seen[next]) {
      seen[next] = 1;
      stack.push_back({next, succ(next)});
    }
  }
  return out;
}

}  // namespace

std::vector<std::size_t> immediateDominators(
    std::size_t nodes, std::size_t root,
    const std::function<std::vector<std::size_t>(std::size_t)>& succ) {
  auto po = postorder(nodes, root, succ);
  std::vector<std::size_t> order(nodes, kNone);  // postorder number
  for (std::size_t i = 0; i < po.size(); ++i) order[po[i]] = i;
  std::vector<std::vector<std::size_t>> preds(nodes);
  for (std::size_t n : po)
    for (std::size_t s : succ(n)) preds[s].push_back(n);

  std::vector<std::size_t> idom(nodes, kNone);
  idom[root] = root;
  auto intersect = [&](std::size_t a, std::size_t b) {
    while (a != b) {
      while (order[a] < order[b]) a = idom[a];
      while (order[b] < order[a]) b = idom[b];
    }
    return a;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (auto it = po.rbegin(); it != po.rend(); ++it) {
      std::size_t b = *it;
      if (b == root) continue;
      std::size_t fresh = kNone;
      for (std::size_t p : preds[b]) {
        if (idom[p] == kNone) continue;
        fresh = fresh == kNone ? p : intersect(p, fresh);
      }
      if (fresh != idom[b]) {
        idom[b] = fresh;
        changed = true;
      }
    }
  }
  return idom;
}

ControlInfo analyzeControl(const ir::Method& m) {
  const std::size_t n = m.body.size();
  const std::size_t exit = n;
  auto succ = [&](std::size_t i) -> std::vector<std::size_t> {
    if (i >= n) return {};
    auto s = m.successors(i);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  };

  ControlInfo info;
  info.reachable.assign(n + 1, false);
  for (std::size_t v : postorder(n + 1, 0, succ)) info.reachable[v] = true;

  // Reducibility: every retreating edge must target a dominator of its source.
  auto idom = immediateDominators(n + 1, 0, succ);
  auto dominates = [&](std::size_t a, std::size_t b) {
    while (true) {
      if (a == b) return true;
      if (idom[b] == kNone || idom[b] == b) return false;
      b = idom[b];
    }
  };
  {
    std::vector<char> state(n + 1, 0);  // 1 on stack, 2 done
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    state[0] = 1;
    while (!stack.empty()) {
      auto& [v, k] = stack.back();
      auto s = succ(v);
      if (k == s.size()) {
        state[v] = 2;
        stack.pop_back();
        continue;
      }
      std::size_t w = s[k++];
      if (state[w] == 1 && !dominates(w, v))
        throw IrreducibleCfg(m.sig().str() + ": irreducible control flow (jump from statement " +
                             std::to_string(v) + " into a loop at statement " + std::to_string(w) + ")");
      if (state[w] == 0) {
        state[w] = 1;
        stack.push_back({w, 0});
      }
    }
  }

  // Postdominators over the reversed graph; nodes that cannot reach the exit
  // get a virtual edge to it.
  std::vector<std::vector<std::size_t>> rev(n + 1);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w : succ(v)) rev[w].push_back(v);
  std::vector<bool> reachesExit(n + 1, false);
  for (std::size_t v : postorder(n + 1, exit, [&](std::size_t x) { return rev[x]; }))
    reachesExit[v] = true;
  for (std::size_t v = 0; v < n; ++v)
    if (!reachesExit[v]) rev[exit].push_back(v);
  info.ipdom = immediateDominators(n + 1, exit, [&](std::size_t x) { return rev[x]; });

  info.region.assign(n, {});
  info.ctx.assign(n, {});
  for (std::size_t b = 0; b < n; ++b) {
    if (m.body[b].kind != ir::StmtKind::If || !info.reachable[b]) continue;
    std::size_t stop = info.ipdom[b];
    std::set<std::size_t> seen;
    std::deque<std::size_t> work;
    for (std::size_t s : succ(b)) work.push_back(s);
    while (!work.empty()) {
      std::size_t v = work.front();
      work.pop_front();
      if (v == stop || v == exit || !seen.insert(v).second) continue;
      for (std::size_t s : succ(v)) work.push_back(s);
    }
    info.region[b].assign(seen.begin(), seen.end());
    for (std::size_t v : seen) info.ctx[v].push_back(b);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t v = 0; v < n; ++v) {
      std::set<std::size_t> all(info.ctx[v].begin(), info.ctx[v].end());
      for (std::size_t b : info.ctx[v]) all.insert(info.ctx[b].begin(), info.ctx[b].end());
      if (all.size() != info.ctx[v].size()) {
        info.ctx[v].assign(all.begin(), all.end());
        changed = true;
      }
    }
  }
  return info;
}

}  // namespace symsum
