#include <random>

#include "doctest.h"
#include "symsum/cli.hpp"
#include "symsum/infer.hpp"
#include "symsum/interproc.hpp"

using namespace symsum;

namespace {

ir::Method methodOf(const ir::Program& p, const ir::MethodSig& sig) {
  const ir::Method* m = p.findMethod(sig);
  REQUIRE(m);
  return ir::normalizeMethod(*m);
}

CallEnv noCalls() {
  return [](std::size_t) -> std::vector<const Summary*> { throw std::logic_error("no calls expected"); };
}

bool same(Store& st, Sym f, const std::string& expr) {
  return f == parseSymExpr(st, expr, [&](const std::string& n) { return st.var(n); });
}

}  // namespace

TEST_CASE("scfg of a bare return") {
  auto p = ir::parseProgram("class C { static void m() { return; } }");
  Scfg g = buildScfg(methodOf(p, {"C", "m", {}}), noCalls(), HeapModel::LPrec);
  CHECK(g.locations() == 2);
  checkWellFormed(g);
  auto inv = g.invariants.find(g.exit);
  CHECK((inv == g.invariants.end() || g.store->entails(g.init, inv->second)));
  CHECK(inferSummary(methodOf(p, {"C", "m", {}}), noCalls(), HeapModel::LPrec).guard.isTrue());
}

TEST_CASE("output invariant") {
  auto p = ir::parseProgram(R"(
class C {
  static void prim(int s) { output(s); return; }
  static void ref(C s) { output(s); return; }
})");
  for (auto model : {HeapModel::LPrec, HeapModel::HPrec}) {
    Scfg a = buildScfg(methodOf(p, {"C", "prim", {"int"}}), noCalls(), model);
    Store& sa = *a.store;
    Sym nominal = sa.lnot(sa.var(names::kUpsilon));
    REQUIRE(a.invariants.count(0));
    CHECK(sa.land(nominal, a.invariants.at(0)) == sa.land(nominal, sa.lnot(sa.lor(sa.var("pc"), sa.var("level_s")))));
    Scfg b = buildScfg(methodOf(p, {"C", "ref", {"C"}}), noCalls(), model);
    Store& sb = *b.store;
    Sym nb = sb.lnot(sb.var(names::kUpsilon));
    CHECK(sb.land(nb, b.invariants.at(0)) ==
          sb.land(nb, sb.lnot(sb.lor(sb.var("pc"), sb.lor(sb.var("level_s"), sb.var("objlevel_s"))))));
  }
}

TEST_CASE("guards are exhaustive and disjoint") {
  auto p = ir::parseProgram(R"(
class N {
  int v;
  N next;
  static N walk(N a, int k) {
    N b;
    int t;
    b = a;
  L1:
    if (b == null) goto L2;
    t = b.v;
    if (t == k) goto L3;
    b = b.next;
    goto L1;
  L3:
    b.v = k;
    output(t);
  L2:
    return b;
  }
  void link(N o) { this.next = o; return; }
})");
  for (auto model : {HeapModel::LPrec, HeapModel::HPrec})
    for (const auto* m : p.methods()) {
      Scfg g = buildScfg(ir::normalizeMethod(*m), noCalls(), model);
      CHECK_NOTHROW(checkWellFormed(g));
    }
}

TEST_CASE("control regions") {
  auto p = ir::parseProgram(R"(
class C {
  static int m(int a, int b) {
    int x;
    x = 0;
    if (a == 0) goto L1;
    x = 1;
    if (b == 0) goto L2;
    x = 2;
  L2:
    x = x + 1;
  L1:
    return x;
  }
})");
  ControlInfo c = analyzeControl(methodOf(p, {"C", "m", {"int", "int"}}));
  const auto& outer = c.region[1];
  const auto& inner = c.region[3];
  REQUIRE_FALSE(inner.empty());
  for (auto s : inner) CHECK(std::find(outer.begin(), outer.end(), s) != outer.end());
  CHECK(std::find(inner.begin(), inner.end(), 5) == inner.end());
  CHECK(std::find(outer.begin(), outer.end(), 6) == outer.end());
  CHECK(c.ctx[4] == std::vector<std::size_t>{1, 3});
}

TEST_CASE("irreducible control flow is rejected and skipped") {
  auto p = ir::parseProgram(R"(
class C {
  static void m(int a) {
    int x;
    x = 0;
    if (a == 0) goto L2;
  L1:
    x = x + 1;
  L2:
    x = x + 2;
    if (x < 9) goto L1;
    return;
  }
})");
  CHECK_THROWS_AS(analyzeControl(methodOf(p, {"C", "m", {"int"}})), IrreducibleCfg);
  auto t = solveProgram(p, {}, {});
  const auto& rep = t.reports.at({"C", "m", {"int"}});
  CHECK((rep.provenance == Provenance::Pessimistic));
  CHECK_FALSE(rep.note.empty());
}

TEST_CASE("branch regions raise assigned levels") {
  auto p = ir::parseProgram(R"(
class C {
  static int m(int h) {
    int l;
    l = 0;
    if (h != 0) goto L;
    l = 1;
  L:
    return l;
  }
})");
  for (auto model : {HeapModel::LPrec, HeapModel::HPrec}) {
    Summary s = inferSummary(methodOf(p, {"C", "m", {"int"}}), noCalls(), model);
    Store st(summaryDecls(model, s.formals, s.return_type, {}));
    CHECK(s.guard.isTrue());
    CHECK(same(st, st.importSym(s.effect.at("level_ret")), "pc | level_h"));
  }
}

TEST_CASE("two return sites") {
  auto p = ir::parseProgram(R"(
class C {
  static int m(int a, int b, int c) {
    if (c != 0) goto L;
    return a;
  L:
    return b;
  }
  static int n(int a, int b) {
    return a;
  }
})");
  Scfg g = buildScfg(methodOf(p, {"C", "m", {"int", "int", "int"}}), noCalls(), HeapModel::LPrec);
  CHECK(g.return_sites.size() == 2);
  CHECK(g.retvar_bits == 2);
  Store& st = *g.store;
  // the exit invariant read per return site, against a hand-unrolled predicate
  Sym inv = g.invariants.at(g.exit);
  for (std::size_t k = 1; k <= 2; ++k) {
    Sym at = st.land(g.retvarIs(k), st.lnot(st.var(names::kUpsilon)));
    REQUIRE_FALSE(at.isFalse());
    std::string x = k == 1 ? "level_a" : "level_b";
    std::string want = "(pc | brlevel_0 | " + x + ") -> level_ret^r";
    CHECK(st.land(at, inv) == st.land(at, parseSymExpr(st, want, [&](const std::string& n) { return st.var(n); })));
  }
  Summary s = inferSummary(g.method, noCalls(), HeapModel::LPrec);
  Store ss(summaryDecls(HeapModel::LPrec, s.formals, s.return_type, {}));
  CHECK(same(ss, ss.importSym(s.effect.at("level_ret")), "pc | level_a | level_b | level_c"));
  Summary n = inferSummary(methodOf(p, {"C", "n", {"int", "int"}}), noCalls(), HeapModel::LPrec);
  Store sn(summaryDecls(HeapModel::LPrec, n.formals, n.return_type, {}));
  CHECK(same(sn, sn.importSym(n.effect.at("level_ret")), "pc | level_a"));
}

TEST_CASE("co-reachability on a chain") {
  auto p = ir::parseProgram("class C { static void m(int h) { output(h); return; } }");
  Scfg g = buildScfg(methodOf(p, {"C", "m", {"int"}}), noCalls(), HeapModel::LPrec);
  BadStates b0 = initialBadStates(g);
  BadStates b = coreach(g, b0);
  Store& st = *g.store;
  for (std::size_t l = 0; l < g.locations(); ++l) {
    Sym expect = b0[l];
    for (const auto& t : g.transitions)
      if (t.from == l) expect = st.lor(expect, preImage(g, t, b[t.to]));
    CHECK(expect == b[l]);
  }
  CHECK(same(st, entryConstraint(g, b), "!(pc | level_h)"));

  BadStates none(g.locations(), st.ff());
  CHECK(coreach(g, none) == none);
}

TEST_CASE("minimize") {
  Store st({{"pc"}, {"x"}, {"y"}, {"v"}});
  Sym pc = st.var("pc"), x = st.var("x"), v = st.var("v");
  CHECK(minimize(st, st.lor(x, st.var("y")), "v").isFalse());
  CHECK(minimize(st, st.iff(v, x), "v") == x);
  CHECK(minimize(st, st.land(st.implies(x, v), st.implies(pc, v)), "v") == st.lor(x, pc));
}

TEST_CASE("triangularize") {
  Store st({{"pc"}, {"x"}, {"ret"}, {"o"}});
  Sym pc = st.var("pc"), x = st.var("x"), ret = st.var("ret"), o = st.var("o");

  SUBCASE("no footprint") {
    Sym g = st.lor(pc, x);
    auto t = triangularize(st, g, {});
    CHECK(t.effect.empty());
    CHECK(t.guard == g);
  }
  SUBCASE("return level bound") {
    auto t = triangularize(st, st.implies(st.lor(pc, x), ret), {"ret"});
    CHECK(t.guard.isTrue());
    CHECK(t.effect.at("ret") == st.lor(pc, x));
  }
  SUBCASE("unsatisfiable") {
    auto t = triangularize(st, st.ff(), {"ret", "o"});
    CHECK(t.guard.isFalse());
    CHECK(t.effect.at("ret").isFalse());
    CHECK(t.effect.at("o").isFalse());
  }
  SUBCASE("random relations: sound, exact guard, minimal") {
    std::mt19937 rng(3);
    std::vector<std::string> fp{"ret", "o"};
    for (int round = 0; round < 300; ++round) {
      // random function as a truth table over 4 variables
      Sym g = st.ff();
      for (int row = 0; row < 16; ++row) {
        if (rng() % 3 == 0) continue;
        Sym cube = st.tt();
        for (int i = 0; i < 4; ++i) {
          Sym lit = st.varAt(i);
          cube = st.land(cube, (row >> i & 1) ? lit : st.lnot(lit));
        }
        g = st.lor(g, cube);
      }
      auto t = triangularize(st, g, fp);
      Sym eqs = st.land(st.iff(ret, t.effect.at("ret")), st.iff(o, t.effect.at("o")));
      CHECK(st.entails(st.land(t.guard, eqs), g));
      CHECK(t.guard == st.exists(g, fp));
      for (const auto& v : fp)
        for (const auto& n : st.supportNames(t.effect.at(v))) CHECK((n == "pc" || n == "x"));
      // lowering any effect where it is ⊤ breaks g
      for (int val = 0; val < 4; ++val) {
        std::vector<bool> sigma(st.varCount(), false);
        sigma[st.indexOf("pc")] = val & 1;
        sigma[st.indexOf("x")] = val >> 1 & 1;
        if (!st.eval(t.guard, sigma)) continue;
        for (const auto& v : fp) sigma[st.indexOf(v)] = st.eval(t.effect.at(v), sigma);
        for (const auto& v : fp) {
          if (!sigma[st.indexOf(v)]) continue;
          auto lowered = sigma;
          lowered[st.indexOf(v)] = false;
          CHECK_FALSE(st.eval(g, lowered));
        }
      }
    }
  }
}

TEST_CASE("call targets follow the class hierarchy") {
  auto p = ir::parseProgram(R"(
class A { void f() { return; } }
class B extends A { void f() { output(1); return; } }
class C extends A { }
class D extends B { }
class U {
  static void viaA(A a) { a.f(); return; }
  static void viaC(C c) { c.f(); return; }
  static void viaD(D d) { d.f(); return; }
})");
  auto pick = [&](const char* name, const char* type) {
    const ir::Method* m = p.findMethod({"U", name, {type}});
    REQUIRE(m);
    return resolveTargets(p, *m, m->body[0], {});
  };
  CHECK(pick("viaA", "A") == std::vector<ir::MethodSig>{{"A", "f", {}}, {"B", "f", {}}});
  CHECK(pick("viaC", "C") == std::vector<ir::MethodSig>{{"A", "f", {}}});
  CHECK(pick("viaD", "D") == std::vector<ir::MethodSig>{{"B", "f", {}}});

  auto t = solveProgram(p, {}, {});
  CHECK(t.find({"U", "viaC", {"C"}})->guard.isTrue());
  CHECK_FALSE(t.find({"U", "viaD", {"D"}})->guard.isTrue());
  CHECK_FALSE(t.find({"U", "viaA", {"A"}})->guard.isTrue());
}

TEST_CASE("recursion reaches a fixed point") {
  auto p = ir::parseProgram(R"(
class R {
  static int even(int n, int h) {
    int r;
    if (n == 0) goto Z;
    r = R.odd(n, h);
    return r;
  Z:
    output(h);
    return 1;
  }
  static int odd(int n, int h) {
    int r, k;
    k = n - 1;
    r = R.even(k, h);
    return r;
  }
})");
  for (auto model : {HeapModel::LPrec, HeapModel::HPrec}) {
    SolveOptions o;
    o.model = model;
    auto t = solveProgram(p, {}, o);
    const Summary* even = t.find({"R", "even", {"int", "int"}});
    const Summary* odd = t.find({"R", "odd", {"int", "int"}});
    REQUIRE(even);
    REQUIRE(odd);
    Store st(summaryDecls(model, odd->formals, odd->return_type, {}));
    CHECK(st.entails(st.importSym(odd->guard), st.lnot(st.var("level_h"))));
    for (const auto& [sig, rep] : t.reports) {
      CHECK(rep.inferences >= 1);
      for (std::size_t i = 1; i < rep.history.size(); ++i) {
        Summary a = *t.find(sig), b = a;
        a.guard = rep.history[i];
        b.guard = rep.history[i - 1];
        CHECK(guardEntails(a, b));
      }
    }
  }
}

TEST_CASE("iteration ceiling") {
  auto p = ir::parseProgram(R"(
class R {
  static int f(int n) { int r; r = R.g(n); return r; }
  static int g(int n) { int r; r = R.f(n); return r; }
})");
  SolveOptions o;
  o.max_iters = 1;
  CHECK_THROWS_AS(solveProgram(p, {}, o), NonTermination);
}

TEST_CASE("calls without an implementation are pessimistic") {
  auto p = ir::parseProgram(R"(
interface I { void f(); }
class U { static void m(I i, int x) { i.f(); return; } }
)");
  auto t = solveProgram(p, {}, {});
  CHECK((t.reports.at({"I", "f", {}}).provenance == Provenance::Pessimistic));
  const Summary* m = t.find({"U", "m", {"I", "int"}});
  Store st(summaryDecls(HeapModel::LPrec, m->formals, m->return_type, {}));
  CHECK(same(st, st.importSym(m->guard), "!(pc | level_i | objlevel_i)"));
}

