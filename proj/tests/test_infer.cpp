#include <chrono>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "symsum/cli.hpp"
#include "symsum/infer.hpp"
#include "symsum/interproc.hpp"

using namespace symsum;

namespace {

const std::string kData = SYMSUM_TEST_DATA;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SummaryTable solveText(const std::string& prog, const std::string& stubs, HeapModel model) {
  ir::Program p = ir::parseProgram(prog);
  SolveOptions opts;
  opts.model = model;
  return solveProgram(p, parseStubs(stubs, model), opts);
}

/// Canonical equivalence of an exported formula with an expression text.
bool sameAs(const Summary& s, const PortableSym& f, const std::string& expr) {
  Store st(summaryDecls(s.model, s.formals, s.return_type, s.sources()));
  Sym want = parseSymExpr(st, expr, [&](const std::string& n) { return st.var(n); });
  return st.importSym(f) == want;
}

bool guardEntails(const Summary& s, const std::string& expr) {
  Store st(summaryDecls(s.model, s.formals, s.return_type, s.sources()));
  Sym want = parseSymExpr(st, expr, [&](const std::string& n) { return st.var(n); });
  return st.entails(st.importSym(s.guard), want);
}

}  // namespace

TEST_CASE("write chain summaries under HPrec") {
  auto t0 = std::chrono::steady_clock::now();
  auto table = solveText(slurp(kData + "/write_chain.sir"), slurp(kData + "/write_chain.secstubs"), HeapModel::HPrec);
  const std::string lowArgs =
      "!(pc | level_i0 | level_i1 | level_r1 | level_this | objlevel_r1 | objlevel_this)";
  const Summary* raf = table.find({"RandomAccessFile", "write", {"byte[]", "int", "int"}});
  REQUIRE(raf);
  CHECK(sameAs(*raf, raf->guard, lowArgs));
  CHECK(sameAs(*raf, raf->effect.at("falias_this_this"), "falias_this_r1 | falias_this_this"));
  CHECK(sameAs(*raf, raf->effect.at("falias_this_r1"), "falias_this_r1"));
  CHECK(sameAs(*raf, raf->effect.at("objlevel_r1"), "bot"));
  CHECK(sameAs(*raf, raf->effect.at("objlevel_this"), "bot"));
  const Summary* w = table.find({"FileImageOutputStream", "write", {"byte[]", "int", "int"}});
  REQUIRE(w);
  CHECK(sameAs(*w, w->guard, lowArgs));
  const Summary* flush = table.find({"FileImageOutputStream", "flushBits", {}});
  REQUIRE(flush);
  CHECK(flush->guard.isTrue());
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(5));
}

TEST_CASE("write chain under LPrec keeps the sink guard") {
  auto table = solveText(slurp(kData + "/write_chain.sir"), slurp(kData + "/write_chain.secstubs"), HeapModel::LPrec);
  const Summary* w = table.find({"FileImageOutputStream", "write", {"byte[]", "int", "int"}});
  REQUIRE(w);
  CHECK(guardEntails(*w, "!(pc | level_i0 | level_i1 | level_r1 | objlevel_r1)"));
  CHECK_FALSE(w->guard.isTrue());
}

TEST_CASE("read summary with a source stub") {
  for (auto model : {HeapModel::LPrec, HeapModel::HPrec}) {
    auto table = solveText(slurp(kData + "/read.sir"), slurp(kData + "/read.secstubs"), model);
    const Summary* r = table.find({"FileInputStream", "read", {"byte[]"}});
    REQUIRE(r);
    CHECK(r->guard.isTrue());
    CHECK(sameAs(*r, r->effect.at("level_ret"),
                 "pc | level_r1 | level_this | objlevel_r1 | objlevel_this"));
    CHECK(sameAs(*r, r->effect.at("objlevel_r1"), "p0 | pc | objlevel_r1"));
  }
}

TEST_CASE("identity method") {
  auto table = solveText("class C { static int id(int x) { return x; } }", "", HeapModel::LPrec);
  const Summary* s = table.find({"C", "id", {"int"}});
  REQUIRE(s);
  CHECK(s->guard.isTrue());
  CHECK(sameAs(*s, s->effect.at("level_ret"), "pc | level_x"));
}

TEST_CASE("implicit and explicit flow to a sink") {
  const std::string stub = "static void Out:send(int v) { sink; }";
  const std::string implicitFlow = R"(
class Out { static native void send(int v); }
class C {
  static void m(int h) {
    int l;
    l = 0;
    if (h == 0) goto L;
    l = 1;
  L:
    Out.send(l);
    return;
  }
})";
  const std::string explicitOnly = R"(
class Out { static native void send(int v); }
class C {
  static void m(int h) {
    int l;
    l = 1;
    Out.send(l);
    return;
  }
})";
  for (auto model : {HeapModel::LPrec, HeapModel::HPrec}) {
    auto a = solveText(implicitFlow, stub, model);
    const Summary* s = a.find({"C", "m", {"int"}});
    REQUIRE(s);
    CHECK(guardEntails(*s, "!level_h"));
    CHECK(guardEntails(*s, "!pc"));
    auto b = solveText(explicitOnly, stub, model);
    const Summary* e = b.find({"C", "m", {"int"}});
    REQUIRE(e);
    CHECK(guardEntails(*e, "!pc"));
    CHECK_FALSE(guardEntails(*e, "!level_h"));
    CHECK(sameAs(*e, e->guard, "!pc"));
  }
}

TEST_CASE("call sites after a reassigned reference formal") {
  auto table = solveText(R"(
class Out { static native void send(int v); }
class N { int v; }
class C {
  static N m(N r, int a) {
    r = null;
    Out.send(a);
    return r;
  }
})",
                         "static void Out:send(int v) { sink; }", HeapModel::LPrec);
  const Summary* s = table.find({"C", "m", {"N", "int"}});
  REQUIRE(s);
  CHECK((s->provenance == Provenance::Inferred));
  CHECK(sameAs(*s, s->guard, "!(pc | level_a)"));
}
