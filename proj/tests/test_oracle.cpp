#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "symsum/cli.hpp"
#include "symsum/oracle.hpp"

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

struct Solved {
  ir::Program program;
  SummaryTable table;
  std::unique_ptr<Interpreter> in;

  Solved(const std::string& text, const std::string& stubs, HeapModel model = HeapModel::LPrec)
      : program(ir::parseProgram(text)) {
    SolveOptions opts;
    opts.model = model;
    table = solveProgram(program, parseStubs(stubs, model), opts);
    in = std::make_unique<Interpreter>(program, table);
  }

  Verdict check(const ir::MethodSig& sig, const PortableSym& guard) const {
    NiOptions o;
    o.trials = 2048;
    return checkNoninterference(*in, sig, guard, o);
  }
};

const std::string kSendStub = "static void Out:send(int v) { sink; }";

}  // namespace

TEST_CASE("interpreter: output of a constant") {
  Solved s("class C { static void m() { output(1); return; } }", "");
  auto st = s.in->enter({"C", "m", {}}, {}, {}, {});
  Trace t = s.in->run(st, 100, {});
  CHECK(t.events == std::vector<std::string>{"out 1"});
  CHECK(t.end == Trace::End::Normal);
}

TEST_CASE("interpreter: write chain reaches the sink") {
  Solved s(slurp(kData + "/write_chain.sir"), slurp(kData + "/write_chain.secstubs"), HeapModel::HPrec);
  Heap h;
  Object raf{"RandomAccessFile", {}, {}};
  Object stream{"FileImageOutputStream", {{"streamPos", 5}}, {{"raf", 0}}};
  Object bytes{"byte[]", {{"length", 3}, {"$data", 7}}, {}};
  h.objects = {raf, stream, bytes};
  auto st = s.in->enter({"FileImageOutputStream", "write", {"byte[]", "int", "int"}},
                        {{"i0", 1}, {"i1", 2}}, {{"this", 1}, {"r1", 2}}, h);
  Trace t = s.in->run(st, 100, {});
  REQUIRE(t.events.size() == 1);
  CHECK(t.events[0] ==
        "sink RandomAccessFile.writeBytes(byte[],int,int)"
        "(#0:RandomAccessFile{},#0:byte[]{$data=7;length=3;},1,2)");
  CHECK(t.end == Trace::End::Normal);
}

TEST_CASE("interpreter: callee effects are visible to the caller") {
  Solved s(R"(
class Box {
  int v;
  Box next;
  void put(int x) { this.v = x; return; }
  static Box make(int x) {
    Box b;
    b = new Box;
    b.put(x);
    return b;
  }
  static void m(int x) {
    Box b;
    int y;
    b = Box.make(x);
    y = b.v;
    output(y);
    return;
  }
})",
           "");
  auto st = s.in->enter({"Box", "m", {"int"}}, {{"x", 3}}, {}, {});
  Trace t = s.in->run(st, 100, {});
  CHECK(t.events == std::vector<std::string>{"out 3"});
}

TEST_CASE("interpreter: faults and fuel end the trace") {
  Solved s(R"(
class N {
  int v;
  static void deref(N a) { int x; output(1); x = a.v; output(x); return; }
  static void spin() { L: output(0); goto L; return; }
})",
           "");
  Trace t = s.in->run(s.in->enter({"N", "deref", {"N"}}, {}, {{"a", kNullRef}}, {}), 100, {});
  CHECK(t.end == Trace::End::Fault);
  CHECK(t.events == std::vector<std::string>{"out 1"});
  Trace u = s.in->run(s.in->enter({"N", "spin", {}}, {}, {}, {}), 10, {});
  CHECK(u.end == Trace::End::Fuel);
  CHECK(u.events.size() == 5);
}

TEST_CASE("trace agreement") {
  Trace a{{"x", "y"}, Trace::End::Normal, ""};
  Trace b{{"x"}, Trace::End::Fuel, ""};
  Trace c{{"x"}, Trace::End::Normal, ""};
  Trace d{{"z"}, Trace::End::Fuel, ""};
  CHECK(tracesAgree(a, a, false));
  CHECK(tracesAgree(a, b, false));
  CHECK(tracesAgree(b, a, false));
  CHECK_FALSE(tracesAgree(a, c, false));
  CHECK_FALSE(tracesAgree(a, d, false));
  CHECK_FALSE(tracesAgree(a, a, true));
  CHECK(tracesAgree(Trace{}, Trace{}, true));
}

namespace {

// Brute-force heap isomorphism over all permutations, used when every
// variable and object is low.
bool isomorphicByPermutation(const ConcreteState& a, const ConcreteState& b) {
  const Heap &ha = a.heap, &hb = b.heap;
  if (ha.objects.size() != hb.objects.size()) return false;
  std::vector<int> roots;
  for (const auto& [r, o] : a.frames[0].refs) roots.push_back(o);
  auto live = ha.reach(roots);
  std::vector<int> perm(ha.objects.size());
  std::iota(perm.begin(), perm.end(), 0);
  auto mapped = [&](int o) { return o == kNullRef ? kNullRef : perm[o]; };
  do {
    bool ok = a.frames[0].prims == b.frames[0].prims;
    for (const auto& [r, o] : a.frames[0].refs) ok = ok && mapped(o) == b.frames[0].refs.at(r);
    for (std::size_t o = 0; ok && o < ha.objects.size(); ++o) {
      if (!live[o]) continue;
      const Object &x = ha.objects[o], &y = hb.objects[perm[o]];
      ok = x.cls == y.cls && x.prims == y.prims && x.refs.size() == y.refs.size();
      for (const auto& [f, t] : x.refs) ok = ok && y.refs.count(f) && mapped(t) == y.refs.at(f);
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace

TEST_CASE("low equivalence") {
  Solved s(R"(
class N {
  int v;
  N next;
  static void m(N a, N b, int h, int l) { return; }
})",
           "");
  ir::MethodSig sig{"N", "m", {"N", "N", "int", "int"}};
  LevelAssignment allLow;
  for (const auto& n : {"level_a", "level_b", "level_h", "level_l", "objlevel_a", "objlevel_b", "pc"})
    allLow.values[n] = false;
  LevelAssignment highH = allLow;
  highH.values["level_h"] = true;

  Heap h;
  h.objects = {{"N", {{"v", 1}}, {{"next", 1}}}, {"N", {{"v", 2}}, {{"next", kNullRef}}}};
  auto s1 = s.in->enter(sig, {{"h", 0}, {"l", 1}}, {{"a", 0}, {"b", 1}}, h);
  auto s2 = s.in->enter(sig, {{"h", 3}, {"l", 1}}, {{"a", 0}, {"b", 1}}, h);

  SUBCASE("identical states") { CHECK(lowEquivalent(s1, s1, allLow, HeapModel::LPrec)); }
  SUBCASE("differing only in a high primitive") {
    CHECK(lowEquivalent(s1, s2, highH, HeapModel::LPrec));
    CHECK_FALSE(lowEquivalent(s1, s2, allLow, HeapModel::LPrec));
  }
  SUBCASE("low heaps differing by one edge") {
    auto s3 = s1;
    s3.heap.objects[0].refs["next"] = kNullRef;
    CHECK_FALSE(lowEquivalent(s1, s3, allLow, HeapModel::LPrec));
    LevelAssignment highObj = allLow;
    highObj.values["objlevel_a"] = true;
    highObj.values["objlevel_b"] = true;
    CHECK(lowEquivalent(s1, s3, highObj, HeapModel::LPrec));
  }
  SUBCASE("renamed objects are equivalent") {
    Heap swapped;
    swapped.objects = {h.objects[1], h.objects[0]};
    swapped.objects[1].refs["next"] = 0;
    auto s4 = s.in->enter(sig, {{"h", 0}, {"l", 1}}, {{"a", 1}, {"b", 0}}, swapped);
    CHECK(lowEquivalent(s1, s4, allLow, HeapModel::LPrec));
  }
  SUBCASE("canonical labeling agrees with permutation search") {
    std::mt19937 rng(7);
    auto randomState = [&] {
      Heap g;
      int n = 1 + static_cast<int>(rng() % 4);
      for (int i = 0; i < n; ++i) {
        int next = static_cast<int>(rng() % (n + 1)) - 1;
        g.objects.push_back({"N", {{"v", static_cast<long long>(rng() % 2)}}, {{"next", next}}});
      }
      int a = static_cast<int>(rng() % (n + 1)) - 1, b = static_cast<int>(rng() % (n + 1)) - 1;
      return s.in->enter(sig, {{"h", 0}, {"l", 0}}, {{"a", a}, {"b", b}}, g);
    };
    int agreeing = 0;
    for (int i = 0; i < 3000; ++i) {
      auto x = randomState(), y = randomState();
      bool fast = lowEquivalent(x, y, allLow, HeapModel::LPrec);
      // unreachable objects never matter; drop them before the brute-force search
      auto prune = [](ConcreteState st) {
        std::vector<int> roots;
        for (const auto& [r, o] : st.frames[0].refs) roots.push_back(o);
        auto live = st.heap.reach(roots);
        std::vector<int> index(st.heap.objects.size(), kNullRef);
        Heap out;
        for (std::size_t o = 0; o < live.size(); ++o)
          if (live[o]) {
            index[o] = static_cast<int>(out.objects.size());
            out.objects.push_back(st.heap.objects[o]);
          }
        for (auto& obj : out.objects)
          for (auto& [f, t] : obj.refs) t = t == kNullRef ? kNullRef : index[t];
        for (auto& [r, o] : st.frames[0].refs) o = o == kNullRef ? kNullRef : index[o];
        st.heap = out;
        return st;
      };
      bool slow = isomorphicByPermutation(prune(x), prune(y));
      CHECK(fast == slow);
      agreeing += fast;
    }
    CHECK(agreeing > 0);
  }
  SUBCASE("equivalence relation on random states") {
    std::mt19937 rng(11);
    LevelAssignment mixed = allLow;
    mixed.values["level_h"] = true;
    mixed.values["objlevel_b"] = true;
    std::vector<ConcreteState> pool;
    for (int i = 0; i < 40; ++i) {
      Heap g;
      g.objects = {{"N", {{"v", static_cast<long long>(rng() % 2)}}, {{"next", kNullRef}}},
                   {"N", {{"v", static_cast<long long>(rng() % 2)}}, {{"next", 0}}}};
      pool.push_back(s.in->enter(sig, {{"h", static_cast<long long>(rng() % 2)}, {"l", 0}},
                                 {{"a", static_cast<int>(rng() % 2)}, {"b", 1}}, g));
    }
    for (const auto& x : pool) {
      CHECK(lowEquivalent(x, x, mixed, HeapModel::LPrec));
      for (const auto& y : pool) {
        bool xy = lowEquivalent(x, y, mixed, HeapModel::LPrec);
        CHECK(xy == lowEquivalent(y, x, mixed, HeapModel::LPrec));
        if (!xy) continue;
        for (const auto& z : pool)
          if (lowEquivalent(y, z, mixed, HeapModel::LPrec)) CHECK(lowEquivalent(x, z, mixed, HeapModel::LPrec));
      }
    }
  }
}

TEST_CASE("noninterference: explicit leak") {
  Solved s("class C { static void m(int h) { output(h); return; } }", "");
  ir::MethodSig sig{"C", "m", {"int"}};
  Verdict wrong = s.check(sig, PortableSym::constant(true));
  CHECK_FALSE(wrong.ok);
  REQUIRE(wrong.witness);
  CHECK(replayWitness(*s.in, *wrong.witness, 200));
  Verdict right = s.check(sig, s.table.find(sig)->guard);
  CHECK(right.ok);
  CHECK_FALSE(right.vacuous);
}

TEST_CASE("noninterference: implicit flow") {
  for (auto model : {HeapModel::LPrec, HeapModel::HPrec}) {
    Solved s(R"(
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
})",
             kSendStub, model);
    ir::MethodSig sig{"C", "m", {"int"}};
    CHECK(s.check(sig, s.table.find(sig)->guard).ok);
    Verdict weak = s.check(sig, PortableSym::constant(true));
    CHECK_FALSE(weak.ok);
    REQUIRE(weak.witness);
    CHECK(replayWitness(*s.in, *weak.witness, 200));
  }
}

TEST_CASE("noninterference: write chain and read") {
  Solved chain(slurp(kData + "/write_chain.sir"), slurp(kData + "/write_chain.secstubs"), HeapModel::HPrec);
  for (const auto& [sig, sum] : chain.table.summaries)
    if (sum.provenance == Provenance::Inferred) {
      CHECK(chain.check(sig, sum.guard).ok);
      if (!sum.guard.isTrue()) CHECK_FALSE(chain.check(sig, PortableSym::constant(true)).ok);
    }
  Solved rd(slurp(kData + "/read.sir"), slurp(kData + "/read.secstubs"));
  ir::MethodSig read{"FileInputStream", "read", {"byte[]"}};
  CHECK(rd.check(read, rd.table.find(read)->guard).ok);
}
