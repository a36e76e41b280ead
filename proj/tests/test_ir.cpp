#include <fstream>
#include <sstream>

#include "doctest.h"
#include "symsum/ir.hpp"

using namespace symsum::ir;

namespace {

std::string readFile(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kData = SYMSUM_TEST_DATA;

}  // namespace

TEST_CASE("minimal program") {
  Program p = parseProgram("class C { void m() { return; } }");
  REQUIRE(p.methods().size() == 1);
  CHECK(p.methods()[0]->body.size() == 1);
  CHECK(p.methods()[0]->body[0].kind == StmtKind::Return);
}

TEST_CASE("write chain transcription") {
  Program p = parseProgram(readFile(kData + "/write_chain.sir"), "write_chain.sir");
  CHECK(p.methods().size() == 4);
  const Method* w = p.findMethod({"FileImageOutputStream", "write", {"byte[]", "int", "int"}});
  REQUIRE(w);
  CHECK(w->argNames() == std::vector<std::string>{"this", "r1", "i0", "i1"});
  CHECK(w->refArgs() == std::vector<std::string>{"this", "r1"});
  // implicit this-field accesses become explicit loads and stores
  CHECK(w->body[0].kind == StmtKind::Call);
  CHECK(w->body[0].receiver == "this");
  CHECK(w->body[1].kind == StmtKind::LoadRef);
  CHECK(w->body[2].kind == StmtKind::Call);
  CHECK(w->body[2].receiver == "r2");
  CHECK(w->body[3].kind == StmtKind::LoadPrim);
  CHECK(w->body[3].base == "this");
  CHECK(w->body[5].kind == StmtKind::StorePrim);
  CHECK(w->body[5].field == "streamPos");
  const Method* native =
      p.findMethod({"RandomAccessFile", "writeBytes", {"byte[]", "int", "int"}});
  REQUIRE(native);
  CHECK_FALSE(native->hasBody());
}

TEST_CASE("statement classification") {
  Program p = parseProgram(R"(
class Node {
  int val;
  Node next;
  static Node f(Node a, int x) {
    Node r, s;
    int y;
    r = new Node;
    s = r;
    s = null;
    y = a.val;
    s = a.next;
    a.val = x + 1;
    a.next = r;
    L1: if (x < 3) goto L2;
    goto L2;
    L2: y = Node.g(a, 2);
    output(y);
    return r;
  }
  static int g(Node n, int k) { return k; }
}
)");
  const Method* f = p.findMethod({"Node", "f", {"Node", "int"}});
  REQUIRE(f);
  std::vector<StmtKind> kinds;
  for (const auto& s : f->body) kinds.push_back(s.kind);
  CHECK(kinds == std::vector<StmtKind>{StmtKind::New, StmtKind::Copy, StmtKind::Null,
                                       StmtKind::LoadPrim, StmtKind::LoadRef, StmtKind::StorePrim,
                                       StmtKind::StoreRef, StmtKind::If, StmtKind::Goto,
                                       StmtKind::Call, StmtKind::Output, StmtKind::Return});
  CHECK(f->body[9].is_static);
  CHECK(f->body[9].class_name == "Node");
  CHECK(f->successors(7) == std::vector<std::size_t>{8, 9});
  CHECK(f->successors(8) == std::vector<std::size_t>{9});
  CHECK(f->successors(11) == std::vector<std::size_t>{12});
}

TEST_CASE("parse errors") {
  CHECK_THROWS_WITH_AS(parseProgram("class C { void m() { goto L9; return; } }"),
                       doctest::Contains("unresolved label L9"), ProgramError);
  CHECK_THROWS_AS(parseProgram("class C { void m() { L1: return; L1: return; } }"), ProgramError);
  CHECK_THROWS_AS(parseProgram("class C { void m() { int x; x = 1; } }"), ProgramError);
  CHECK_THROWS_AS(parseProgram("class C { void m() { y = 1; return; } }"), ProgramError);
  CHECK_THROWS_AS(parseProgram("class C { D d; }"), ProgramError);
  CHECK_THROWS_AS(parseProgram("class C { int f; void m(C c) { int x; x = c.g; return; } }"),
                  ProgramError);
  CHECK_THROWS_AS(parseProgram("class C extends D { }"), ProgramError);
  CHECK_THROWS_AS(parseProgram("class A extends B { } class B extends A { }"), ProgramError);
  CHECK_THROWS_AS(parseProgram("class C { void m() { this = null; return; } }"), ProgramError);
  CHECK_THROWS_AS(parseProgram("class C { int m() { return; } }"), ProgramError);
  try {
    parseProgram("class C {\n  void m() {\n    x = = 1;\n  }\n}", "bad.sir");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 9);
    CHECK(std::string(e.what()).rfind("bad.sir:3:9:", 0) == 0);
  }
}

TEST_CASE("subtyping") {
  Program p = parseProgram(R"(
interface I { }
class B implements I { }
class C extends B { }
class D { }
)");
  const auto& h = p.hierarchy;
  CHECK(h.subtype("C", "C"));
  CHECK(h.subtype("C", "I"));
  CHECK(h.subtype("C", "B"));
  CHECK_FALSE(h.subtype("B", "C"));
  CHECK_FALSE(h.subtype("C", "D"));
  CHECK(h.subtype("int", "long"));
  CHECK_FALSE(h.subtype("int", "C"));
  CHECK(h.concreteSubtypes("I") == std::vector<std::string>{"B", "C"});
  CHECK_THROWS_AS(h.subtype("C", "Nope"), ProgramError);
}

TEST_CASE("print and parse round trip") {
  for (const char* f : {"/write_chain.sir", "/read.sir"}) {
    Program p = parseProgram(readFile(kData + f));
    std::string once = printProgram(p);
    Program q = parseProgram(once);
    CHECK(printProgram(q) == once);
  }
}

TEST_CASE("normalization of assigned reference formals") {
  Program p = parseProgram(R"(
class Node {
  Node next;
  static Node walk(Node r1, Node s) {
    r1 = s;
    r1 = r1.next;
    return r1;
  }
  static Node keep(Node r1) { return r1; }
}
)");
  const Method* walk = p.findMethod({"Node", "walk", {"Node", "Node"}});
  Method n = normalizeMethod(*walk);
  REQUIRE(n.body.size() == 4);
  CHECK(n.body[0].kind == StmtKind::Copy);
  CHECK(n.body[0].target == "r1_local");
  CHECK(n.body[0].source == "r1");
  CHECK(n.body[1].target == "r1_local");
  CHECK(n.body[2].base == "r1_local");
  CHECK(n.body[3].value->name == "r1_local");
  for (const auto& s : n.body) {
    auto t = s.assigned();
    CHECK_FALSE((t && n.isArg(*t)));
  }
  Method twice = normalizeMethod(n);
  CHECK(printMethod(twice) == printMethod(n));

  const Method* keep = p.findMethod({"Node", "keep", {"Node"}});
  CHECK(printMethod(normalizeMethod(*keep)) == printMethod(*keep));
}
