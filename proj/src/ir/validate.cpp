#include "symsum/ir.hpp"

namespace symsum::ir {

namespace {

[[noreturn]] void fail(const Method& m, const Statement& s, const std::string& what) {
  std::string where = m.sig().str();
  if (s.line) where += " line " + std::to_string(s.line);
  throw ProgramError(where + ": " + what);
}

void checkType(const TypeHierarchy& h, const std::string& type, const std::string& context) {
  if (isVoidType(type)) throw ProgramError(context + ": void is not a value type");
  if (!h.has(type)) throw ProgramError(context + ": unknown type " + type);
}

class MethodChecker {
 public:
  MethodChecker(const Program& p, Method& m) : p_(p), m_(m) {}

  void run() {
    std::set<std::string> names;
    for (const auto& a : m_.args())
      if (!names.insert(a.name).second) throw ProgramError(m_.sig().str() + ": duplicate " + a.name);
    for (const auto& l : m_.locals) {
      if (l.name == "this") throw ProgramError(m_.sig().str() + ": local named this");
      if (!names.insert(l.name).second) throw ProgramError(m_.sig().str() + ": duplicate " + l.name);
      checkType(p_.hierarchy, l.type, m_.sig().str());
    }
    if (!m_.hasBody()) return;
    if (m_.body.empty() || m_.body.back().kind != StmtKind::Return)
      throw ProgramError(m_.sig().str() + ": body does not end in a return");
    std::set<std::string> labels;
    for (const auto& s : m_.body)
      if (!s.label.empty() && !labels.insert(s.label).second)
        fail(m_, s, "duplicate label " + s.label);
    for (auto& s : m_.body) statement(s, labels);
  }

 private:
  bool isVar(const std::string& n) const { return m_.lookup(n).has_value(); }

  std::optional<Field> implicitField(const std::string& n) const {
    if (m_.is_static || isVar(n)) return std::nullopt;
    return p_.findField(m_.class_name, n);
  }

  void needVar(const Statement& s, const std::string& n) const {
    if (!isVar(n)) fail(m_, s, "unknown variable " + n);
  }
  void needRef(const Statement& s, const std::string& n) const {
    needVar(s, n);
    if (!m_.isRefVar(n)) fail(m_, s, n + " is not a reference");
  }
  void needPrim(const Statement& s, const std::string& n) const {
    needVar(s, n);
    if (m_.isRefVar(n)) fail(m_, s, n + " is not a primitive");
  }
  void checkExpr(const Statement& s, const Expr& e) const {
    for (const auto& v : e.vars()) needVar(s, v);
    checkExprTypes(s, e);
  }
  // Reference variables and null may only appear as operands of == and !=.
  void checkExprTypes(const Statement& s, const Expr& e) const {
    auto isRefOperand = [&](const Expr& x) {
      return x.kind == Expr::Kind::Null || (x.kind == Expr::Kind::Var && m_.isRefVar(x.name));
    };
    if (e.kind == Expr::Kind::Binary && (e.op == "==" || e.op == "!=") &&
        (isRefOperand(e.args[0]) || isRefOperand(e.args[1]))) {
      if (!(isRefOperand(e.args[0]) && isRefOperand(e.args[1])))
        fail(m_, s, "comparison between a reference and a primitive");
      return;
    }
    if (isRefOperand(e)) fail(m_, s, "reference used in arithmetic");
    for (const auto& a : e.args) checkExprTypes(s, a);
  }
  Field field(const Statement& s, const std::string& base, const std::string& f) const {
    auto fd = p_.findField(m_.typeOf(base), f);
    if (!fd) fail(m_, s, "unknown field " + f + " of " + m_.typeOf(base));
    return *fd;
  }
  void noThisTarget(const Statement& s) const {
    if (s.target == "this") fail(m_, s, "assignment to this");
  }

  void statement(Statement& s, const std::set<std::string>& labels) {
    switch (s.kind) {
      case StmtKind::AssignPrim: {
        if (!isVar(s.target)) {
          auto f = implicitField(s.target);
          if (!f) fail(m_, s, "unknown variable " + s.target);
          // implicit this.f = e
          s.base = "this";
          s.field = s.target;
          s.target.clear();
          s.kind = StmtKind::StorePrim;
          return statement(s, labels);
        }
        noThisTarget(s);
        if (s.expr.kind == Expr::Kind::Var && !isVar(s.expr.name)) {
          if (auto f = implicitField(s.expr.name)) {
            s.kind = StmtKind::LoadPrim;
            s.base = "this";
            s.field = s.expr.name;
            s.expr = Expr();
            return statement(s, labels);
          }
        }
        if (m_.isRefVar(s.target)) {
          if (s.expr.kind == Expr::Kind::Var) {
            s.kind = StmtKind::Copy;
            s.source = s.expr.name;
            s.expr = Expr();
            needRef(s, s.source);
          } else if (s.expr.kind == Expr::Kind::Null) {
            s.kind = StmtKind::Null;
            s.expr = Expr();
          } else {
            fail(m_, s, "reference " + s.target + " assigned a primitive expression");
          }
          return;
        }
        checkExpr(s, s.expr);
        return;
      }
      case StmtKind::LoadPrim:
      case StmtKind::LoadRef: {
        needRef(s, s.base);
        needVar(s, s.target);
        noThisTarget(s);
        Field f = field(s, s.base, s.field);
        bool ref = isRefType(f.type);
        if (ref != m_.isRefVar(s.target)) fail(m_, s, "type mismatch loading " + s.field);
        s.kind = ref ? StmtKind::LoadRef : StmtKind::LoadPrim;
        return;
      }
      case StmtKind::StorePrim:
      case StmtKind::StoreRef: {
        needRef(s, s.base);
        Field f = field(s, s.base, s.field);
        if (s.kind == StmtKind::StoreRef) {
          needRef(s, s.source);
          if (!isRefType(f.type)) fail(m_, s, "storing a reference into " + s.field);
          return;
        }
        if (isRefType(f.type)) {
          if (s.expr.kind != Expr::Kind::Var)
            fail(m_, s, "reference field " + s.field + " needs a reference variable");
          s.kind = StmtKind::StoreRef;
          s.source = s.expr.name;
          s.expr = Expr();
          needRef(s, s.source);
          return;
        }
        checkExpr(s, s.expr);
        return;
      }
      case StmtKind::Copy:
        needRef(s, s.target);
        needRef(s, s.source);
        noThisTarget(s);
        return;
      case StmtKind::New: {
        needRef(s, s.target);
        noThisTarget(s);
        const ClassDecl* c = p_.findClass(s.class_name);
        if (!c) fail(m_, s, "unknown class " + s.class_name);
        if (c->is_interface) fail(m_, s, "cannot instantiate interface " + s.class_name);
        return;
      }
      case StmtKind::Null:
        needRef(s, s.target);
        noThisTarget(s);
        return;
      case StmtKind::Goto:
      case StmtKind::If:
        if (!labels.count(s.jump)) fail(m_, s, "unresolved label " + s.jump);
        if (s.kind == StmtKind::If) checkExpr(s, s.expr);
        return;
      case StmtKind::Call:
        if (s.is_static) {
          if (!p_.findClass(s.class_name)) fail(m_, s, "unknown class " + s.class_name);
        } else {
          if (s.receiver == "this" && m_.is_static) fail(m_, s, "this in a static method");
          needRef(s, s.receiver);
        }
        for (const auto& a : s.args)
          if (a.isVar()) needVar(s, a.name);
        if (!s.target.empty()) {
          needVar(s, s.target);
          noThisTarget(s);
        }
        return;
      case StmtKind::Output:
        if (s.value && s.value->isVar()) needVar(s, s.value->name);
        return;
      case StmtKind::Return: {
        bool has = s.value.has_value();
        if (isVoidType(m_.return_type)) {
          if (has) fail(m_, s, "void method returns a value");
          return;
        }
        if (!has) fail(m_, s, "missing return value");
        const Operand& v = *s.value;
        bool ref_expected = m_.returnsRef();
        if (v.kind == Operand::Kind::Null) {
          if (!ref_expected) fail(m_, s, "null returned from a primitive method");
        } else if (v.kind == Operand::Kind::Int) {
          if (ref_expected) fail(m_, s, "integer returned from a reference method");
        } else {
          needVar(s, v.name);
          if (m_.isRefVar(v.name) != ref_expected) fail(m_, s, "return type mismatch");
        }
        return;
      }
    }
  }

  const Program& p_;
  Method& m_;
};

}  // namespace

void validateProgram(Program& p) {
  p.hierarchy = TypeHierarchy();
  for (const auto& c : p.classes)
    p.hierarchy.add(c.name, {c.is_interface, c.superclass, c.interfaces});
  p.hierarchy.validate();
  for (const auto& c : p.classes) {
    std::set<std::string> fields;
    for (const auto& f : c.fields) {
      if (!fields.insert(f.name).second) throw ProgramError(c.name + ": duplicate field " + f.name);
      checkType(p.hierarchy, f.type, c.name + "." + f.name);
    }
    std::set<MethodSig> sigs;
    for (const auto& m : c.methods) {
      for (const auto& prm : m.params) checkType(p.hierarchy, prm.type, m.sig().str());
      if (!isVoidType(m.return_type) && !p.hierarchy.has(m.return_type))
        throw ProgramError(m.sig().str() + ": unknown return type " + m.return_type);
      if (!sigs.insert(m.sig()).second) throw ProgramError("duplicate method " + m.sig().str());
    }
  }
  for (auto& c : p.classes)
    for (auto& m : c.methods) MethodChecker(p, m).run();
}

}  // namespace symsum::ir
