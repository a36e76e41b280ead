#include <sstream>

#include "symsum/ir.hpp"

namespace symsum::ir {

namespace {

std::string operand(const Operand& o) {
  switch (o.kind) {
    case Operand::Kind::Var: return o.name;
    case Operand::Kind::Int: return std::to_string(o.value);
    case Operand::Kind::Null: return "null";
  }
  return "";
}

std::string nested(const Expr& e) {
  if (e.kind == Expr::Kind::Binary) return "(" + printExpr(e) + ")";
  if (e.kind == Expr::Kind::Int && e.value < 0) return "(" + printExpr(e) + ")";
  return printExpr(e);
}

std::string callText(const Statement& s) {
  std::string out = s.is_static ? s.class_name : s.receiver;
  out += "." + s.method + "(";
  for (std::size_t i = 0; i < s.args.size(); ++i) {
    if (i) out += ", ";
    out += operand(s.args[i]);
  }
  return out + ")";
}

}  // namespace

std::string printExpr(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Int: return std::to_string(e.value);
    case Expr::Kind::Null: return "null";
    case Expr::Kind::Var: return e.name;
    case Expr::Kind::Unary: return e.op + nested(e.args[0]);
    case Expr::Kind::Binary: return nested(e.args[0]) + " " + e.op + " " + nested(e.args[1]);
  }
  return "";
}

std::string printStatement(const Statement& s) {
  std::string body;
  switch (s.kind) {
    case StmtKind::AssignPrim: body = s.target + " = " + printExpr(s.expr); break;
    case StmtKind::LoadPrim:
    case StmtKind::LoadRef: body = s.target + " = " + s.base + "." + s.field; break;
    case StmtKind::StorePrim: body = s.base + "." + s.field + " = " + printExpr(s.expr); break;
    case StmtKind::StoreRef: body = s.base + "." + s.field + " = " + s.source; break;
    case StmtKind::Copy: body = s.target + " = " + s.source; break;
    case StmtKind::New: body = s.target + " = new " + s.class_name; break;
    case StmtKind::Null: body = s.target + " = null"; break;
    case StmtKind::Goto: body = "goto " + s.jump; break;
    case StmtKind::If: body = "if (" + printExpr(s.expr) + ") goto " + s.jump; break;
    case StmtKind::Call:
      body = (s.target.empty() ? "" : s.target + " = ") + callText(s);
      break;
    case StmtKind::Output: body = "output(" + operand(*s.value) + ")"; break;
    case StmtKind::Return: body = s.value ? "return " + operand(*s.value) : "return"; break;
  }
  body += ";";
  return s.label.empty() ? body : s.label + ": " + body;
}

std::string printMethod(const Method& m) {
  std::ostringstream out;
  out << "  ";
  if (m.is_static) out << "static ";
  if (m.is_native) out << "native ";
  out << m.return_type << " " << m.name << "(";
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    if (i) out << ", ";
    out << m.params[i].type << " " << m.params[i].name;
  }
  out << ")";
  if (m.is_native) {
    out << ";\n";
    return out.str();
  }
  out << " {\n";
  for (const auto& l : m.locals) out << "    " << l.type << " " << l.name << ";\n";
  for (const auto& s : m.body) out << "    " << printStatement(s) << "\n";
  out << "  }\n";
  return out.str();
}

std::string printProgram(const Program& p) {
  std::ostringstream out;
  for (std::size_t ci = 0; ci < p.classes.size(); ++ci) {
    const ClassDecl& c = p.classes[ci];
    if (ci) out << "\n";
    out << (c.is_interface ? "interface " : "class ") << c.name;
    if (c.is_interface) {
      if (!c.interfaces.empty()) out << " extends ";
    } else {
      if (!c.superclass.empty()) out << " extends " << c.superclass;
      if (!c.interfaces.empty()) out << " implements ";
    }
    for (std::size_t i = 0; i < c.interfaces.size(); ++i) out << (i ? ", " : "") << c.interfaces[i];
    out << " {\n";
    for (const auto& f : c.fields) out << "  " << f.type << " " << f.name << ";\n";
    for (const auto& m : c.methods) out << printMethod(m);
    out << "}\n";
  }
  return out.str();
}

}  // namespace symsum::ir
