#include <algorithm>
#include <deque>
#include <functional>

#include "symsum/ir.hpp"

namespace symsum::ir {

ParseError::ParseError(const std::string& file, int line, int column, const std::string& what)
    : std::runtime_error(file + ":" + std::to_string(line) + ":" + std::to_string(column) +
                         ": " + what),
      line_(line),
      column_(column) {}

bool isPrimitiveType(const std::string& type) {
  static const std::set<std::string> prims = {"int",  "long",    "short", "byte",
                                              "char", "boolean", "bool"};
  return prims.count(type) != 0;
}

bool isArrayType(const std::string& type) {
  return type.size() > 2 && type.compare(type.size() - 2, 2, "[]") == 0;
}

// ---------------------------------------------------------------- hierarchy

void TypeHierarchy::add(const std::string& name, Node node) {
  if (!nodes_.emplace(name, std::move(node)).second)
    throw ProgramError("duplicate type " + name);
}

bool TypeHierarchy::has(const std::string& type) const {
  if (isPrimitiveType(type)) return true;
  if (isArrayType(type)) return has(type.substr(0, type.size() - 2));
  return nodes_.count(type) != 0;
}

bool TypeHierarchy::isInterface(const std::string& type) const {
  auto it = nodes_.find(type);
  return it != nodes_.end() && it->second.is_interface;
}

const TypeHierarchy::Node& TypeHierarchy::node(const std::string& type) const {
  auto it = nodes_.find(type);
  if (it == nodes_.end()) throw ProgramError("unknown type " + type);
  return it->second;
}

bool TypeHierarchy::subtype(const std::string& t, const std::string& u) const {
  if (!has(t)) throw ProgramError("unknown type " + t);
  if (!has(u)) throw ProgramError("unknown type " + u);
  if (t == u) return true;
  if (isPrimitiveType(t) || isPrimitiveType(u)) return isPrimitiveType(t) && isPrimitiveType(u);
  if (isArrayType(t) || isArrayType(u)) return false;
  std::set<std::string> seen{t};
  std::deque<std::string> queue{t};
  while (!queue.empty()) {
    const Node& n = node(queue.front());
    queue.pop_front();
    std::vector<std::string> parents = n.interfaces;
    if (!n.superclass.empty()) parents.push_back(n.superclass);
    for (const auto& p : parents) {
      if (p == u) return true;
      if (seen.insert(p).second) queue.push_back(p);
    }
  }
  return false;
}

std::vector<std::string> TypeHierarchy::concreteSubtypes(const std::string& t) const {
  std::vector<std::string> out;
  for (const auto& [name, n] : nodes_)
    if (!n.is_interface && subtype(name, t)) out.push_back(name);
  return out;
}

void TypeHierarchy::validate() const {
  for (const auto& [name, n] : nodes_) {
    if (!n.superclass.empty()) {
      auto it = nodes_.find(n.superclass);
      if (it == nodes_.end()) throw ProgramError(name + " extends unknown type " + n.superclass);
      if (it->second.is_interface != n.is_interface)
        throw ProgramError(name + " extends " + n.superclass + " of the wrong kind");
    }
    for (const auto& i : n.interfaces) {
      auto it = nodes_.find(i);
      if (it == nodes_.end()) throw ProgramError(name + " implements unknown type " + i);
      if (!it->second.is_interface) throw ProgramError(name + " implements class " + i);
    }
  }
  // cycle check by DFS colouring
  std::map<std::string, int> colour;
  std::function<void(const std::string&)> visit = [&](const std::string& v) {
    colour[v] = 1;
    const Node& n = nodes_.at(v);
    std::vector<std::string> parents = n.interfaces;
    if (!n.superclass.empty()) parents.push_back(n.superclass);
    for (const auto& p : parents) {
      if (colour[p] == 1) throw ProgramError("cyclic inheritance through " + p);
      if (colour[p] == 0) visit(p);
    }
    colour[v] = 2;
  };
  for (const auto& [name, n] : nodes_)
    if (colour[name] == 0) visit(name);
}

// ---------------------------------------------------------------- signatures

std::string MethodSig::str() const {
  std::string out = recv_type + "." + name + "(";
  for (std::size_t i = 0; i < arg_types.size(); ++i) {
    if (i) out += ",";
    out += arg_types[i];
  }
  return out + ")";
}

std::string MethodSig::fileStem() const {
  std::string out;
  for (char c : str()) {
    if (c == '(' || c == ')' || c == ',') out += '_';
    else if (c == '[' ) out += "Arr";
    else if (c == ']') continue;
    else out += c;
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

// ---------------------------------------------------------------- expressions

Expr Expr::integer(long long v) {
  Expr e;
  e.kind = Kind::Int;
  e.value = v;
  return e;
}

Expr Expr::null() {
  Expr e;
  e.kind = Kind::Null;
  return e;
}

Expr Expr::var(std::string n) {
  Expr e;
  e.kind = Kind::Var;
  e.name = std::move(n);
  return e;
}

Expr Expr::unary(std::string op, Expr a) {
  Expr e;
  e.kind = Kind::Unary;
  e.op = std::move(op);
  e.args.push_back(std::move(a));
  return e;
}

Expr Expr::binary(std::string op, Expr a, Expr b) {
  Expr e;
  e.kind = Kind::Binary;
  e.op = std::move(op);
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

void Expr::collectVars(std::set<std::string>& out) const {
  if (kind == Kind::Var) out.insert(name);
  for (const auto& a : args) a.collectVars(out);
}

std::set<std::string> Expr::vars() const {
  std::set<std::string> out;
  collectVars(out);
  return out;
}

// ---------------------------------------------------------------- statements

std::optional<std::string> Statement::assigned() const {
  switch (kind) {
    case StmtKind::AssignPrim:
    case StmtKind::LoadPrim:
    case StmtKind::LoadRef:
    case StmtKind::Copy:
    case StmtKind::New:
    case StmtKind::Null:
      return target;
    case StmtKind::Call:
      if (!target.empty()) return target;
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

std::set<std::string> Statement::uses() const {
  std::set<std::string> out;
  switch (kind) {
    case StmtKind::AssignPrim:
    case StmtKind::If:
      expr.collectVars(out);
      break;
    case StmtKind::LoadPrim:
    case StmtKind::LoadRef:
      out.insert(base);
      break;
    case StmtKind::StorePrim:
      out.insert(base);
      expr.collectVars(out);
      break;
    case StmtKind::StoreRef:
      out.insert(base);
      out.insert(source);
      break;
    case StmtKind::Copy:
      out.insert(source);
      break;
    case StmtKind::Call:
      if (!is_static) out.insert(receiver);
      for (const auto& a : args)
        if (a.isVar()) out.insert(a.name);
      break;
    case StmtKind::Output:
    case StmtKind::Return:
      if (value && value->isVar()) out.insert(value->name);
      break;
    default:
      break;
  }
  return out;
}

// ---------------------------------------------------------------- methods

MethodSig Method::sig() const {
  MethodSig s{class_name, name, {}};
  for (const auto& p : params) s.arg_types.push_back(p.type);
  return s;
}

std::vector<VarDecl> Method::args() const {
  std::vector<VarDecl> out;
  if (!is_static) out.push_back({class_name, "this"});
  out.insert(out.end(), params.begin(), params.end());
  return out;
}

std::vector<std::string> Method::argNames() const {
  std::vector<std::string> out;
  for (const auto& a : args()) out.push_back(a.name);
  return out;
}

std::vector<std::string> Method::refArgs() const {
  std::vector<std::string> out;
  for (const auto& a : args())
    if (a.isRef()) out.push_back(a.name);
  return out;
}

std::vector<std::string> Method::refVars() const {
  std::vector<std::string> out = refArgs();
  for (const auto& l : locals)
    if (l.isRef()) out.push_back(l.name);
  return out;
}

std::vector<std::string> Method::primVars() const {
  std::vector<std::string> out;
  for (const auto& a : args())
    if (!a.isRef()) out.push_back(a.name);
  for (const auto& l : locals)
    if (!l.isRef()) out.push_back(l.name);
  return out;
}

bool Method::isArg(const std::string& n) const {
  if (n == "this") return !is_static;
  return std::any_of(params.begin(), params.end(), [&](const VarDecl& d) { return d.name == n; });
}

std::optional<VarDecl> Method::lookup(const std::string& n) const {
  if (n == "this" && !is_static) return VarDecl{class_name, "this"};
  for (const auto& d : params)
    if (d.name == n) return d;
  for (const auto& d : locals)
    if (d.name == n) return d;
  return std::nullopt;
}

const std::string& Method::typeOf(const std::string& n) const {
  if (n == "this" && !is_static) return class_name;
  for (const auto& d : params)
    if (d.name == n) return d.type;
  for (const auto& d : locals)
    if (d.name == n) return d.type;
  throw ProgramError("unknown variable " + n + " in " + sig().str());
}

std::size_t Method::labelIndex(const std::string& label) const {
  for (std::size_t i = 0; i < body.size(); ++i)
    if (body[i].label == label) return i;
  throw ProgramError("unresolved label " + label + " in " + sig().str());
}

std::vector<std::size_t> Method::successors(std::size_t index) const {
  const Statement& s = body.at(index);
  switch (s.kind) {
    case StmtKind::Goto: return {labelIndex(s.jump)};
    case StmtKind::If: {
      std::size_t t = labelIndex(s.jump);
      if (t == index + 1) return {index + 1};
      return {index + 1, t};
    }
    case StmtKind::Return: return {body.size()};
    default: return {index + 1};
  }
}

// ---------------------------------------------------------------- program

const ClassDecl* Program::findClass(const std::string& name) const {
  for (const auto& c : classes)
    if (c.name == name) return &c;
  return nullptr;
}

std::optional<Field> Program::findField(const std::string& type, const std::string& field) const {
  if (isArrayType(type)) {
    if (field == "length") return Field{"int", "length"};
    return std::nullopt;
  }
  std::string cur = type;
  std::set<std::string> seen;
  while (!cur.empty() && seen.insert(cur).second) {
    const ClassDecl* c = findClass(cur);
    if (!c) return std::nullopt;
    for (const auto& f : c->fields)
      if (f.name == field) return f;
    cur = c->superclass;
  }
  return std::nullopt;
}

const Method* Program::findMethod(const MethodSig& sig) const {
  const ClassDecl* c = findClass(sig.recv_type);
  if (!c) return nullptr;
  for (const auto& m : c->methods)
    if (m.sig() == sig) return &m;
  return nullptr;
}

std::vector<const Method*> Program::methods() const {
  std::vector<const Method*> out;
  for (const auto& c : classes)
    for (const auto& m : c.methods) out.push_back(&m);
  return out;
}

std::vector<const Method*> Program::declared(const std::string& cls, const std::string& name,
                                             std::size_t arity) const {
  std::vector<const Method*> out;
  if (const ClassDecl* c = findClass(cls))
    for (const auto& m : c->methods)
      if (m.name == name && m.params.size() == arity) out.push_back(&m);
  return out;
}

}  // namespace symsum::ir
