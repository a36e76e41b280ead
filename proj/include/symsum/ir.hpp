#pragma once

// Intermediate language: a typed three-address form with classes, fields,
// labels, virtual and static calls, and an output statement.

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace symsum::ir {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Structural errors found after parsing (unknown names, bad jumps, ...).
class ProgramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool isPrimitiveType(const std::string& type);
bool isArrayType(const std::string& type);
inline bool isVoidType(const std::string& type) { return type == "void"; }
inline bool isRefType(const std::string& type) {
  return !isPrimitiveType(type) && !isVoidType(type);
}

class TypeHierarchy {
 public:
  struct Node {
    bool is_interface = false;
    std::string superclass;  // empty for roots
    std::vector<std::string> interfaces;
  };

  void add(const std::string& name, Node node);
  bool has(const std::string& type) const;
  bool isInterface(const std::string& type) const;
  const Node& node(const std::string& type) const;
  const std::map<std::string, Node>& nodes() const { return nodes_; }
  /// Reflexive-transitive closure of extends/implements. Primitive types are
  /// mutually compatible; array types are only subtypes of themselves.
  bool subtype(const std::string& t, const std::string& u) const;
  /// Concrete (non-interface) classes that are subtypes of t, sorted.
  std::vector<std::string> concreteSubtypes(const std::string& t) const;
  /// Throws ProgramError on an extends/implements cycle or a missing parent.
  void validate() const;

 private:
  std::map<std::string, Node> nodes_;
};

struct MethodSig {
  std::string recv_type;
  std::string name;
  std::vector<std::string> arg_types;

  auto operator<=>(const MethodSig&) const = default;
  bool operator==(const MethodSig&) const = default;
  /// `Class.name(T1,T2)`
  std::string str() const;
  /// File-name friendly rendering.
  std::string fileStem() const;
};

struct Expr {
  enum class Kind { Int, Null, Var, Unary, Binary };
  Kind kind = Kind::Int;
  long long value = 0;
  std::string name;  // Var
  std::string op;    // Unary: "-", "!"; Binary: + - * == != < <= > >= && ||
  std::vector<Expr> args;

  static Expr integer(long long v);
  static Expr null();
  static Expr var(std::string n);
  static Expr unary(std::string op, Expr a);
  static Expr binary(std::string op, Expr a, Expr b);
  void collectVars(std::set<std::string>& out) const;
  std::set<std::string> vars() const;
  bool operator==(const Expr&) const = default;
};

/// Call arguments and returned/output values: a variable, an integer or null.
struct Operand {
  enum class Kind { Var, Int, Null };
  Kind kind = Kind::Var;
  std::string name;
  long long value = 0;

  static Operand var(std::string n) { return {Kind::Var, std::move(n), 0}; }
  static Operand integer(long long v) { return {Kind::Int, "", v}; }
  static Operand null() { return {Kind::Null, "", 0}; }
  bool isVar() const { return kind == Kind::Var; }
  bool operator==(const Operand&) const = default;
};

enum class StmtKind {
  AssignPrim,  // v = e
  LoadPrim,    // v = r.f
  LoadRef,     // r = s.f
  StorePrim,   // r.f = e
  StoreRef,    // r.f = s
  Copy,        // r = s
  New,         // r = new C
  Null,        // r = null
  Goto,        // goto L
  If,          // if (e) goto L
  Call,        // [x =] r.m(w) | C.m(w)
  Output,      // output(y)
  Return,      // return [y]
};

struct Statement {
  StmtKind kind = StmtKind::Return;
  std::string label;   // empty when unlabeled
  std::string target;  // assigned variable (also call result)
  std::string base;    // dereferenced reference
  std::string field;
  std::string source;  // copied / stored reference
  std::string class_name;  // New; static call class
  std::string jump;        // Goto / If target label
  Expr expr;               // AssignPrim, StorePrim, If
  // Call
  bool is_static = false;
  std::string receiver;  // instance calls
  std::string method;
  std::vector<Operand> args;
  // Output / Return
  std::optional<Operand> value;
  int line = 0;

  bool isBranch() const { return kind == StmtKind::If; }
  bool isJump() const { return kind == StmtKind::Goto || kind == StmtKind::If; }
  bool mutatesHeap() const { return kind == StmtKind::StorePrim || kind == StmtKind::StoreRef; }
  /// Variable written by this statement, if any.
  std::optional<std::string> assigned() const;
  /// Variables read by this statement.
  std::set<std::string> uses() const;
};

struct VarDecl {
  std::string type;
  std::string name;
  bool isRef() const { return isRefType(type); }
  bool operator==(const VarDecl&) const = default;
};

struct Method {
  std::string class_name;
  std::string name;
  std::string return_type = "void";
  bool is_static = false;
  bool is_native = false;  // declared without a body
  std::vector<VarDecl> params;  // excluding `this`
  std::vector<VarDecl> locals;
  std::vector<Statement> body;

  MethodSig sig() const;
  bool hasBody() const { return !is_native; }
  bool returnsRef() const { return isRefType(return_type); }
  bool returnsPrim() const { return isPrimitiveType(return_type); }
  /// Formal arguments including `this` first for instance methods.
  std::vector<VarDecl> args() const;
  std::vector<std::string> argNames() const;
  std::vector<std::string> refArgs() const;
  std::vector<std::string> refVars() const;   // args and locals, args first
  std::vector<std::string> primVars() const;  // args and locals, args first
  bool isArg(const std::string& name) const;
  std::optional<VarDecl> lookup(const std::string& name) const;
  const std::string& typeOf(const std::string& name) const;
  bool isRefVar(const std::string& name) const { return isRefType(typeOf(name)); }
  /// Index of the statement carrying `label`.
  std::size_t labelIndex(const std::string& label) const;
  /// Successor statement indices; body.size() denotes the exit.
  std::vector<std::size_t> successors(std::size_t index) const;
};

struct Field {
  std::string type;
  std::string name;
  bool operator==(const Field&) const = default;
};

struct ClassDecl {
  std::string name;
  bool is_interface = false;
  std::string superclass;
  std::vector<std::string> interfaces;
  std::vector<Field> fields;
  std::vector<Method> methods;
};

struct Program {
  std::vector<ClassDecl> classes;
  TypeHierarchy hierarchy;

  const ClassDecl* findClass(const std::string& name) const;
  /// Field lookup along the superclass chain; arrays expose `length`.
  std::optional<Field> findField(const std::string& type, const std::string& field) const;
  const Method* findMethod(const MethodSig& sig) const;
  std::vector<const Method*> methods() const;
  /// Methods named `name` with `arity` formals declared directly in `cls`.
  std::vector<const Method*> declared(const std::string& cls, const std::string& name,
                                      std::size_t arity) const;
};

/// Parses `.sir` text. `file` only labels diagnostics. Several sources can be
/// merged with `merge` before validation.
Program parseProgram(const std::string& text, const std::string& file = "<input>");
Program parsePrograms(const std::vector<std::pair<std::string, std::string>>& files);
/// Checks names, labels, field accesses and statement typing. parseProgram
/// already calls it.
void validateProgram(Program& p);

std::string printExpr(const Expr& e);
std::string printStatement(const Statement& s);
std::string printMethod(const Method& m);
std::string printProgram(const Program& p);

/// Replaces every reference formal that is assigned in the body by a fresh
/// local copied from it on entry.
Method normalizeMethod(const Method& m);
void normalizeProgram(Program& p);

}  // namespace symsum::ir
