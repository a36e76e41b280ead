#pragma once

// Method summaries ⟨guard, effect⟩ stored independently of any store, and
// their instantiation at a call site.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symsum/heap.hpp"
#include "symsum/ir.hpp"
#include "symsum/symlat.hpp"

namespace symsum {

enum class Provenance { Inferred, Stub, Pessimistic, Bottom };
const char* toString(Provenance p);

struct Summary {
  ir::MethodSig sig;
  HeapModel model = HeapModel::LPrec;
  std::vector<ir::VarDecl> formals;  // including `this` first for instance methods
  std::string return_type = "void";
  PortableSym guard = PortableSym::constant(true);
  /// One entry per footprint variable, keyed by its plain name.
  std::map<std::string, PortableSym> effect;
  Provenance provenance = Provenance::Inferred;
  /// Concrete behaviour of a stub in the interpreter.
  enum class StubKind { None, Sink, Source, Opaque } stub = StubKind::None;
  std::string source_symbol;  // p<k> for sources

  bool returnsValue() const { return !ir::isVoidType(return_type); }
  bool returnsRef() const { return ir::isRefType(return_type); }
  std::vector<std::string> formalNames() const;
  std::vector<std::string> refFormals() const;
  /// Source symbols mentioned by the guard or an effect.
  std::vector<std::string> sources() const;
  std::vector<std::string> supportVars() const;
  /// Footprint in processing order: level_ret, object levels, relations.
  std::vector<std::string> footprintVars() const;
  bool isIdentity(const std::string& footprint_var) const;
  bool guardIsTrue() const { return guard.isTrue(); }
  /// Guard and every effect are canonically equal.
  bool sameAs(const Summary& other) const;
};

/// The declarations of support and footprint variables of a summary shape.
std::vector<SymVarDecl> summaryDecls(HeapModel model, const std::vector<ir::VarDecl>& formals,
                                     const std::string& return_type,
                                     const std::vector<std::string>& sources);
std::vector<std::string> supportVarNames(HeapModel model, const std::vector<ir::VarDecl>& formals,
                                         const std::vector<std::string>& sources);
std::vector<std::string> footprintVarNames(HeapModel model,
                                           const std::vector<ir::VarDecl>& formals,
                                           const std::string& return_type);

/// Shape of a method seen from outside: signature, formals, return type.
struct MethodShape {
  ir::MethodSig sig;
  std::vector<ir::VarDecl> formals;
  std::string return_type = "void";
  static MethodShape of(const ir::Method& m);
};

/// Returns ⊥, mutates nothing, always callable.
Summary bottomSummary(const MethodShape& shape, HeapModel model);
/// Callable only with a low context and low arguments; returns ⊥, mutates nothing.
Summary pessimisticSummary(const MethodShape& shape, HeapModel model);
/// A sink: pessimistic shape; the interpreter outputs every argument.
Summary sinkSummary(const MethodShape& shape, HeapModel model);
/// A source of unknown sensitivity `symbol`: the result and every non-receiver
/// reference argument's objects may carry it.
Summary sourceSummary(const MethodShape& shape, HeapModel model, const std::string& symbol);

/// Footprint position of a summary seen from a call site. Index -1 is the
/// returned reference; other indices are argument positions.
struct SlotKey {
  enum class Kind { Level, Obj, Rel } kind = Kind::Level;
  int a = -1;
  int b = -1;
  auto operator<=>(const SlotKey&) const = default;
};

/// A callee summary (or the combination of several dispatch targets)
/// expressed over caller variables.
struct InstantiatedCall {
  Sym guard;
  std::map<SlotKey, Sym> effect;
  std::map<SlotKey, bool> identity;  // true when every target leaves the slot unchanged
  std::string return_type = "void";
  bool isIdentity(const SlotKey& k) const;
};

/// How callee support variables read in the caller: the level, object level
/// and relation of each argument position, and the calling context.
struct CallBinding {
  std::function<Sym(int)> level;
  std::function<Sym(int)> obj;
  std::function<Sym(int, int)> rel;
  Sym pc;
  /// Level of the receiver, used for the dispatch context when there are
  /// several targets; nullopt for static calls.
  std::optional<Sym> receiver_level;
};

/// Conjunction of guards and join of effects over all targets, each
/// instantiated through the binding; with several targets the calling
/// context is raised by the receiver's level.
InstantiatedCall combineSummaries(Store& store, const std::vector<const Summary*>& targets,
                                  const CallBinding& binding);

}  // namespace symsum
