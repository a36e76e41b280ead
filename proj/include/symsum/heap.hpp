#pragma once

// Symbolic heap abstraction: per-reference object levels plus a binary
// relation over references, in two flavours.
//
//   LPrec  share_r_s   r and s may reach a common object (symmetric)
//   HPrec  falias_r_s  r may reach the object of s through fields (directed)
//
// In both models the reflexive bit (share_r_r / falias_r_r) means "r may be
// non-null".

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "symsum/symlat.hpp"

namespace symsum {

enum class HeapModel { LPrec, HPrec };

HeapModel parseHeapModel(const std::string& text);
const char* toString(HeapModel m);

namespace names {

inline constexpr const char* kPc = "pc";
inline constexpr const char* kUpsilon = "upsilon";
inline constexpr const char* kRet = "ret";

std::string level(const std::string& x);
std::string obj(const std::string& r);
/// Relation variable name; LPrec orders the pair lexicographically.
std::string rel(HeapModel m, const std::string& r, const std::string& s);
std::string snapshot(const std::string& var);
bool isSnapshot(const std::string& var);
std::string plain(const std::string& var);
bool isSource(const std::string& var);  // p<k>

}  // namespace names

/// The heap variable set V_h for a list of references.
struct HeapVars {
  HeapModel model = HeapModel::LPrec;
  std::vector<std::string> refs;

  std::vector<std::string> objVars() const;
  /// C(n,2)+n names for LPrec, n^2 for HPrec; sorted.
  std::vector<std::string> relVars() const;
  std::vector<std::string> all() const;
  /// Relation variables whose pair lies inside `subset`.
  std::vector<std::string> relVarsAmong(const std::vector<std::string>& subset) const;
  std::vector<SymVarDecl> decls(VarRole role) const;
};

/// Transfer functions over a store that declares the variables of a HeapVars.
/// Every update is a simultaneous assignment over pre-state expressions.
class HeapOps {
 public:
  HeapOps(Store& store, HeapVars vars);

  const HeapVars& vars() const { return vars_; }
  HeapModel model() const { return vars_.model; }
  Store& store() const { return store_; }
  bool has(const std::string& r) const;

  Sym obj(const std::string& r) const;
  Sym rel(const std::string& r, const std::string& s) const;
  Sym nonNull(const std::string& r) const { return rel(r, r); }
  /// The objects reachable from t may include the object of r, i.e. a store
  /// through r may change something t can observe.
  Sym sees(const std::string& t, const std::string& r) const;
  /// t and a may reach a common object.
  Sym touch(const std::string& t, const std::string& a) const;

  SymUpdate copy(const std::string& r, const std::string& s) const;
  SymUpdate nullify(const std::string& r) const;
  SymUpdate alloc(const std::string& r, Sym object_level) const;
  SymUpdate load(const std::string& r, const std::string& s) const;
  SymUpdate storePrim(const std::string& r, Sym cap) const;
  SymUpdate storeRef(const std::string& r, const std::string& s, Sym cap) const;

  /// Bindings that read the variables of `ret` from those of `r`
  /// (r = nullopt means a null return).
  Bindings extendWithReturn(const std::string& ret, const std::optional<std::string>& r) const;

  /// h ⊑_H h^r restricted to `subset`: object levels below their snapshots
  /// and every (reflexively closed) relation fact present in the snapshot.
  /// `alias` redirects the live variables of a name to another reference
  /// (nullopt = null), which realises h[π ← r].
  Sym order(const std::vector<std::string>& subset,
            const std::map<std::string, std::optional<std::string>>& alias = {}) const;

 private:
  Sym relOrConst(const std::optional<std::string>& a, const std::optional<std::string>& b) const;
  Store& store_;
  HeapVars vars_;
};

}  // namespace symsum
