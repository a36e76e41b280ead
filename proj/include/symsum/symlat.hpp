#pragma once

// Symbolic core: the two-point security lattice, a reduced ordered decision
// diagram store that gives predicates and level expressions a canonical form,
// and the operations the analysis needs on top of it.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <string>
#include <unordered_map>
#include <vector>

namespace symsum {

enum class Level : bool { Low = false, High = true };

inline Level join(Level a, Level b) {
  return (a == Level::High || b == Level::High) ? Level::High : Level::Low;
}
inline bool flowsTo(Level a, Level b) { return a == Level::Low || b == Level::High; }
const char* toString(Level l);

enum class Sort { Bool, Level };
enum class VarRole { State, Input, Snapshot };

struct SymVarDecl {
  std::string name;
  Sort sort = Sort::Level;
  VarRole role = VarRole::State;
};

/// Thrown when a store grows past its node ceiling. The interprocedural
/// solver turns it into a pessimistic summary for the method being analyzed.
class NodeLimitExceeded : public std::runtime_error {
 public:
  explicit NodeLimitExceeded(std::size_t limit);
};

class SymError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Store;

/// Handle to a canonical node in a Store. Level expressions use the same
/// representation with ⊤ encoded as true, so ⊔ is ∨ and l ⊑ l' is l ⇒ l'.
class Sym {
 public:
  Sym() = default;
  Sym(Store* store, std::uint32_t id) : store_(store), id_(id) {}

  std::uint32_t id() const { return id_; }
  Store* store() const { return store_; }
  bool valid() const { return store_ != nullptr; }
  bool isTrue() const { return id_ == 1; }
  bool isFalse() const { return id_ == 0; }
  bool isConst() const { return id_ < 2; }

  friend bool operator==(const Sym& a, const Sym& b) { return a.id_ == b.id_; }
  friend bool operator!=(const Sym& a, const Sym& b) { return a.id_ != b.id_; }

  Sym operator!() const;
  friend Sym operator&(const Sym& a, const Sym& b);
  friend Sym operator|(const Sym& a, const Sym& b);
  friend Sym operator^(const Sym& a, const Sym& b);

 private:
  Store* store_ = nullptr;
  std::uint32_t id_ = 0;
};

/// A decision diagram detached from any store, keyed by variable names.
/// Because every store orders variables by the same name-derived key, two
/// portable diagrams denote the same function iff they compare equal.
struct PortableSym {
  struct Node {
    std::uint32_t var;  // index into names
    std::uint32_t lo;   // 0 false, 1 true, k >= 2 nodes[k - 2]
    std::uint32_t hi;
    friend bool operator==(const Node&, const Node&) = default;
  };
  std::vector<std::string> names;
  std::vector<Node> nodes;
  std::uint32_t root = 0;

  static PortableSym constant(bool value);
  bool isTrue() const { return nodes.empty() && root == 1; }
  bool isFalse() const { return nodes.empty() && root == 0; }
  bool mentions(const std::string& name) const;
  bool eval(const std::function<bool(const std::string&)>& valuation) const;

  friend bool operator==(const PortableSym&, const PortableSym&) = default;
};

/// Maps variable name to replacement expression; missing names are kept.
using Bindings = std::map<std::string, Sym>;

/// Variable assignments; variables absent from the map are unchanged.
using SymUpdate = std::map<std::string, Sym>;

class Store {
 public:
  /// Variables are ordered by (role == Input, name); inputs come last.
  explicit Store(std::vector<SymVarDecl> vars, std::size_t max_nodes = 4'000'000);
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  Sym tt() { return {this, 1}; }
  Sym ff() { return {this, 0}; }
  Sym constant(bool b) { return b ? tt() : ff(); }
  Sym var(const std::string& name);
  Sym varAt(std::uint32_t index);
  bool has(const std::string& name) const { return index_.count(name) != 0; }
  std::uint32_t indexOf(const std::string& name) const;
  const SymVarDecl& decl(std::uint32_t index) const { return vars_[index]; }
  const SymVarDecl& decl(const std::string& name) const { return vars_[indexOf(name)]; }
  std::size_t varCount() const { return vars_.size(); }
  std::size_t nodeCount() const { return nodes_.size(); }
  std::size_t maxNodes() const { return max_nodes_; }

  Sym ite(Sym f, Sym g, Sym h);
  Sym lnot(Sym f) { return ite(f, ff(), tt()); }
  Sym land(Sym f, Sym g) { return ite(f, g, ff()); }
  Sym lor(Sym f, Sym g) { return ite(f, tt(), g); }
  Sym implies(Sym f, Sym g) { return ite(f, g, tt()); }
  Sym iff(Sym f, Sym g) { return ite(f, g, lnot(g)); }
  Sym lxor(Sym f, Sym g) { return ite(f, lnot(g), g); }

  /// Two-point lattice helpers under the boolean encoding.
  Sym levelJoin(Sym a, Sym b) { return lor(a, b); }
  Sym flowsTo(Sym a, Sym b) { return implies(a, b); }
  Sym isLow(Sym a) { return lnot(a); }

  Sym exists(Sym f, const std::vector<std::string>& names);
  Sym existsIdx(Sym f, const std::vector<std::uint32_t>& indices);
  Sym forall(Sym f, const std::vector<std::string>& names);
  /// Simultaneous substitution of variables by expressions.
  Sym substitute(Sym f, const Bindings& bindings);
  Sym compose(Sym f, const std::vector<std::optional<Sym>>& by_index);
  Sym cofactor(Sym f, std::uint32_t index, bool value);
  Sym cofactor(Sym f, const std::string& name, bool value) {
    return cofactor(f, indexOf(name), value);
  }
  /// Generalized cofactor: agrees with f wherever care holds.
  Sym restrict(Sym f, Sym care);
  bool entails(Sym p, Sym q) { return implies(p, q).isTrue(); }

  bool eval(Sym f, const std::vector<bool>& valuation_by_index) const;
  std::vector<std::uint32_t> support(Sym f) const;
  std::vector<std::string> supportNames(Sym f) const;
  std::size_t size(Sym f) const;

  PortableSym exportSym(Sym f) const;
  /// Rebuilds a portable diagram; each name is looked up through rename,
  /// which may return any expression (this doubles as substitution).
  Sym importSym(const PortableSym& p, const std::function<Sym(const std::string&)>& rename);
  Sym importSym(const PortableSym& p);

  /// Irredundant sum-of-products cover, each cube a list of (var, polarity).
  using Cube = std::vector<std::pair<std::uint32_t, bool>>;
  std::vector<Cube> isop(Sym f);

  // Raw node access for printers and explicit-state oracles.
  std::uint32_t topVar(Sym f) const { return nodes_[f.id()].var; }
  Sym low(Sym f) { return {this, nodes_[f.id()].lo}; }
  Sym high(Sym f) { return {this, nodes_[f.id()].hi}; }

 private:
  struct Node {
    std::uint32_t var;
    std::uint32_t lo;
    std::uint32_t hi;
  };
  struct Key3Hash {
    std::size_t operator()(const std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>& k) const {
      std::uint64_t h = std::get<0>(k);
      h = h * 0x9E3779B97F4A7C15ull ^ std::get<1>(k);
      h = h * 0x9E3779B97F4A7C15ull ^ std::get<2>(k);
      return static_cast<std::size_t>(h ^ (h >> 29));
    }
  };
  using Table = std::unordered_map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>,
                                   std::uint32_t, Key3Hash>;

  static constexpr std::uint32_t kTerminalVar = 0xFFFFFFFFu;

  std::uint32_t mk(std::uint32_t var, std::uint32_t lo, std::uint32_t hi);
  std::uint32_t iteRec(std::uint32_t f, std::uint32_t g, std::uint32_t h);
  std::uint32_t level(std::uint32_t id) const { return nodes_[id].var; }
  std::uint32_t restrictRec(std::uint32_t f, std::uint32_t c, Table& memo);
  std::pair<std::uint32_t, std::vector<Cube>> isopRec(std::uint32_t lower, std::uint32_t upper);

  std::vector<SymVarDecl> vars_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<Node> nodes_;
  Table unique_;
  Table ite_cache_;
  std::size_t max_nodes_;
};

/// Union of two updates; a key present in both is combined with ∨ (which is
/// ⊔ for level-sorted variables). Snapshot variables may not be keys.
SymUpdate mergeUpdates(Store& store, const SymUpdate& a, const SymUpdate& b);

/// Parses a summary-language expression into a store. Accepted syntax:
/// constants tt ff ⊥ ⊤ (also `bot`/`top`); ¬ ! ; ∧ & ⊓ ; ∨ | ⊔ V ; ⇒ -> ;
/// ⊑ <= ; `=` (equivalence); `if c then a else b`; parentheses. The
/// resolver maps identifiers to expressions and throws for unknown names.
Sym parseSymExpr(Store& store, const std::string& text,
                 const std::function<Sym(const std::string&)>& resolve);

enum class PrintStyle { Guard, Level, Bool };

/// Deterministic text rendering used by summary emission. Variables print
/// in the order: source symbols p<k>, pc, level_*, objlevel_*, the rest.
std::string printSym(Store& store, Sym f, PrintStyle style);

/// Ordering key used when printing joins.
int printRank(const std::string& name);

}  // namespace symsum
