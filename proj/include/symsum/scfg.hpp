#pragma once

// Symbolic control-flow graph of one method: one location per statement plus
// the exit, guarded transitions with simultaneous updates, and the invariant
// map whose violation marks bad states.

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "symsum/heap.hpp"
#include "symsum/ir.hpp"
#include "symsum/summary.hpp"
#include "symsum/symlat.hpp"

namespace symsum {

class IrreducibleCfg : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Postdominator-based control structure. Node indices are statement
/// indices; body.size() is the exit.
struct ControlInfo {
  std::vector<std::size_t> ipdom;
  /// For branch statements, the statements control dependent on them.
  std::vector<std::vector<std::size_t>> region;
  /// Branches whose region holds the statement, closed transitively.
  std::vector<std::vector<std::size_t>> ctx;
  std::vector<bool> reachable;
};

/// Throws IrreducibleCfg when a retreating edge targets a non-dominator.
ControlInfo analyzeControl(const ir::Method& m);

/// Immediate dominators of a rooted graph; unreachable nodes map to npos.
std::vector<std::size_t> immediateDominators(std::size_t nodes, std::size_t root,
                                             const std::function<std::vector<std::size_t>(std::size_t)>& succ);

namespace names {
std::string retvarBit(std::size_t i);
std::string brlevel(std::size_t stmt);
std::string omega(std::size_t stmt);
}  // namespace names

struct Transition {
  std::size_t from = 0;
  std::size_t to = 0;
  Sym guard;
  SymUpdate update;
};

/// Call targets of a statement index (several for virtual dispatch).
using CallEnv = std::function<std::vector<const Summary*>(std::size_t stmt)>;

struct Scfg {
  ir::Method method;
  HeapModel model = HeapModel::LPrec;
  std::unique_ptr<Store> store;
  ControlInfo control;
  std::size_t exit = 0;
  std::vector<Transition> transitions;
  std::map<std::size_t, Sym> invariants;
  /// Variables fixed at entry; everything else is free.
  std::vector<std::pair<std::string, bool>> init_constants;
  /// Full initial predicate, including snapshot = live.
  Sym init;
  std::vector<std::string> inputs;
  std::vector<std::string> sources;
  /// Summary support and footprint (snapshot names, processing order).
  std::vector<std::string> support;
  std::vector<std::string> footprint;
  std::size_t retvar_bits = 0;
  std::vector<std::size_t> return_sites;  // statement index per site, site k is index k - 1

  std::size_t locations() const { return exit + 1; }
  std::vector<const Transition*> outgoing(std::size_t loc) const;
  /// ret-var = k as a predicate.
  Sym retvarIs(std::size_t k) const;
};

/// Builds the SCFG of a normalized method with a body.
Scfg buildScfg(const ir::Method& m, const CallEnv& env, HeapModel model,
               std::size_t max_nodes = 4'000'000);

/// Throws when some location has overlapping or non-exhaustive guards, or an
/// update writes a snapshot or source variable.
void checkWellFormed(const Scfg& g);

/// Graph-description text of the SCFG.
std::string dumpScfg(const Scfg& g);

}  // namespace symsum
