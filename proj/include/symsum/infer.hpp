#pragma once

// Intra-procedural summary inference: backward co-reachability of bad
// states, cofactoring with the initial constants, and triangularization of
// the resulting constraint into an effect plus a residual guard.

#include <string>
#include <vector>

#include "symsum/scfg.hpp"
#include "symsum/summary.hpp"

namespace symsum {

/// Bad-state predicate per location.
using BadStates = std::vector<Sym>;

/// ¬φ(ℓ) where an invariant is installed, ff elsewhere.
BadStates initialBadStates(const Scfg& g);

/// Predecessor image of a location's bad states through one transition.
Sym preImage(const Scfg& g, const Transition& t, Sym bad_after);

/// Least fixed point of B = B0 ∪ pre(B). Throws std::logic_error when the
/// result fails the fixed-point check.
BadStates coreach(const Scfg& g, const BadStates& b0);

/// The constraint on entry states under which no bad state is reachable,
/// with every initial constant substituted.
Sym entryConstraint(const Scfg& g, const BadStates& b);

/// Least value of `var` satisfying `g` wherever some value does.
Sym minimize(Store& store, Sym g, const std::string& var);

struct Triangulation {
  SymUpdate effect;  // keyed by footprint (snapshot) names
  Sym guard;
};

/// Eliminates the footprint variables in order; the guard mentions none of
/// them and guard ∧ ⋀ (v = effect(v)) entails g.
Triangulation triangularize(Store& store, Sym g, const std::vector<std::string>& footprint);

struct InferStats {
  std::size_t locations = 0;
  std::size_t transitions = 0;
  std::size_t variables = 0;
  std::size_t nodes = 0;
  std::size_t fixpoint_rounds = 0;
};

/// Full pipeline for a normalized method with a body. Throws
/// NodeLimitExceeded or IrreducibleCfg when the method must be skipped.
Summary inferSummary(const ir::Method& m, const CallEnv& env, HeapModel model,
                     std::size_t max_nodes = 4'000'000, InferStats* stats = nullptr);

/// Packs a triangulation into a store-independent summary; checks that guard
/// and effects only read support variables.
Summary makeSummary(const Scfg& g, const Triangulation& t);

}  // namespace symsum
