#pragma once

// Whole-program summary computation: call-target resolution over the class
// hierarchy, and chaotic iteration over strongly connected components of the
// call graph.

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "symsum/infer.hpp"
#include "symsum/ir.hpp"
#include "symsum/summary.hpp"

namespace symsum {

/// Raised when some component keeps changing past the iteration ceiling.
class NonTermination : public std::runtime_error {
 public:
  NonTermination(const std::string& what, std::vector<ir::MethodSig> scc)
      : std::runtime_error(what), scc_(std::move(scc)) {}
  const std::vector<ir::MethodSig>& component() const { return scc_; }

 private:
  std::vector<ir::MethodSig> scc_;
};

/// Summary guards that were weakened between two iterations.
class MonotonicityViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Methods a call may dispatch to: every concrete subtype of the receiver's
/// static type contributes the nearest matching declaration on its
/// superclass chain. Signatures in `external` count as declarations.
std::vector<ir::MethodSig> resolveTargets(const ir::Program& p, const ir::Method& caller,
                                          const ir::Statement& call,
                                          const std::set<ir::MethodSig>& external);

/// Shape of a call site that resolves to nothing, built from the actuals.
MethodShape unresolvedShape(const ir::Method& caller, const ir::Statement& call);

struct CallGraph {
  /// Per analyzed method, per call statement, the resolved targets.
  std::map<ir::MethodSig, std::map<std::size_t, std::vector<ir::MethodSig>>> sites;
  std::set<ir::MethodSig> analyzed;

  std::set<ir::MethodSig> callees(const ir::MethodSig& m) const;
  /// Components of analyzed methods, callees before callers.
  std::vector<std::vector<ir::MethodSig>> components() const;
};

CallGraph buildCallGraph(const ir::Program& p, const std::set<ir::MethodSig>& external);

struct SolveOptions {
  HeapModel model = HeapModel::LPrec;
  std::size_t max_nodes = 4'000'000;
  std::size_t max_iters = 64;  // inferences per method
};

struct MethodReport {
  Provenance provenance = Provenance::Inferred;
  std::string note;  // why the method was skipped, if it was
  std::size_t inferences = 0;
  InferStats stats;
  /// Guards of successive inferences while solving.
  std::vector<PortableSym> history;
};

struct SummaryTable {
  std::map<ir::MethodSig, Summary> summaries;
  std::map<ir::MethodSig, MethodReport> reports;
  /// Synthetic summaries for call sites without any target, per caller and statement.
  std::map<std::pair<ir::MethodSig, std::size_t>, Summary> unresolved;
  std::vector<std::string> diagnostics;
  /// Resolved targets per analyzed method and call statement.
  std::map<ir::MethodSig, std::map<std::size_t, std::vector<ir::MethodSig>>> sites;

  const Summary* find(const ir::MethodSig& sig) const;
};

/// Summaries standing for call statement `stmt` of `caller` (normalized body).
std::vector<const Summary*> callTargets(const SummaryTable& t, const ir::MethodSig& caller,
                                        std::size_t stmt);

/// `guard(a) ⇒ guard(b)` for two summaries of the same signature.
bool guardEntails(const Summary& a, const Summary& b);

/// Solves all methods with a body. Stubs replace bodies of the same
/// signature; native methods without a stub get the pessimistic summary.
SummaryTable solveProgram(const ir::Program& p, const std::map<ir::MethodSig, Summary>& stubs,
                          const SolveOptions& opts);

}  // namespace symsum
