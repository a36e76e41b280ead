#pragma once

// Reference semantics for testing: a concrete interpreter over small heaps
// and a paired-execution noninterference checker driven by a summary guard.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symsum/interproc.hpp"
#include "symsum/ir.hpp"
#include "symsum/summary.hpp"

namespace symsum {

inline constexpr int kNullRef = -1;

struct Object {
  std::string cls;
  std::map<std::string, long long> prims;
  std::map<std::string, int> refs;  // kNullRef for null
  bool operator==(const Object&) const = default;
};

struct Heap {
  std::vector<Object> objects;

  /// Objects reachable from `root` (inclusive), as a bitmask over indices.
  std::vector<bool> reach(int root) const;
  std::vector<bool> reach(const std::vector<int>& roots) const;
};

struct Frame {
  const ir::Method* method = nullptr;
  std::size_t pc = 0;
  std::map<std::string, long long> prims;
  std::map<std::string, int> refs;
  std::string ret_target;  // caller variable receiving the result
};

struct ConcreteState {
  std::vector<Frame> frames;  // innermost last
  Heap heap;
};

/// Values for a method's support: levels (⊤ = true), relation bits and source symbols.
struct LevelAssignment {
  std::map<std::string, bool> values;
  bool at(const std::string& name) const;
};

struct Trace {
  enum class End { Normal, Fuel, Fault };
  std::vector<std::string> events;
  End end = End::Normal;
  std::string fault;
};

/// Canonical text of the object graph reachable from `root`.
std::string serializeRef(const Heap& h, int root);

/// Interpreter over one program and its solved summary table. Methods with a
/// stub run the stub's concrete behaviour: a sink emits its arguments, a
/// source returns the value bound to its symbol and writes it into every
/// primitive field reachable from non-receiver reference arguments, other
/// stubs return a default value. Native methods without a stub act as sinks.
class Interpreter {
 public:
  Interpreter(const ir::Program& p, const SummaryTable& table);

  /// The initial state for `entry` with the given argument values.
  ConcreteState enter(const ir::MethodSig& entry, const std::map<std::string, long long>& prims,
                      const std::map<std::string, int>& refs, Heap heap) const;
  Trace run(ConcreteState state, std::size_t fuel,
            const std::map<std::string, long long>& sources) const;

  const ir::Method& method(const ir::MethodSig& sig) const;
  bool hasBody(const ir::MethodSig& sig) const { return bodies_.count(sig) != 0; }
  const ir::Program& program() const { return program_; }
  const SummaryTable& table() const { return table_; }
  /// All fields of a class including inherited ones; arrays have `length` and `$data`.
  std::vector<ir::Field> fieldsOf(const std::string& cls) const;

 private:
  const ir::Program& program_;
  const SummaryTable& table_;
  std::map<ir::MethodSig, ir::Method> bodies_;  // normalized
  std::set<ir::MethodSig> external_;
};

/// Low-equivalence of two states for one assignment: same locations and
/// stack shape, equal low primitives, and isomorphic low heaps with equal
/// low contents, matched by breadth-first labeling from the low roots.
bool lowEquivalent(const ConcreteState& a, const ConcreteState& b, const LevelAssignment& la,
                   HeapModel model);

/// Relation bits of a concrete state for the references of a method.
std::map<std::string, bool> concreteRelations(const Heap& h, const std::map<std::string, int>& roots,
                                              HeapModel model);

struct NiOptions {
  std::size_t trials = 4096;  // paired runs per method
  std::size_t fuel = 200;
  int domain = 4;             // primitive inputs range over 0..domain-1
  int max_objects = 4;
  std::uint64_t seed = 1;
};

/// A pair of initial states whose runs disagree.
struct Witness {
  LevelAssignment levels;
  ConcreteState first, second;
  std::map<std::string, long long> first_sources, second_sources;
  Trace first_trace, second_trace;
};

struct Verdict {
  bool ok = true;
  bool vacuous = false;  // the guard admitted no sampled context
  std::size_t pairs = 0;
  std::string counterexample;
  std::optional<Witness> witness;
};

/// Whether two traces of a pair count as indistinguishable. Under a high
/// context both must be silent.
bool tracesAgree(const Trace& a, const Trace& b, bool high_context);

/// Runs both sides of a witness again and reports whether they still disagree.
bool replayWitness(const Interpreter& in, const Witness& w, std::size_t fuel);

/// Searches for two guard-satisfying, low-equivalent initial states of `m`
/// whose observation traces differ. A shorter trace may be a prefix of the
/// other only when its run stopped on fuel or a fault.
/// Witness states refer to the bodies held by `in`.
Verdict checkNoninterference(const Interpreter& in, const ir::MethodSig& m, const PortableSym& guard,
                             const NiOptions& opts);

}  // namespace symsum
