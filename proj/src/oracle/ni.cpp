#include <deque>
#include <random>
#include <sstream>

#include "symsum/heap.hpp"
#include "symsum/oracle.hpp"

namespace symsum {

std::map<std::string, bool> concreteRelations(const Heap& h, const std::map<std::string, int>& roots,
                                              HeapModel model) {
  std::map<std::string, bool> out;
  std::map<std::string, std::vector<bool>> reach;
  for (const auto& [r, o] : roots) reach[r] = h.reach(o);
  for (const auto& [r, o] : roots)
    for (const auto& [s, p] : roots) {
      bool fact = false;
      if (model == HeapModel::LPrec) {
        for (std::size_t i = 0; i < h.objects.size() && !fact; ++i) fact = reach[r][i] && reach[s][i];
      } else {
        fact = p != kNullRef && reach[r][p];
      }
      bool& bit = out[names::rel(model, r, s)];
      bit = bit || fact;
    }
  return out;
}

namespace {

bool levelOf(const LevelAssignment& la, const std::string& name) {
  auto it = la.values.find(name);
  return it != la.values.end() && it->second;
}

// Objects whose contents are low: reachable from a reference whose object level is low.
std::vector<bool> lowContent(const ConcreteState& s, const LevelAssignment& la) {
  std::vector<int> roots;
  for (const auto& f : s.frames)
    for (const auto& [r, o] : f.refs)
      if (!levelOf(la, names::obj(r))) roots.push_back(o);
  return s.heap.reach(roots);
}

}  // namespace

bool lowEquivalent(const ConcreteState& a, const ConcreteState& b, const LevelAssignment& la,
                   HeapModel) {
  if (a.frames.size() != b.frames.size()) return false;
  std::map<int, int> ab, ba;
  std::deque<std::pair<int, int>> queue;
  auto bind = [&](int x, int y) {
    if ((x == kNullRef) != (y == kNullRef)) return false;
    if (x == kNullRef) return true;
    auto i = ab.find(x), j = ba.find(y);
    if (i != ab.end() || j != ba.end()) return i != ab.end() && j != ba.end() && i->second == y;
    ab[x] = y;
    ba[y] = x;
    queue.emplace_back(x, y);
    return true;
  };
  for (std::size_t k = 0; k < a.frames.size(); ++k) {
    const Frame &fa = a.frames[k], &fb = b.frames[k];
    if (fa.method != fb.method || fa.pc != fb.pc || fa.ret_target != fb.ret_target) return false;
    if (fa.prims.size() != fb.prims.size() || fa.refs.size() != fb.refs.size()) return false;
    for (const auto& [x, v] : fa.prims) {
      auto it = fb.prims.find(x);
      if (it == fb.prims.end()) return false;
      if (!levelOf(la, names::level(x)) && it->second != v) return false;
    }
    for (const auto& [r, o] : fa.refs) {
      auto it = fb.refs.find(r);
      if (it == fb.refs.end()) return false;
      if (!levelOf(la, names::level(r)) && !bind(o, it->second)) return false;
    }
  }
  auto lowA = lowContent(a, la), lowB = lowContent(b, la);
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    if (!lowA[x] && !lowB[y]) continue;
    const Object &ox = a.heap.objects[x], &oy = b.heap.objects[y];
    if (ox.cls != oy.cls || ox.prims != oy.prims || ox.refs.size() != oy.refs.size()) return false;
    for (const auto& [f, t] : ox.refs) {
      auto it = oy.refs.find(f);
      if (it == oy.refs.end() || !bind(t, it->second)) return false;
    }
  }
  return true;
}

bool tracesAgree(const Trace& a, const Trace& b, bool high_context) {
  if (high_context) return a.events.empty() && b.events.empty();
  const Trace& shorter = a.events.size() <= b.events.size() ? a : b;
  const Trace& longer = &shorter == &a ? b : a;
  for (std::size_t i = 0; i < shorter.events.size(); ++i)
    if (shorter.events[i] != longer.events[i]) return false;
  if (shorter.events.size() == longer.events.size()) return true;
  return shorter.end != Trace::End::Normal;
}

bool replayWitness(const Interpreter& in, const Witness& w, std::size_t fuel) {
  Trace a = in.run(w.first, fuel, w.first_sources);
  Trace b = in.run(w.second, fuel, w.second_sources);
  return !tracesAgree(a, b, w.levels.at(names::kPc));
}

namespace {

class PairGenerator {
 public:
  PairGenerator(const Interpreter& in, const ir::Method& m, const NiOptions& opts)
      : in_(in), m_(m), opts_(opts), rng_(opts.seed) {}

  int value() { return std::uniform_int_distribution<int>(0, opts_.domain - 1)(rng_); }
  bool coin(int num, int den) { return std::uniform_int_distribution<int>(0, den - 1)(rng_) < num; }

  std::string concreteClass(const std::string& type) {
    const auto& h = in_.program().hierarchy;
    if (ir::isArrayType(type) || !h.has(type)) return type;
    auto subs = h.concreteSubtypes(type);
    if (subs.empty()) return type;
    return subs[std::uniform_int_distribution<std::size_t>(0, subs.size() - 1)(rng_)];
  }

  bool fits(const std::string& cls, const std::string& type) const {
    const auto& h = in_.program().hierarchy;
    if (cls == type) return true;
    if (h.has(cls) && h.has(type)) return h.subtype(cls, type);
    return type == "Object" && !ir::isArrayType(cls);
  }

  // Null, an existing compatible object, or a fresh one while room remains.
  int pick(Heap& h, const std::string& type, std::deque<int>& pending, int nullOdds,
           bool allowNew = true) {
    if (coin(nullOdds, 4)) return kNullRef;
    std::vector<int> options;
    for (std::size_t o = 0; o < h.objects.size(); ++o)
      if (fits(h.objects[o].cls, type)) options.push_back(static_cast<int>(o));
    bool room = allowNew && static_cast<int>(h.objects.size()) < opts_.max_objects;
    if (room && (options.empty() || coin(1, 2))) {
      Object o;
      o.cls = concreteClass(type);
      for (const auto& f : in_.fieldsOf(o.cls)) {
        if (ir::isRefType(f.type)) o.refs[f.name] = kNullRef;
        else o.prims[f.name] = value();
      }
      h.objects.push_back(std::move(o));
      pending.push_back(static_cast<int>(h.objects.size()) - 1);
      return pending.back();
    }
    if (options.empty()) return kNullRef;
    return options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng_)];
  }

  void fillFields(Heap& h, std::deque<int>& pending) {
    while (!pending.empty()) {
      int o = pending.front();
      pending.pop_front();
      for (const auto& f : in_.fieldsOf(h.objects[o].cls))
        if (ir::isRefType(f.type)) h.objects[o].refs[f.name] = pick(h, f.type, pending, 2);
    }
  }

  std::pair<std::map<std::string, int>, Heap> firstHeap() {
    Heap h;
    std::map<std::string, int> roots;
    std::deque<int> pending;
    for (const auto& r : m_.refArgs()) roots[r] = pick(h, m_.typeOf(r), pending, r == "this" ? 0 : 1);
    fillFields(h, pending);
    return {roots, h};
  }

  // Varies everything the levels mark high, keeping low contents and low roots.
  std::pair<std::map<std::string, int>, Heap> secondHeap(const std::map<std::string, int>& roots,
                                                         const Heap& first,
                                                         const LevelAssignment& la) {
    Heap h = first;
    std::map<std::string, int> out = roots;
    std::deque<int> none;
    for (auto& [r, o] : out)
      if (la.at(names::level(r))) o = pick(h, m_.typeOf(r), none, r == "this" ? 0 : 1, false);
    std::vector<int> lowRoots;
    for (const auto& r : m_.refArgs())
      if (!la.at(names::obj(r))) {
        lowRoots.push_back(roots.at(r));
        lowRoots.push_back(out.at(r));
      }
    auto low = first.reach(lowRoots);
    for (std::size_t o = 0; o < h.objects.size(); ++o) {
      if (low[o]) continue;
      for (auto& [f, v] : h.objects[o].prims) v = value();
      for (const auto& f : in_.fieldsOf(h.objects[o].cls))
        if (ir::isRefType(f.type)) h.objects[o].refs[f.name] = pick(h, f.type, none, 2, false);
    }
    return {out, h};
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  const Interpreter& in_;
  const ir::Method& m_;
  NiOptions opts_;
  std::mt19937_64 rng_;
};

std::string describe(const Witness& w) {
  std::ostringstream out;
  out << "levels:";
  for (const auto& [k, v] : w.levels.values) out << ' ' << k << '=' << (v ? 1 : 0);
  auto side = [&](const char* name, const ConcreteState& s, const std::map<std::string, long long>& src,
                  const Trace& t) {
    out << "\n" << name << ':';
    const Frame& f = s.frames.front();
    for (const auto& x : f.method->argNames()) {
      if (auto it = f.prims.find(x); it != f.prims.end()) out << ' ' << x << '=' << it->second;
      else out << ' ' << x << '=' << serializeRef(s.heap, f.refs.at(x));
    }
    for (const auto& [p, v] : src) out << ' ' << p << '=' << v;
    out << "\n  trace:";
    for (const auto& e : t.events) out << " [" << e << ']';
    if (t.end == Trace::End::Fuel) out << " (out of fuel)";
    if (t.end == Trace::End::Fault) out << " (fault: " << t.fault << ')';
  };
  side("first", w.first, w.first_sources, w.first_trace);
  side("second", w.second, w.second_sources, w.second_trace);
  return out.str();
}

}  // namespace

Verdict checkNoninterference(const Interpreter& in, const ir::MethodSig& sig, const PortableSym& guard,
                             const NiOptions& opts) {
  const ir::Method& m = in.method(sig);
  HeapModel model = in.table().summaries.at(sig).model;

  std::set<std::string> sources;
  for (const auto& [s, sum] : in.table().summaries)
    if (sum.stub == Summary::StubKind::Source) sources.insert(sum.source_symbol);
  std::vector<std::string> levelVars{names::kPc};
  for (const auto& x : m.argNames()) levelVars.push_back(names::level(x));
  for (const auto& r : m.refArgs()) levelVars.push_back(names::obj(r));
  levelVars.insert(levelVars.end(), sources.begin(), sources.end());
  for (const auto& n : guard.names)
    if (names::isSource(n) && !sources.count(n)) {
      sources.insert(n);
      levelVars.push_back(n);
    }

  const std::size_t L = levelVars.size();
  const bool enumerate = L <= 16;
  const std::size_t assignments = enumerate ? std::size_t{1} << L : opts.trials;
  const std::size_t perAssignment = std::max<std::size_t>(1, opts.trials / assignments);

  PairGenerator gen(in, m, opts);
  Verdict verdict;
  for (std::size_t a = 0; a < assignments; ++a) {
    LevelAssignment la;
    for (std::size_t i = 0; i < L; ++i)
      la.values[levelVars[i]] = enumerate ? (a >> i & 1) : gen.coin(1, 2);

    // primitive inputs: one value when low, a pair when high
    std::vector<std::pair<std::string, bool>> inputs;  // name, high
    for (const auto& x : m.args())
      if (!x.isRef()) inputs.emplace_back(x.name, la.at(names::level(x.name)));
    for (const auto& p : sources) inputs.emplace_back(p, la.at(p));
    std::size_t space = 1;
    for (const auto& [x, high] : inputs) {
      space *= high ? opts.domain * opts.domain : opts.domain;
      if (space > perAssignment) break;
    }
    const bool exhaustive = space <= perAssignment;
    const std::size_t runs = exhaustive ? space : perAssignment;

    for (std::size_t k = 0; k < runs; ++k) {
      std::map<std::string, long long> v1, v2;
      std::size_t code = k;
      for (const auto& [x, high] : inputs) {
        long long first, second;
        if (exhaustive) {
          first = static_cast<long long>(code % opts.domain);
          code /= opts.domain;
          second = first;
          if (high) {
            second = static_cast<long long>(code % opts.domain);
            code /= opts.domain;
          }
        } else {
          first = gen.value();
          second = high ? gen.value() : first;
        }
        v1[x] = first;
        v2[x] = second;
      }
      for (int attempt = 0; attempt < 4; ++attempt) {
        auto [roots1, heap1] = gen.firstHeap();
        auto [roots2, heap2] = gen.secondHeap(roots1, heap1, la);
        LevelAssignment full = la;
        for (const auto& [n, bit] : concreteRelations(heap1, roots1, model)) full.values[n] = bit;
        for (const auto& [n, bit] : concreteRelations(heap2, roots2, model))
          full.values[n] = full.values[n] || bit;
        if (!guard.eval([&](const std::string& n) { return full.at(n); })) continue;

        std::map<std::string, long long> args1, args2, src1, src2;
        for (const auto& [x, high] : inputs) {
          auto& d1 = sources.count(x) ? src1 : args1;
          auto& d2 = sources.count(x) ? src2 : args2;
          d1[x] = v1[x];
          d2[x] = v2[x];
        }
        Witness w;
        w.levels = full;
        w.first = in.enter(sig, args1, roots1, heap1);
        w.second = in.enter(sig, args2, roots2, heap2);
        if (!lowEquivalent(w.first, w.second, full, model))
          throw std::logic_error("generated initial states are not low-equivalent");
        w.first_sources = src1;
        w.second_sources = src2;
        w.first_trace = in.run(w.first, opts.fuel, src1);
        w.second_trace = in.run(w.second, opts.fuel, src2);
        ++verdict.pairs;
        if (!tracesAgree(w.first_trace, w.second_trace, full.at(names::kPc))) {
          verdict.ok = false;
          verdict.counterexample = describe(w);
          verdict.witness = std::move(w);
          return verdict;
        }
        break;
      }
    }
  }
  verdict.vacuous = verdict.pairs == 0;
  return verdict;
}

}  // namespace symsum
