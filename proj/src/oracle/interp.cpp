#include <deque>

#include "symsum/oracle.hpp"

namespace symsum {

using ir::StmtKind;

namespace {

struct Fault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

long long wrap(unsigned long long v) { return static_cast<long long>(v); }

}  // namespace

std::vector<bool> Heap::reach(int root) const { return reach(std::vector<int>{root}); }

std::vector<bool> Heap::reach(const std::vector<int>& roots) const {
  std::vector<bool> seen(objects.size(), false);
  std::vector<int> stack;
  for (int r : roots)
    if (r != kNullRef && !seen[r]) {
      seen[r] = true;
      stack.push_back(r);
    }
  while (!stack.empty()) {
    int o = stack.back();
    stack.pop_back();
    for (const auto& [f, t] : objects[o].refs)
      if (t != kNullRef && !seen[t]) {
        seen[t] = true;
        stack.push_back(t);
      }
  }
  return seen;
}

bool LevelAssignment::at(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) throw std::out_of_range("no value for " + name);
  return it->second;
}

std::string serializeRef(const Heap& h, int root) {
  if (root == kNullRef) return "null";
  std::map<int, int> label;
  std::deque<int> queue{root};
  label[root] = 0;
  std::string out;
  while (!queue.empty()) {
    int o = queue.front();
    queue.pop_front();
    const Object& obj = h.objects[o];
    out += "#" + std::to_string(label[o]) + ":" + obj.cls + "{";
    for (const auto& [f, v] : obj.prims) out += f + "=" + std::to_string(v) + ";";
    for (const auto& [f, t] : obj.refs) {
      out += f + "->";
      if (t == kNullRef) {
        out += "null;";
        continue;
      }
      auto [it, fresh] = label.emplace(t, static_cast<int>(label.size()));
      if (fresh) queue.push_back(t);
      out += "#" + std::to_string(it->second) + ";";
    }
    out += "}";
  }
  return out;
}

Interpreter::Interpreter(const ir::Program& p, const SummaryTable& table) : program_(p), table_(table) {
  for (const auto& [sig, s] : table.summaries)
    if (s.provenance == Provenance::Stub) external_.insert(sig);
  for (const ir::Method* m : p.methods())
    if (m->hasBody() && !external_.count(m->sig())) bodies_.emplace(m->sig(), ir::normalizeMethod(*m));
}

const ir::Method& Interpreter::method(const ir::MethodSig& sig) const {
  auto it = bodies_.find(sig);
  if (it == bodies_.end()) throw std::out_of_range("no body for " + sig.str());
  return it->second;
}

std::vector<ir::Field> Interpreter::fieldsOf(const std::string& cls) const {
  if (ir::isArrayType(cls)) return {{"int", "length"}, {"int", "$data"}};
  std::vector<ir::Field> out;
  std::set<std::string> seen;
  for (std::string c = cls; !c.empty() && seen.insert(c).second;) {
    const ir::ClassDecl* d = program_.findClass(c);
    if (!d) break;
    out.insert(out.end(), d->fields.begin(), d->fields.end());
    c = d->superclass;
  }
  return out;
}

ConcreteState Interpreter::enter(const ir::MethodSig& entry,
                                 const std::map<std::string, long long>& prims,
                                 const std::map<std::string, int>& refs, Heap heap) const {
  const ir::Method& m = method(entry);
  Frame f;
  f.method = &m;
  for (const auto& v : m.primVars()) f.prims[v] = 0;
  for (const auto& v : m.refVars()) f.refs[v] = kNullRef;
  for (const auto& [k, v] : prims) f.prims.at(k) = v;
  for (const auto& [k, v] : refs) f.refs.at(k) = v;
  ConcreteState s;
  s.frames.push_back(std::move(f));
  s.heap = std::move(heap);
  return s;
}

namespace {

class Machine {
 public:
  Machine(const Interpreter& in, ConcreteState& st, const std::map<std::string, long long>& sources,
          Trace& trace)
      : in_(in), st_(st), sources_(sources), trace_(trace) {}

  void step() {
    Frame& f = st_.frames.back();
    const ir::Method& m = *f.method;
    if (f.pc >= m.body.size()) {
      finish(std::nullopt);
      return;
    }
    const ir::Statement& s = m.body[f.pc];
    std::size_t next = f.pc + 1;
    switch (s.kind) {
      case StmtKind::AssignPrim: f.prims[s.target] = eval(f, s.expr); break;
      case StmtKind::LoadPrim: {
        const Object& o = deref(f, s.base);
        auto it = o.prims.find(s.field);
        f.prims[s.target] = it == o.prims.end() ? 0 : it->second;
        break;
      }
      case StmtKind::LoadRef: {
        const Object& o = deref(f, s.base);
        auto it = o.refs.find(s.field);
        f.refs[s.target] = it == o.refs.end() ? kNullRef : it->second;
        break;
      }
      case StmtKind::StorePrim: {
        long long v = eval(f, s.expr);
        deref(f, s.base).prims[s.field] = v;
        break;
      }
      case StmtKind::StoreRef: {
        int v = f.refs.at(s.source);
        deref(f, s.base).refs[s.field] = v;
        break;
      }
      case StmtKind::Copy: f.refs[s.target] = f.refs.at(s.source); break;
      case StmtKind::Null: f.refs[s.target] = kNullRef; break;
      case StmtKind::New: f.refs[s.target] = allocate(s.class_name); break;
      case StmtKind::Goto: next = m.labelIndex(s.jump); break;
      case StmtKind::If:
        if (eval(f, s.expr) != 0) next = m.labelIndex(s.jump);
        break;
      case StmtKind::Output: trace_.events.push_back("out " + show(f, *s.value)); break;
      case StmtKind::Return: finish(s.value); return;
      case StmtKind::Call: call(f, s); return;
    }
    st_.frames.back().pc = next;
  }

 private:
  Object& deref(Frame& f, const std::string& r) {
    int o = f.refs.at(r);
    if (o == kNullRef) throw Fault("null dereference of " + r);
    return st_.heap.objects[o];
  }

  int allocate(const std::string& cls) {
    Object o;
    o.cls = cls;
    for (const auto& fld : in_.fieldsOf(cls)) {
      if (ir::isRefType(fld.type)) o.refs[fld.name] = kNullRef;
      else o.prims[fld.name] = 0;
    }
    st_.heap.objects.push_back(std::move(o));
    return static_cast<int>(st_.heap.objects.size()) - 1;
  }

  long long eval(const Frame& f, const ir::Expr& e) {
    using K = ir::Expr::Kind;
    switch (e.kind) {
      case K::Int: return e.value;
      case K::Null: return kNullRef;
      case K::Var: {
        if (auto it = f.prims.find(e.name); it != f.prims.end()) return it->second;
        return f.refs.at(e.name);
      }
      case K::Unary: {
        long long a = eval(f, e.args[0]);
        return e.op == "-" ? wrap(0ull - static_cast<unsigned long long>(a)) : a == 0;
      }
      case K::Binary: {
        long long a = eval(f, e.args[0]);
        if (e.op == "&&" && a == 0) return 0;
        if (e.op == "||" && a != 0) return 1;
        long long b = eval(f, e.args[1]);
        auto ua = static_cast<unsigned long long>(a), ub = static_cast<unsigned long long>(b);
        if (e.op == "+") return wrap(ua + ub);
        if (e.op == "-") return wrap(ua - ub);
        if (e.op == "*") return wrap(ua * ub);
        if (e.op == "==") return a == b;
        if (e.op == "!=") return a != b;
        if (e.op == "<") return a < b;
        if (e.op == "<=") return a <= b;
        if (e.op == ">") return a > b;
        if (e.op == ">=") return a >= b;
        if (e.op == "&&" || e.op == "||") return b != 0;
        throw std::logic_error("unknown operator " + e.op);
      }
    }
    return 0;
  }

  std::string show(const Frame& f, const ir::Operand& o) {
    switch (o.kind) {
      case ir::Operand::Kind::Int: return std::to_string(o.value);
      case ir::Operand::Kind::Null: return "null";
      case ir::Operand::Kind::Var:
        if (auto it = f.prims.find(o.name); it != f.prims.end()) return std::to_string(it->second);
        return serializeRef(st_.heap, f.refs.at(o.name));
    }
    return "";
  }

  // Pops the current frame and delivers `value` to the caller.
  void finish(const std::optional<ir::Operand>& value) {
    Frame done = std::move(st_.frames.back());
    st_.frames.pop_back();
    if (st_.frames.empty()) return;
    Frame& caller = st_.frames.back();
    if (!done.ret_target.empty()) {
      if (!value) throw Fault("missing return value");
      deliver(caller, done.ret_target, operandValue(done, *value));
    }
    ++caller.pc;
  }

  struct Value {
    bool is_ref = false;
    long long prim = 0;
    int ref = kNullRef;
  };

  Value operandValue(const Frame& f, const ir::Operand& o) {
    switch (o.kind) {
      case ir::Operand::Kind::Int: return {false, o.value, kNullRef};
      case ir::Operand::Kind::Null: return {true, 0, kNullRef};
      case ir::Operand::Kind::Var:
        if (auto it = f.prims.find(o.name); it != f.prims.end()) return {false, it->second, kNullRef};
        return {true, 0, f.refs.at(o.name)};
    }
    return {};
  }

  void deliver(Frame& f, const std::string& var, const Value& v) {
    if (f.method->isRefVar(var)) f.refs[var] = v.is_ref ? v.ref : kNullRef;
    else f.prims[var] = v.is_ref ? 0 : v.prim;
  }

  ir::MethodSig dispatch(const Frame& f, const ir::Statement& s) {
    const auto& sites = in_.table().sites;
    auto it = sites.find(f.method->sig());
    if (it == sites.end()) throw std::logic_error("no call sites for " + f.method->sig().str());
    const auto& targets = it->second.at(f.pc);
    if (targets.empty()) throw Fault("call to " + s.method + " has no target");
    if (s.is_static) return targets.front();
    int recv = f.refs.at(s.receiver);
    if (recv == kNullRef) throw Fault("null receiver " + s.receiver);
    const auto& h = in_.program().hierarchy;
    std::set<std::string> seen;
    for (std::string c = st_.heap.objects[recv].cls; !c.empty() && seen.insert(c).second;) {
      for (const auto& t : targets)
        if (t.recv_type == c) return t;
      if (!h.has(c) || ir::isArrayType(c)) break;
      c = h.node(c).superclass;
    }
    throw Fault("no method " + s.method + " for a " + st_.heap.objects[recv].cls + " receiver");
  }

  void call(Frame& f, const ir::Statement& s) {
    ir::MethodSig target = dispatch(f, s);
    std::vector<Value> actuals;
    if (!s.is_static) actuals.push_back({true, 0, f.refs.at(s.receiver)});
    for (const auto& a : s.args) actuals.push_back(operandValue(f, a));

    if (!in_.hasBody(target)) {
      Value result = stub(in_.table().summaries.at(target), target, actuals);
      if (!s.target.empty()) deliver(f, s.target, result);
      ++f.pc;
      return;
    }
    const ir::Method& callee = in_.method(target);
    Frame nf;
    nf.method = &callee;
    nf.ret_target = s.target;
    for (const auto& v : callee.primVars()) nf.prims[v] = 0;
    for (const auto& v : callee.refVars()) nf.refs[v] = kNullRef;
    auto formals = callee.argNames();
    for (std::size_t i = 0; i < formals.size(); ++i) deliver(nf, formals[i], actuals.at(i));
    st_.frames.push_back(std::move(nf));
  }

  Value stub(const Summary& sum, const ir::MethodSig& sig, const std::vector<Value>& actuals) {
    switch (sum.stub) {
      case Summary::StubKind::Opaque: return {};
      case Summary::StubKind::Source: {
        long long v = sources_.at(sum.source_symbol);
        std::vector<int> roots;
        for (std::size_t i = 0; i < sum.formals.size(); ++i)
          if (sum.formals[i].name != "this" && actuals[i].is_ref) roots.push_back(actuals[i].ref);
        auto seen = st_.heap.reach(roots);
        for (std::size_t o = 0; o < seen.size(); ++o)
          if (seen[o])
            for (auto& [fld, val] : st_.heap.objects[o].prims) val = v;
        if (ir::isRefType(sum.return_type)) {
          int o = allocate(sum.return_type);
          for (auto& [fld, val] : st_.heap.objects[o].prims) val = v;
          return {true, 0, o};
        }
        return {false, v, kNullRef};
      }
      case Summary::StubKind::Sink:
      case Summary::StubKind::None: {
        std::string ev = "sink " + sig.str() + "(";
        for (std::size_t i = 0; i < actuals.size(); ++i) {
          if (i) ev += ",";
          ev += actuals[i].is_ref ? serializeRef(st_.heap, actuals[i].ref) : std::to_string(actuals[i].prim);
        }
        trace_.events.push_back(ev + ")");
        return {};
      }
    }
    return {};
  }

  const Interpreter& in_;
  ConcreteState& st_;
  const std::map<std::string, long long>& sources_;
  Trace& trace_;
};

}  // namespace

Trace Interpreter::run(ConcreteState state, std::size_t fuel,
                       const std::map<std::string, long long>& sources) const {
  Trace trace;
  Machine machine(*this, state, sources, trace);
  try {
    while (!state.frames.empty()) {
      if (fuel == 0) {
        trace.end = Trace::End::Fuel;
        return trace;
      }
      --fuel;
      machine.step();
    }
  } catch (const Fault& f) {
    trace.end = Trace::End::Fault;
    trace.fault = f.what();
  }
  return trace;
}

}  // namespace symsum
