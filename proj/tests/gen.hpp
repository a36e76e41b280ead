#pragma once

// Random structured programs in the textual IR. Control flow is built from
// forward branches and counted loops, so every generated CFG is reducible.

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace gen {

struct Callee {
  std::string cls, name;
  bool is_static = true;
  std::vector<std::string> params;  // "int" or "N"
  std::string ret = "void";         // "void", "int" or "N"
};

struct MethodShape {
  std::string cls = "C", name = "m";
  bool is_static = true;
  std::string ret = "int";
  std::vector<std::string> params;
  int prim_locals = 1, ref_locals = 1;
  int budget = 8;  // simple statements to place
  int max_depth = 2;
  bool branches = true, loops = false, heap = true, outputs = true, early_returns = true;
  bool sinks = false;  // calls to Out.send
  std::vector<Callee> callees;
  std::vector<std::string> prologue;  // statements placed first, verbatim
};

struct Method {
  std::string text;
  int statements = 0;
  std::set<std::string> called;  // "Cls.name" of every call placed
};

/// Classes every generated program shares. `nMethods` and `mMethods` are
/// member texts for the two node classes.
inline std::string prelude(const std::string& nMethods = "", const std::string& mMethods = "") {
  return "\nclass N {\n  int v;\n  N next;\n" + nMethods + "}\nclass M extends N {\n" + mMethods +
         "}\n" + R"(class Out {
  static native void send(int v);
  static native void sendObj(N o);
  static native int recv();
}
)";
}

inline const char* kStubs = R"(
static void Out:send(int v) { sink; }
static void Out:sendObj(N o) { sink; }
static int Out:recv() { source p0; }
)";

class MethodWriter {
 public:
  MethodWriter(std::mt19937_64& rng, const MethodShape& shape) : rng_(rng), s_(shape) {}

  Method write() {
    int pi = 0, ri = 0;
    std::vector<std::string> formals;
    for (const auto& t : s_.params) {
      std::string n = t == "int" ? "a" + std::to_string(pi++) : "r" + std::to_string(ri++);
      (t == "int" ? prims_ : refs_).push_back(n);
      formals.push_back(t + " " + n);
    }
    std::vector<std::string> localPrims, localRefs;
    for (int i = 0; i < s_.prim_locals; ++i) localPrims.push_back("x" + std::to_string(i));
    for (int i = 0; i < s_.ref_locals; ++i) localRefs.push_back("s" + std::to_string(i));
    prims_.insert(prims_.end(), localPrims.begin(), localPrims.end());
    refs_.insert(refs_.end(), localRefs.begin(), localRefs.end());
    if (!s_.is_static) refs_.push_back("this");

    for (const auto& p : s_.prologue) {
      if (!p.empty() && p.back() == ':') lines_.push_back("  " + p);
      else emit(p);
    }
    block(s_.budget, 0);
    emitReturn();

    std::ostringstream o;
    o << "  " << (s_.is_static ? "static " : "") << s_.ret << " " << s_.name << "(";
    for (std::size_t i = 0; i < formals.size(); ++i) o << (i ? ", " : "") << formals[i];
    o << ") {\n";
    if (!localPrims.empty() || loopDepth_ > 0) {
      o << "    int ";
      std::vector<std::string> all = localPrims;
      for (int i = 0; i < loopDepth_; ++i) all.push_back("k" + std::to_string(i));
      for (std::size_t i = 0; i < all.size(); ++i) o << (i ? ", " : "") << all[i];
      o << ";\n";
    }
    if (!localRefs.empty()) {
      o << "    N ";
      for (std::size_t i = 0; i < localRefs.size(); ++i) o << (i ? ", " : "") << localRefs[i];
      o << ";\n";
    }
    for (auto line : lines_) {
      static const std::regex ref("@([0-9]+)@");
      std::string out;
      std::sregex_iterator it(line.begin(), line.end(), ref), end;
      std::size_t last = 0;
      for (; it != end; ++it) {
        out += line.substr(last, it->position() - last);
        out += "L" + std::to_string(resolve(std::stoi((*it)[1])));
        last = it->position() + it->length();
      }
      out += line.substr(last);
      o << out << "\n";
    }
    o << "  }\n";
    return {o.str(), count_, called_};
  }

 private:
  std::mt19937_64& rng_;
  MethodShape s_;
  std::vector<std::string> prims_, refs_;
  std::vector<std::string> lines_;
  int pending_ = -1;
  int nextLabel_ = 0;
  int count_ = 0;
  int loopDepth_ = 0;
  std::map<int, int> alias_;
  std::set<std::string> called_;

  int resolve(int l) const {
    auto it = alias_.find(l);
    return it == alias_.end() ? l : resolve(it->second);
  }
  int rand(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[rand(static_cast<int>(v.size()))]; }

  void emit(const std::string& s) {
    if (pending_ >= 0) {
      lines_.push_back("  L" + std::to_string(pending_) + ":");
      pending_ = -1;
    }
    lines_.push_back("    " + s);
    ++count_;
  }
  int fresh() { return nextLabel_++; }
  void place(int label) {
    if (pending_ >= 0) alias_[label] = pending_;
    else pending_ = label;
  }
  static std::string at(int label) { return "@" + std::to_string(label) + "@"; }

  std::string primOperand() {
    if (prims_.empty() || coin(0.25)) return std::to_string(rand(4));
    return pick(prims_);
  }
  std::string primExpr() {
    switch (rand(4)) {
      case 0: return primOperand();
      case 1: return pick(prims_) + " + " + primOperand();
      case 2: return pick(prims_) + " - " + primOperand();
      default: return pick(prims_) + " * " + primOperand();
    }
  }
  std::string cond() {
    if (!refs_.empty() && coin(0.3)) {
      const std::string& r = pick(refs_);
      if (coin(0.3) && refs_.size() > 1) return r + " == " + pick(refs_);
      return r + (coin(0.5) ? " == null" : " != null");
    }
    if (prims_.empty()) return "0 == 0";
    static const std::vector<std::string> ops = {"<", "==", "!=", "<="};
    return pick(prims_) + " " + pick(ops) + " " + primOperand();
  }
  std::vector<std::string> assignableRefs() const {
    std::vector<std::string> out;
    for (const auto& r : refs_)
      if (r != "this") out.push_back(r);
    return out;
  }

  void simple() {
    std::vector<int> kinds;
    if (!prims_.empty()) kinds.insert(kinds.end(), {0, 0, 0});
    if (s_.heap && !refs_.empty()) {
      if (!prims_.empty()) kinds.insert(kinds.end(), {1, 2});
      if (!assignableRefs().empty()) kinds.insert(kinds.end(), {3, 5, 6, 7});
      kinds.push_back(4);
    }
    if (s_.outputs) kinds.push_back(8);
    if (s_.sinks) kinds.push_back(9);
    if (!s_.callees.empty()) kinds.insert(kinds.end(), {10, 10});
    if (kinds.empty()) kinds.push_back(8);
    switch (pick(kinds)) {
      case 0: emit(pick(prims_) + " = " + primExpr() + ";"); break;
      case 1: emit(pick(prims_) + " = " + pick(refs_) + ".v;"); break;
      case 2: emit(pick(refs_) + ".v = " + primExpr() + ";"); break;
      case 3: emit(pick(assignableRefs()) + " = " + pick(refs_) + ".next;"); break;
      case 4: emit(pick(refs_) + ".next = " + pick(refs_) + ";"); break;
      case 5: emit(pick(assignableRefs()) + " = " + pick(refs_) + ";"); break;
      case 6: emit(pick(assignableRefs()) + (coin(0.7) ? " = new N;" : " = new M;")); break;
      case 7: emit(pick(assignableRefs()) + " = null;"); break;
      case 8:
        if (!refs_.empty() && coin(0.2)) emit("output(" + pick(refs_) + ");");
        else emit("output(" + primOperand() + ");");
        break;
      case 9:
        if (!refs_.empty() && coin(0.2)) emit("Out.sendObj(" + pick(refs_) + ");");
        else emit("Out.send(" + primOperand() + ");");
        called_.insert("Out.send");
        break;
      default: call(pick(s_.callees)); break;
    }
  }

  void call(const Callee& c) {
    std::vector<std::string> args;
    for (const auto& t : c.params) {
      if (t == "int") args.push_back(primOperand());
      else args.push_back(refs_.empty() ? "null" : pick(refs_));
    }
    std::string lhs;
    if (c.ret == "int" && !prims_.empty() && coin(0.8)) lhs = pick(prims_) + " = ";
    if (c.ret == "N" && !assignableRefs().empty() && coin(0.8)) lhs = pick(assignableRefs()) + " = ";
    std::string target;
    if (c.is_static) {
      target = c.cls + "." + c.name;
    } else {
      if (refs_.empty()) return emit(pick(prims_) + " = " + primExpr() + ";");
      target = pick(refs_) + "." + c.name;
    }
    std::string a;
    for (std::size_t i = 0; i < args.size(); ++i) a += (i ? ", " : "") + args[i];
    emit(lhs + target + "(" + a + ");");
    called_.insert(c.cls + "." + c.name);
  }

  std::string returnValue() {
    if (s_.ret == "int") return " " + primOperand();
    if (s_.ret == "N") return refs_.empty() || coin(0.1) ? " null" : " " + pick(refs_);
    return "";
  }
  void emitReturn() { emit("return" + returnValue() + ";"); }

  void block(int budget, int depth) {
    while (budget > 0) {
      int r = rand(10);
      if (s_.branches && depth < s_.max_depth && budget >= 2 && r < 2) {
        int inner = 1 + rand(std::min(budget - 1, 4));
        budget -= inner + 1;
        int end = fresh();
        if (coin(0.4)) {
          int then = fresh();
          emit("if (" + cond() + ") goto " + at(then) + ";");
          int left = std::max(1, inner / 2);
          block(left, depth + 1);
          emit("goto " + at(end) + ";");
          place(then);
          block(std::max(1, inner - left), depth + 1);
        } else {
          emit("if (" + cond() + ") goto " + at(end) + ";");
          block(inner, depth + 1);
          if (s_.early_returns && coin(0.15)) emitReturn();
        }
        place(end);
      } else if (s_.loops && depth < s_.max_depth && budget >= 3 && r == 2) {
        int inner = 1 + rand(std::min(budget - 2, 4));
        budget -= inner + 2;
        std::string k = "k" + std::to_string(depth);
        loopDepth_ = std::max(loopDepth_, depth + 1);
        int head = fresh(), end = fresh();
        emit(k + " = " + std::to_string(1 + rand(3)) + ";");
        place(head);
        emit("if (" + k + " <= 0) goto " + at(end) + ";");
        block(inner, depth + 1);
        emit(k + " = " + k + " - 1;");
        emit("goto " + at(head) + ";");
        place(end);
      } else {
        simple();
        --budget;
      }
    }
  }
};

inline Method writeMethod(std::mt19937_64& rng, const MethodShape& shape) {
  return MethodWriter(rng, shape).write();
}

/// Several methods of class C calling each other, plus an overridden
/// instance method on the node classes. Method i may call any method j > i,
/// and with `recursive` also itself or earlier ones.
struct ProgramShape {
  int methods = 4;
  int budget = 10;
  bool recursive = true;
  bool loops = true;
  bool dispatch = true;
  bool sinks = true;
  bool outputs = true;
  double back_edge = 0.3;
};

struct Program {
  std::string text;
  std::vector<Callee> methods;  // of class C, in order
  std::vector<Method> bodies;
};

inline Callee randomSignature(std::mt19937_64& rng, const std::string& cls, const std::string& name) {
  Callee c{cls, name, true, {}, "void"};
  int arity = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int i = 0; i < arity; ++i)
    c.params.push_back(std::bernoulli_distribution(0.35)(rng) ? "N" : "int");
  static const std::vector<std::string> rets = {"void", "int", "N"};
  c.ret = rets[std::uniform_int_distribution<int>(0, 2)(rng)];
  return c;
}

inline MethodShape shapeFor(const Callee& c, int budget) {
  MethodShape s;
  s.cls = c.cls;
  s.name = c.name;
  s.is_static = c.is_static;
  s.ret = c.ret;
  s.params = c.params;
  s.budget = budget;
  return s;
}

/// `lead` supplies statements placed first in m0, given its signature.
inline Program writeProgram(
    std::mt19937_64& rng, const ProgramShape& ps,
    const std::function<std::vector<std::string>(const Callee&)>& lead = {}) {
  Program out;
  for (int i = 0; i < ps.methods; ++i) out.methods.push_back(randomSignature(rng, "C", "m" + std::to_string(i)));
  Callee get{"N", "get", false, {"int"}, "int"};

  std::string nText, mText;
  if (ps.dispatch) {
    for (int k = 0; k < 2; ++k) {
      MethodShape s = shapeFor(get, std::max(2, ps.budget / 2));
      s.cls = k == 0 ? "N" : "M";
      s.loops = false;
      s.sinks = ps.sinks && k == 1;
      s.outputs = ps.outputs;
      Method m = writeMethod(rng, s);
      (k == 0 ? nText : mText) += m.text;
      out.bodies.push_back(m);
    }
  }
  std::string cText;
  std::uniform_int_distribution<int> budget(std::max(1, ps.budget / 2), ps.budget + ps.budget / 2);
  for (int i = 0; i < ps.methods; ++i) {
    MethodShape s = shapeFor(out.methods[i], budget(rng));
    s.loops = ps.loops;
    s.sinks = ps.sinks;
    s.outputs = ps.outputs;
    for (int j = i + 1; j < ps.methods; ++j) s.callees.push_back(out.methods[j]);
    if (ps.recursive)
      for (int j = 0; j <= i; ++j)
        if (std::bernoulli_distribution(ps.back_edge)(rng)) s.callees.push_back(out.methods[j]);
    if (ps.dispatch) s.callees.push_back(get);
    if (i == 0 && lead) s.prologue = lead(out.methods[0]);
    Method m = writeMethod(rng, s);
    cText += m.text;
    out.bodies.push_back(m);
  }
  out.text = prelude(nText, mText) + "class C {\n" + cText + "}\n";
  return out;
}

inline std::string randomType(std::mt19937_64& rng, double refShare = 0.35) {
  return std::bernoulli_distribution(refShare)(rng) ? "N" : "int";
}

}  // namespace gen
