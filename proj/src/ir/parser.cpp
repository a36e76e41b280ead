#include <cctype>

#include "symsum/ir.hpp"

namespace symsum::ir {

namespace {

enum class T { Ident, Int, Punct, End };

struct Tok {
  T kind;
  std::string text;
  int line;
  int col;
};

std::vector<Tok> lex(const std::string& src, const std::string& file) {
  static const std::vector<std::string> puncts = {"==", "!=", "<=", ">=", "&&", "||", "[]",
                                                  "{",  "}",  "(",  ")",  ";",  ",",  ".",
                                                  "=",  "<",  ">",  "+",  "-",  "*",  "!",
                                                  ":",  "[",  "]"};
  std::vector<Tok> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    unsigned char c = src[i];
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    if (src.compare(i, 2, "//") == 0) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.compare(i, 2, "/*") == 0) {
      std::size_t end = src.find("*/", i + 2);
      if (end == std::string::npos) throw ParseError(file, line, col, "unterminated comment");
      advance(end + 2 - i);
      continue;
    }
    if (std::isalpha(c) || c == '_' || c == '$') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_' || src[j] == '$'))
        ++j;
      out.push_back({T::Ident, src.substr(i, j - i), line, col});
      advance(j - i);
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({T::Int, src.substr(i, j - i), line, col});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const auto& p : puncts) {
      if (src.compare(i, p.size(), p) == 0) {
        out.push_back({T::Punct, p, line, col});
        advance(p.size());
        matched = true;
        break;
      }
    }
    if (!matched)
      throw ParseError(file, line, col, std::string("unexpected character '") + src[i] + "'");
  }
  out.push_back({T::End, "", line, col});
  return out;
}

const std::set<std::string> kKeywords = {"class",  "interface", "extends", "implements",
                                         "static", "native",    "goto",    "if",
                                         "return", "output",    "new",     "null",
                                         "true",   "false",     "this"};
const std::set<std::string> kModifiers = {"public",   "private", "protected", "final",
                                          "abstract", "synchronized"};

class Parser {
 public:
  Parser(const std::string& text, std::string file) : file_(std::move(file)), toks_(lex(text, file_)) {}

  std::vector<ClassDecl> parse() {
    std::vector<ClassDecl> out;
    while (!at(T::End)) out.push_back(classDecl());
    return out;
  }

 private:
  const Tok& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at(T kind) const { return peek().kind == kind; }
  bool isPunct(const char* p, std::size_t k = 0) const {
    return peek(k).kind == T::Punct && peek(k).text == p;
  }
  bool isWord(const char* w, std::size_t k = 0) const {
    return peek(k).kind == T::Ident && peek(k).text == w;
  }
  [[noreturn]] void fail(const std::string& what, std::size_t k = 0) const {
    throw ParseError(file_, peek(k).line, peek(k).col, what);
  }
  void expectPunct(const char* p) {
    if (!isPunct(p)) fail(std::string("expected '") + p + "' but found '" + peek().text + "'");
    ++pos_;
  }
  void expectWord(const char* w) {
    if (!isWord(w)) fail(std::string("expected '") + w + "' but found '" + peek().text + "'");
    ++pos_;
  }
  std::string ident() {
    if (!at(T::Ident) || kKeywords.count(peek().text))
      fail("expected identifier but found '" + peek().text + "'");
    return toks_[pos_++].text;
  }
  std::string qualifiedName() {
    std::string n = ident();
    while (isPunct(".") && peek(1).kind == T::Ident) {
      pos_ += 1;
      n += "." + ident();
    }
    return n;
  }
  std::string type() {
    std::string t = qualifiedName();
    while (isPunct("[]") || (isPunct("[") && isPunct("]", 1))) {
      pos_ += isPunct("[]") ? 1 : 2;
      t += "[]";
    }
    return t;
  }
  // Looks ahead for `Type name` starting at the current token.
  bool looksLikeDecl() const {
    std::size_t k = 0;
    if (peek(k).kind != T::Ident || kKeywords.count(peek(k).text)) return false;
    ++k;
    while (peek(k).kind == T::Punct && peek(k).text == "." && peek(k + 1).kind == T::Ident) k += 2;
    while (true) {
      if (peek(k).kind == T::Punct && peek(k).text == "[]") ++k;
      else if (peek(k).kind == T::Punct && peek(k).text == "[" && peek(k + 1).text == "]") k += 2;
      else break;
    }
    return peek(k).kind == T::Ident && !kKeywords.count(peek(k).text);
  }

  ClassDecl classDecl() {
    ClassDecl c;
    while (at(T::Ident) && kModifiers.count(peek().text)) ++pos_;
    if (isWord("interface")) c.is_interface = true;
    else if (!isWord("class")) fail("expected 'class' or 'interface'");
    ++pos_;
    c.name = qualifiedName();
    if (isWord("extends")) {
      ++pos_;
      if (c.is_interface) {
        c.interfaces.push_back(qualifiedName());
        while (isPunct(",")) {
          ++pos_;
          c.interfaces.push_back(qualifiedName());
        }
      } else {
        c.superclass = qualifiedName();
      }
    }
    if (isWord("implements")) {
      if (c.is_interface) fail("interfaces cannot implement");
      ++pos_;
      c.interfaces.push_back(qualifiedName());
      while (isPunct(",")) {
        ++pos_;
        c.interfaces.push_back(qualifiedName());
      }
    }
    expectPunct("{");
    while (!isPunct("}")) {
      if (at(T::End)) fail("unterminated class body");
      member(c);
    }
    expectPunct("}");
    return c;
  }

  void member(ClassDecl& c) {
    bool is_static = false, is_native = false;
    while (at(T::Ident) && (kModifiers.count(peek().text) || isWord("static") || isWord("native"))) {
      if (isWord("static")) is_static = true;
      if (isWord("native")) is_native = true;
      ++pos_;
    }
    std::string ty = type();
    std::string name = ident();
    if (!isPunct("(")) {
      if (is_static || is_native) fail("fields cannot be static or native");
      c.fields.push_back({ty, name});
      while (isPunct(",")) {
        ++pos_;
        c.fields.push_back({ty, ident()});
      }
      expectPunct(";");
      return;
    }
    Method m;
    m.class_name = c.name;
    m.name = name;
    m.return_type = ty;
    m.is_static = is_static;
    expectPunct("(");
    if (!isPunct(")")) {
      while (true) {
        std::string pt = type();
        m.params.push_back({pt, ident()});
        if (!isPunct(",")) break;
        ++pos_;
      }
    }
    expectPunct(")");
    if (isPunct(";")) {
      ++pos_;
      m.is_native = true;
    } else {
      if (is_native) fail("native method with a body");
      body(m);
    }
    c.methods.push_back(std::move(m));
  }

  bool knownVar(const Method& m, const std::string& n) const {
    return m.lookup(n).has_value();
  }

  void body(Method& m) {
    expectPunct("{");
    while (looksLikeDecl()) {
      std::string ty = type();
      while (true) {
        m.locals.push_back({ty, ident()});
        if (!isPunct(",")) break;
        ++pos_;
      }
      expectPunct(";");
    }
    std::string pending_label;
    while (!isPunct("}")) {
      if (at(T::End)) fail("unterminated method body");
      if (at(T::Ident) && isPunct(":", 1) && !kKeywords.count(peek().text)) {
        if (!pending_label.empty()) fail("two labels on one statement");
        pending_label = ident();
        ++pos_;
        continue;
      }
      Statement s = statement(m);
      s.label = pending_label;
      pending_label.clear();
      m.body.push_back(std::move(s));
    }
    if (!pending_label.empty()) fail("label without statement");
    expectPunct("}");
  }

  Operand operand() {
    if (isWord("null")) {
      ++pos_;
      return Operand::null();
    }
    if (isWord("true") || isWord("false")) {
      bool v = isWord("true");
      ++pos_;
      return Operand::integer(v ? 1 : 0);
    }
    bool neg = false;
    if (isPunct("-") && peek(1).kind == T::Int) {
      neg = true;
      ++pos_;
    }
    if (at(T::Int)) {
      long long v = std::stoll(toks_[pos_++].text);
      return Operand::integer(neg ? -v : v);
    }
    if (isWord("this")) {
      ++pos_;
      return Operand::var("this");
    }
    return Operand::var(ident());
  }

  std::vector<Operand> callArgs() {
    std::vector<Operand> out;
    expectPunct("(");
    if (!isPunct(")")) {
      while (true) {
        out.push_back(operand());
        if (!isPunct(",")) break;
        ++pos_;
      }
    }
    expectPunct(")");
    return out;
  }

  // A path is `this` or an identifier followed by `.ident` segments.
  std::vector<std::string> path() {
    std::vector<std::string> out;
    if (isWord("this")) {
      ++pos_;
      out.push_back("this");
    } else {
      out.push_back(ident());
    }
    while (isPunct(".")) {
      ++pos_;
      out.push_back(ident());
    }
    return out;
  }

  Statement callFromPath(const Method& m, const std::vector<std::string>& p) {
    Statement s;
    s.kind = StmtKind::Call;
    if (p.size() == 1) {
      s.method = p[0];
      if (m.is_static) {
        s.is_static = true;
        s.class_name = m.class_name;
      } else {
        s.receiver = "this";
      }
    } else if (knownVar(m, p[0])) {
      if (p.size() != 2) fail("calls through field paths are not supported");
      s.receiver = p[0];
      s.method = p[1];
    } else {
      s.is_static = true;
      s.method = p.back();
      for (std::size_t i = 0; i + 1 < p.size(); ++i)
        s.class_name += (i ? "." : "") + p[i];
    }
    s.args = callArgs();
    return s;
  }

  Statement statement(const Method& m) {
    Statement s;
    s.line = peek().line;
    if (isWord("goto")) {
      ++pos_;
      s.kind = StmtKind::Goto;
      s.jump = ident();
    } else if (isWord("if")) {
      ++pos_;
      s.kind = StmtKind::If;
      s.expr = expr();
      expectWord("goto");
      s.jump = ident();
    } else if (isWord("return")) {
      ++pos_;
      s.kind = StmtKind::Return;
      if (!isPunct(";")) s.value = operand();
    } else if (isWord("output")) {
      ++pos_;
      s.kind = StmtKind::Output;
      expectPunct("(");
      s.value = operand();
      expectPunct(")");
    } else {
      std::vector<std::string> lhs = path();
      if (isPunct("(")) {
        s = callFromPath(m, lhs);
        s.line = peek().line;
      } else {
        expectPunct("=");
        if (lhs.size() == 1) {
          s.target = lhs[0];
          assignment(m, s);
        } else if (lhs.size() == 2) {
          s.kind = StmtKind::StorePrim;
          s.base = lhs[0];
          s.field = lhs[1];
          s.expr = expr();
        } else {
          fail("stores through field paths are not supported");
        }
      }
    }
    expectPunct(";");
    return s;
  }

  void assignment(const Method& m, Statement& s) {
    int line = s.line;
    std::string target = s.target;
    if (isWord("new")) {
      ++pos_;
      s.kind = StmtKind::New;
      s.class_name = qualifiedName();
      if (isPunct("(")) {
        ++pos_;
        expectPunct(")");
      }
      return;
    }
    if (isWord("null") && isPunct(";", 1)) {
      ++pos_;
      s.kind = StmtKind::Null;
      return;
    }
    // call or load: path followed by '(' or a two-segment path over a variable
    if ((at(T::Ident) && !kKeywords.count(peek().text)) || isWord("this")) {
      std::size_t save = pos_;
      std::vector<std::string> p = path();
      if (isPunct("(")) {
        s = callFromPath(m, p);
        s.target = target;
        s.line = line;
        return;
      }
      if (p.size() == 2 && isPunct(";") && knownVar(m, p[0])) {
        s.kind = StmtKind::LoadPrim;
        s.base = p[0];
        s.field = p[1];
        return;
      }
      pos_ = save;
    }
    s.kind = StmtKind::AssignPrim;
    s.expr = expr();
  }

  // expression grammar: or > and > comparison > additive > multiplicative > unary
  Expr expr() { return orExpr(); }
  Expr orExpr() {
    Expr e = andExpr();
    while (isPunct("||")) {
      ++pos_;
      e = Expr::binary("||", std::move(e), andExpr());
    }
    return e;
  }
  Expr andExpr() {
    Expr e = cmpExpr();
    while (isPunct("&&")) {
      ++pos_;
      e = Expr::binary("&&", std::move(e), cmpExpr());
    }
    return e;
  }
  Expr cmpExpr() {
    Expr e = addExpr();
    for (const char* op : {"==", "!=", "<=", ">=", "<", ">"}) {
      if (isPunct(op)) {
        ++pos_;
        return Expr::binary(op, std::move(e), addExpr());
      }
    }
    return e;
  }
  Expr addExpr() {
    Expr e = mulExpr();
    while (isPunct("+") || isPunct("-")) {
      std::string op = toks_[pos_++].text;
      e = Expr::binary(op, std::move(e), mulExpr());
    }
    return e;
  }
  Expr mulExpr() {
    Expr e = unaryExpr();
    while (isPunct("*")) {
      ++pos_;
      e = Expr::binary("*", std::move(e), unaryExpr());
    }
    return e;
  }
  Expr unaryExpr() {
    if (isPunct("-")) {
      ++pos_;
      if (at(T::Int)) return Expr::integer(-std::stoll(toks_[pos_++].text));
      return Expr::unary("-", unaryExpr());
    }
    if (isPunct("!")) {
      ++pos_;
      return Expr::unary("!", unaryExpr());
    }
    return atomExpr();
  }
  Expr atomExpr() {
    if (isPunct("(")) {
      ++pos_;
      Expr e = expr();
      expectPunct(")");
      return e;
    }
    if (at(T::Int)) return Expr::integer(std::stoll(toks_[pos_++].text));
    if (isWord("true") || isWord("false")) {
      bool v = isWord("true");
      ++pos_;
      return Expr::integer(v ? 1 : 0);
    }
    if (isWord("null")) {
      ++pos_;
      return Expr::null();
    }
    if (isWord("this")) {
      ++pos_;
      return Expr::var("this");
    }
    if (at(T::Ident) && peek(1).kind == T::Punct && peek(1).text == ".")
      fail("field accesses are statements of their own");
    return Expr::var(ident());
  }

  std::string file_;
  std::vector<Tok> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Program parsePrograms(const std::vector<std::pair<std::string, std::string>>& files) {
  Program p;
  for (const auto& [name, text] : files) {
    auto classes = Parser(text, name).parse();
    for (auto& c : classes) p.classes.push_back(std::move(c));
  }
  validateProgram(p);
  return p;
}

Program parseProgram(const std::string& text, const std::string& file) {
  return parsePrograms({{file, text}});
}

}  // namespace symsum::ir
