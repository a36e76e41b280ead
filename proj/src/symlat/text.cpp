#include <algorithm>
#include <cctype>
#include <sstream>

#include "symsum/symlat.hpp"

namespace symsum {

namespace {

enum class Tok { Ident, LParen, RParen, Not, And, Or, Implies, Eq, Neq, Leq, True, False, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

bool identStart(unsigned char c) { return std::isalpha(c) || c == '_' || c == '$'; }
bool identChar(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '$' || c == '^' || c == '\'';
}

std::vector<Token> tokenize(const std::string& s) {
  static const std::vector<std::pair<std::string, Tok>> symbols = {
      {"¬", Tok::Not}, {"∧", Tok::And},     {"⊓", Tok::And},  {"∨", Tok::Or},
      {"⊔", Tok::Or},  {"⇒", Tok::Implies}, {"⊑", Tok::Leq},  {"⊥", Tok::False},
      {"⊤", Tok::True}, {"≠", Tok::Neq},    {"->", Tok::Implies}, {"<=", Tok::Leq},
      {"!=", Tok::Neq}, {"==", Tok::Eq},    {"&&", Tok::And}, {"||", Tok::Or},
      {"!", Tok::Not}, {"&", Tok::And},     {"|", Tok::Or},   {"=", Tok::Eq},
      {"(", Tok::LParen}, {")", Tok::RParen}};
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (identStart(c)) {
      std::size_t j = i;
      while (j < s.size() && identChar(s[j])) ++j;
      std::string word = s.substr(i, j - i);
      Tok kind = Tok::Ident;
      if (word == "tt" || word == "true" || word == "top") kind = Tok::True;
      else if (word == "ff" || word == "false" || word == "bot") kind = Tok::False;
      else if (word == "V") kind = Tok::Or;
      out.push_back({kind, word, i});
      i = j;
      continue;
    }
    bool matched = false;
    for (const auto& [text, kind] : symbols) {
      if (s.compare(i, text.size(), text) == 0) {
        out.push_back({kind, text, i});
        i += text.size();
        matched = true;
        break;
      }
    }
    if (!matched)
      throw SymError("unexpected character in expression at offset " + std::to_string(i) +
                     ": '" + s.substr(i, 1) + "'");
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class ExprParser {
 public:
  ExprParser(Store& store, const std::string& text,
             const std::function<Sym(const std::string&)>& resolve)
      : store_(store), toks_(tokenize(text)), resolve_(resolve) {}

  Sym parse() {
    Sym r = expr();
    if (peek().kind != Tok::End) fail("trailing input");
    return r;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool isKeyword(const char* kw) const {
    return peek().kind == Tok::Ident && peek().text == kw;
  }
  void expectKeyword(const char* kw) {
    if (!isKeyword(kw)) fail(std::string("expected '") + kw + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw SymError(what + " at offset " + std::to_string(peek().pos));
  }

  Sym expr() {
    if (isKeyword("if")) {
      ++pos_;
      Sym c = expr();
      expectKeyword("then");
      Sym a = expr();
      expectKeyword("else");
      Sym b = expr();
      return store_.ite(c, a, b);
    }
    return implication();
  }

  Sym implication() {
    Sym lhs = comparison();
    if (peek().kind == Tok::Implies) {
      ++pos_;
      return store_.implies(lhs, implication());
    }
    return lhs;
  }

  Sym comparison() {
    Sym lhs = disjunction();
    switch (peek().kind) {
      case Tok::Eq: ++pos_; return store_.iff(lhs, disjunction());
      case Tok::Neq: ++pos_; return store_.lxor(lhs, disjunction());
      case Tok::Leq: ++pos_; return store_.implies(lhs, disjunction());
      default: return lhs;
    }
  }

  Sym disjunction() {
    Sym acc = conjunction();
    while (peek().kind == Tok::Or) {
      ++pos_;
      acc = store_.lor(acc, conjunction());
    }
    return acc;
  }

  Sym conjunction() {
    Sym acc = unary();
    while (peek().kind == Tok::And) {
      ++pos_;
      acc = store_.land(acc, unary());
    }
    return acc;
  }

  Sym unary() {
    if (peek().kind == Tok::Not) {
      ++pos_;
      return store_.lnot(unary());
    }
    return atom();
  }

  Sym atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::LParen: {
        ++pos_;
        Sym r = expr();
        if (peek().kind != Tok::RParen) fail("expected ')'");
        ++pos_;
        return r;
      }
      case Tok::True: ++pos_; return store_.tt();
      case Tok::False: ++pos_; return store_.ff();
      case Tok::Ident:
        if (t.text == "then" || t.text == "else" || t.text == "if") fail("unexpected keyword");
        ++pos_;
        return resolve_(t.text);
      default: fail("unexpected token '" + t.text + "'");
    }
  }

  Store& store_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const std::function<Sym(const std::string&)>& resolve_;
};

bool nameLess(const std::string& a, const std::string& b) {
  int ra = printRank(a), rb = printRank(b);
  if (ra != rb) return ra < rb;
  return a < b;
}

std::vector<std::string> sortedNames(Store& store, const Store::Cube& cube, bool& any_negative) {
  std::vector<std::pair<std::string, bool>> lits;
  for (auto [v, pol] : cube) lits.emplace_back(store.decl(v).name, pol);
  std::sort(lits.begin(), lits.end(),
            [](const auto& a, const auto& b) { return nameLess(a.first, b.first); });
  std::vector<std::string> out;
  any_negative = false;
  for (auto& [n, pol] : lits) {
    if (!pol) any_negative = true;
    out.push_back(pol ? n : "¬" + n);
  }
  return out;
}

std::string joinStrings(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

/// Returns the variable names when f is a plain disjunction of variables.
std::optional<std::vector<std::string>> asPositiveJoin(Store& store, Sym f) {
  auto names = store.supportNames(f);
  Sym acc = store.ff();
  for (const auto& n : names) acc = store.lor(acc, store.var(n));
  if (acc != f) return std::nullopt;
  std::sort(names.begin(), names.end(), nameLess);
  return names;
}

std::string printDnf(Store& store, Sym f) {
  std::vector<std::pair<std::vector<std::string>, std::string>> cubes;
  for (const auto& cube : store.isop(f)) {
    bool neg = false;
    auto lits = sortedNames(store, cube, neg);
    std::string text = joinStrings(lits, " ∧ ");
    cubes.emplace_back(lits, text);
  }
  std::sort(cubes.begin(), cubes.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.first.begin(), a.first.end(), b.first.begin(),
                                        b.first.end(), nameLess);
  });
  std::vector<std::string> parts;
  for (auto& [lits, text] : cubes)
    parts.push_back(cubes.size() > 1 && lits.size() > 1 ? "(" + text + ")" : text);
  return joinStrings(parts, " ∨ ");
}

std::size_t literalCount(const std::vector<Store::Cube>& cubes) {
  std::size_t n = 0;
  for (const auto& c : cubes) n += c.size();
  return n;
}

std::string printGuard(Store& store, Sym f) {
  if (f.isTrue()) return "tt";
  if (f.isFalse()) return "ff";
  auto neg_cubes = store.isop(store.lnot(f));
  auto pos_cubes = store.isop(f);
  if (literalCount(pos_cubes) < literalCount(neg_cubes)) return printDnf(store, f);

  // Conjunction of clauses; each clause forbids one cube of ¬f.
  std::vector<std::string> lows;
  std::vector<std::vector<std::string>> others;
  for (const auto& cube : neg_cubes) {
    bool neg = false;
    auto lits = sortedNames(store, cube, neg);
    if (lits.size() == 1 && !neg) lows.push_back(lits.front());
    else others.push_back(std::move(lits));
  }
  std::sort(lows.begin(), lows.end(), nameLess);
  std::sort(others.begin(), others.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), nameLess);
  });
  std::vector<std::string> clauses;
  if (!lows.empty()) clauses.push_back("(" + joinStrings(lows, " ⊔ ") + " = ⊥)");
  for (const auto& lits : others) {
    if (lits.size() == 1) clauses.push_back(lits.front().rfind("¬", 0) == 0
                                                ? lits.front().substr(std::string("¬").size())
                                                : "¬" + lits.front());
    else clauses.push_back("¬(" + joinStrings(lits, " ∧ ") + ")");
  }
  return joinStrings(clauses, " ∧ ");
}

}  // namespace

int printRank(const std::string& name) {
  if (name.size() > 1 && name[0] == 'p' &&
      std::all_of(name.begin() + 1, name.end(), [](unsigned char c) { return std::isdigit(c); }))
    return 0;
  if (name == "pc") return 1;
  if (name.rfind("level_", 0) == 0) return 2;
  if (name.rfind("objlevel_", 0) == 0) return 3;
  return 4;
}

Sym parseSymExpr(Store& store, const std::string& text,
                 const std::function<Sym(const std::string&)>& resolve) {
  return ExprParser(store, text, resolve).parse();
}

std::string printSym(Store& store, Sym f, PrintStyle style) {
  if (style == PrintStyle::Guard) return printGuard(store, f);
  bool level = style == PrintStyle::Level;
  if (f.isTrue()) return level ? "⊤" : "tt";
  if (f.isFalse()) return level ? "⊥" : "ff";
  if (auto join = asPositiveJoin(store, f)) return joinStrings(*join, level ? " ⊔ " : " ∨ ");
  return printDnf(store, f);
}

}  // namespace symsum
