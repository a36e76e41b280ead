#include <algorithm>
#include <regex>
#include <set>

#include "symsum/cli.hpp"

namespace symsum {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Blanks out comments, keeping offsets and newlines.
std::string stripComments(const std::string& text) {
  std::string out = text;
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    if (out[i] == '/' && out[i + 1] == '/') {
      while (i < out.size() && out[i] != '\n') out[i++] = ' ';
    } else if (out[i] == '/' && out[i + 1] == '*') {
      std::size_t j = out.find("*/", i + 2);
      std::size_t end = j == std::string::npos ? out.size() : j + 2;
      for (; i < end; ++i)
        if (out[i] != '\n') out[i] = ' ';
      --i;
    }
  }
  return out;
}

struct Header {
  bool is_static = false;
  std::string return_type;
  std::string cls;
  std::string method;
  std::vector<ir::VarDecl> params;
};

Header parseHeader(const std::string& raw, const std::string& file, int line) {
  static const std::regex re(
      R"(^(static\s+)?([A-Za-z_$][\w.$]*(?:\[\])*)\s+([A-Za-z_$][\w.$:]*)\s*\(([^)]*)\)$)");
  std::smatch m;
  std::string text = trim(raw);
  if (!std::regex_match(text, m, re)) throw StubError(file, line, "malformed stub header '" + text + "'");
  Header h;
  h.is_static = m[1].matched;
  h.return_type = m[2];
  std::string qual = m[3];
  auto colon = qual.find(':');
  auto cut = colon != std::string::npos ? colon : qual.rfind('.');
  if (cut == std::string::npos) throw StubError(file, line, "stub header needs Class:method");
  h.cls = qual.substr(0, cut);
  h.method = qual.substr(cut + 1);
  std::string params = trim(m[4]);
  if (!params.empty()) {
    std::size_t pos = 0;
    while (pos <= params.size()) {
      auto comma = params.find(',', pos);
      std::string p = trim(params.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
      static const std::regex pre(R"(^([A-Za-z_$][\w.$]*(?:\[\])*)\s+([A-Za-z_$][\w$]*)$)");
      std::smatch pm;
      if (!std::regex_match(p, pm, pre)) throw StubError(file, line, "malformed parameter '" + p + "'");
      h.params.push_back({pm[1], pm[2]});
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  return h;
}

int lineAt(const std::string& text, std::size_t offset) {
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + std::min(offset, text.size()), '\n'));
}

}  // namespace

std::map<ir::MethodSig, Summary> parseStubs(const std::string& raw, HeapModel model,
                                            const std::string& file) {
  std::string text = stripComments(raw);
  std::map<ir::MethodSig, Summary> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = text.find('{', pos);
    if (open == std::string::npos) {
      if (!trim(text.substr(pos)).empty())
        throw StubError(file, lineAt(text, pos), "trailing text after the last stub");
      break;
    }
    std::size_t close = text.find('}', open);
    if (close == std::string::npos) throw StubError(file, lineAt(text, open), "unterminated stub body");
    int line = lineAt(text, text.find_first_not_of(" \t\r\n", pos));
    Header h = parseHeader(text.substr(pos, open - pos), file, line);

    MethodShape shape;
    shape.sig.recv_type = h.cls;
    shape.sig.name = h.method;
    if (!h.is_static) shape.formals.push_back({h.cls, "this"});
    for (const auto& p : h.params) {
      shape.sig.arg_types.push_back(p.type);
      shape.formals.push_back(p);
    }
    shape.return_type = h.return_type;

    // statements of the body
    std::vector<std::pair<std::string, int>> stmts;
    std::size_t s = open + 1;
    while (s < close) {
      std::size_t semi = text.find(';', s);
      if (semi == std::string::npos || semi > close) semi = close;
      std::string st = trim(text.substr(s, semi - s));
      if (!st.empty() && st.find_first_not_of(".…") != std::string::npos)
        stmts.push_back({st, lineAt(text, s + text.substr(s, semi - s).find_first_not_of(" \t\r\n"))});
      s = semi + 1;
    }

    Summary sum;
    std::string marker;
    for (const auto& [st, l] : stmts) {
      if (st == "sink" || st == "pessimistic" || st.rfind("source", 0) == 0) {
        if (!marker.empty()) throw StubError(file, l, "more than one marker in a stub");
        marker = st;
      }
    }
    if (!marker.empty()) {
      if (stmts.size() != 1) throw StubError(file, line, "a marker stub takes no assignments");
      if (marker == "sink") {
        sum = sinkSummary(shape, model);
      } else if (marker == "pessimistic") {
        sum = pessimisticSummary(shape, model);
      } else {
        std::string sym = trim(marker.substr(6));
        if (!names::isSource(sym)) throw StubError(file, line, "source needs a symbol p<k>");
        sum = sourceSummary(shape, model, sym);
      }
    } else {
      std::set<std::string> sources;
      static const std::regex srcRe(R"(\bp[0-9]+\b)");
      for (const auto& [st, l] : stmts)
        for (std::sregex_iterator it(st.begin(), st.end(), srcRe), end; it != end; ++it)
          sources.insert(it->str());
      Summary base = bottomSummary(shape, model);
      std::vector<std::string> srcList(sources.begin(), sources.end());
      Store store(summaryDecls(model, shape.formals, shape.return_type, srcList));
      Sym guard = store.tt();
      std::map<std::string, Sym> effect;
      for (const auto& [k, v] : base.effect) effect[k] = store.importSym(v);
      std::set<std::string> assigned;
      for (const auto& [st, l] : stmts) {
        auto eq = st.find(":=");
        if (eq == std::string::npos) throw StubError(file, l, "expected an assignment in '" + st + "'");
        std::string lhs = trim(st.substr(0, eq));
        std::string rhs = trim(st.substr(eq + 2));
        if (!assigned.insert(lhs).second) throw StubError(file, l, lhs + " assigned twice");
        Sym value;
        try {
          value = parseSymExpr(store, rhs, [&](const std::string& n) -> Sym {
            if (!store.has(n)) throw SymError(n + " is not a support variable of " + shape.sig.str());
            return store.var(n);
          });
        } catch (const SymError& e) {
          throw StubError(file, l, e.what());
        }
        if (lhs == "guard") {
          guard = value;
        } else if (effect.count(lhs)) {
          effect[lhs] = value;
        } else {
          throw StubError(file, l, lhs + " is not a footprint variable of " + shape.sig.str());
        }
      }
      sum = base;
      sum.guard = store.exportSym(guard);
      for (const auto& [k, v] : effect) sum.effect[k] = store.exportSym(v);
      sum.stub = Summary::StubKind::Opaque;
    }
    sum.provenance = Provenance::Stub;
    if (!out.emplace(shape.sig, sum).second)
      throw StubError(file, line, "duplicate stub for " + shape.sig.str());
    pos = close + 1;
  }
  return out;
}

}  // namespace symsum
