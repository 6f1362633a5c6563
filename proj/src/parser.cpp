#include <cctype>
#include <sstream>

#include "covham/model.hpp"

namespace covham {

std::string ParseDiagnostic::str() const {
  std::ostringstream os;
  os << (severity == Severity::Error ? "error" : "warning") << "[" << code << "] "
     << line << ":" << col << " " << message;
  if (!hint.empty()) os << " (" << hint << ")";
  return os.str();
}

namespace {

struct Token {
  enum Kind { Ident, Int, Str, Punct, End } kind = End;
  std::string text;
  long long ival = 0;
  int line = 1, col = 1;
};

class Lexer {
public:
  Lexer(const std::string& src, std::vector<ParseDiagnostic>& diags)
      : src_(src), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') { ++line_; col_ = 1; ++pos_; continue; }
      if (c == '\r' || c == ' ' || c == '\t') { ++pos_; ++col_; continue; }
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') { ++pos_; ++col_; }
        continue;
      }
      int line = line_, col = col_;
      if (std::isalpha((unsigned char)c) || c == '_' || c == '$') {
        std::string t;
        while (pos_ < src_.size() &&
               (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_' ||
                src_[pos_] == '$')) {
          t += src_[pos_++];
          ++col_;
        }
        out.push_back({Token::Ident, t, 0, line, col});
        continue;
      }
      if (std::isdigit((unsigned char)c)) {
        std::string t;
        while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) {
          t += src_[pos_++];
          ++col_;
        }
        long long v = 0;
        try {
          v = std::stoll(t);
        } catch (...) {
          diag("lex", "integer literal out of range", line, col);
          v = 0;
        }
        out.push_back({Token::Int, t, v, line, col});
        continue;
      }
      if (c == '"') {
        std::string t;
        ++pos_; ++col_;
        while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') {
          t += src_[pos_++];
          ++col_;
        }
        if (pos_ < src_.size() && src_[pos_] == '"') { ++pos_; ++col_; }
        else diag("lex", "unterminated string", line, col);
        out.push_back({Token::Str, t, 0, line, col});
        continue;
      }
      std::string punct(1, c);
      if (std::string("+-*/^()[]{}=,'").find(c) == std::string::npos) {
        diag("lex", std::string("unexpected character '") + c + "'", line, col);
        ++pos_; ++col_;
        continue;
      }
      ++pos_; ++col_;
      out.push_back({Token::Punct, punct, 0, line, col});
    }
    out.push_back({Token::End, "", 0, line_, col_});
    return out;
  }

private:
  void diag(const std::string& code, const std::string& msg, int line, int col) {
    diags_.push_back({ParseDiagnostic::Severity::Error, code, msg, line, col, line, col, ""});
  }
  const std::string& src_;
  std::vector<ParseDiagnostic>& diags_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

struct ParseAbort {};

class Parser {
public:
  Parser(const std::string& text, std::vector<ParseDiagnostic>& diags)
      : diags_(diags) {
    Lexer lex(text, diags);
    toks_ = lex.run();
  }

  ParseResult parseModelFile() {
    ParseResult res;
    try {
      ModelSpec m;
      m.ctx = std::make_shared<Context>();
      expectIdent("model");
      m.name = expectAnyIdent("model name");
      expectPunct("{");
      while (!peekPunct("}")) {
        if (cur().kind == Token::End) {
          err("syntax", "unexpected end of input, expected '}'");
          throw ParseAbort{};
        }
        statement(m);
      }
      expectPunct("}");
      validate(m);
      if (!hasErrors()) res.model = std::move(m);
    } catch (ParseAbort&) {
    }
    res.diagnostics = diags_;
    return res;
  }

  GeneratorParseResult parseGeneratorFile(const ModelSpec& base) {
    GeneratorParseResult res;
    try {
      GeneratingFunction g;
      auto ctx = std::make_shared<Context>(*base.ctx);
      g.ctx = ctx;
      expectIdent("generator");
      g.name = expectAnyIdent("generator name");
      expectIdent("kind");
      std::string k = expectAnyIdent("kind F1..F4");
      if (k == "F1") g.kind = GenKind::F1;
      else if (k == "F2") g.kind = GenKind::F2;
      else if (k == "F3") g.kind = GenKind::F3;
      else if (k == "F4") g.kind = GenKind::F4;
      else err("syntax", "unknown generating-function kind '" + k + "'");
      expectPunct("{");
      bool haveComponent = false;
      while (!peekPunct("}")) {
        if (cur().kind == Token::End) {
          err("syntax", "unexpected end of input, expected '}'");
          throw ParseAbort{};
        }
        if (peekIdent("param")) { paramDecl(*ctx, nullptr); continue; }
        if (peekIdent("paramfn")) { paramFnDecl(*ctx, nullptr); continue; }
        if (peekIdent("F")) {
          next();
          expectPunct("[");
          Index mu = indexItem();
          expectPunct("]");
          expectPunct("=");
          g.component = expression(*ctx);
          g.componentIndex = mu.name;
          haveComponent = true;
          continue;
        }
        if (peekIdent("characteristic") || peekIdent("shift")) {
          bool isChar = peekIdent("characteristic");
          next();
          expectPunct("[");
          Index a = indexItem();
          expectPunct(",");
          Index b = indexItem();
          expectPunct("]");
          expectPunct("=");
          Expr e = expression(*ctx);
          (void)a; (void)b;
          if (isChar) g.characteristic = e;
          else g.lagrangianShift = e;
          continue;
        }
        err("syntax", "unexpected token '" + cur().text + "' in generator block");
        throw ParseAbort{};
      }
      expectPunct("}");
      if (!haveComponent) err("syntax", "generator block lacks an F[...] component");
      if (!hasErrors()) res.generator = std::move(g);
    } catch (ParseAbort&) {
    }
    res.diagnostics = diags_;
    return res;
  }

private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::vector<ParseDiagnostic>& diags_;
  int depth_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }
  bool peekPunct(const std::string& p) const {
    return cur().kind == Token::Punct && cur().text == p;
  }
  bool peekIdent(const std::string& s) const {
    return cur().kind == Token::Ident && cur().text == s;
  }
  bool acceptPunct(const std::string& p) {
    if (peekPunct(p)) { next(); return true; }
    return false;
  }
  void expectPunct(const std::string& p) {
    if (!acceptPunct(p)) {
      err("syntax", "expected '" + p + "', found '" + shown() + "'");
      throw ParseAbort{};
    }
  }
  void expectIdent(const std::string& s) {
    if (!peekIdent(s)) {
      err("syntax", "expected '" + s + "', found '" + shown() + "'");
      throw ParseAbort{};
    }
    next();
  }
  std::string expectAnyIdent(const std::string& what) {
    if (cur().kind != Token::Ident) {
      err("syntax", "expected " + what + ", found '" + shown() + "'");
      throw ParseAbort{};
    }
    return next().text;
  }
  std::string shown() const {
    if (cur().kind == Token::End) return "<end of input>";
    return cur().text;
  }
  void err(const std::string& code, const std::string& msg, std::string hint = "") {
    diags_.push_back({ParseDiagnostic::Severity::Error, code, msg, cur().line, cur().col,
                      cur().line, cur().col, hint});
  }
  bool hasErrors() const {
    for (auto& d : diags_)
      if (d.severity == ParseDiagnostic::Severity::Error) return true;
    return false;
  }

  // ---- declarations ----

  void statement(ModelSpec& m) {
    if (peekIdent("field")) return fieldDecl(m);
    if (peekIdent("param")) return paramDecl(*m.ctx, &m);
    if (peekIdent("paramfn")) return paramFnDecl(*m.ctx, &m);
    if (peekIdent("algebra")) {
      next();
      std::string a = expectAnyIdent("algebra name");
      if (a != "dirac" && a != "su2")
        err("undeclared", "unknown algebra '" + a + "'", "expected dirac or su2");
      m.algebras.push_back(a);
      return;
    }
    if (peekIdent("antisymmetric")) {
      next();
      expectIdent("pi");
      expectPunct("(");
      std::string f = expectAnyIdent("field name");
      expectPunct(")");
      Sym fs = sym(f);
      if (!m.ctx->known(fs) || m.ctx->info(fs).kind != AtomKind::Field)
        err("undeclared", "unknown field '" + f + "' in antisymmetric declaration");
      else {
        m.ctx->mutableInfo(fs).momentumAntisym = true;
        m.antisymMomenta.push_back(f);
      }
      return;
    }
    if (peekIdent("meta")) {
      next();
      std::string k = expectAnyIdent("metadata key");
      expectPunct("=");
      if (cur().kind != Token::Str) {
        err("syntax", "expected string metadata value");
        throw ParseAbort{};
      }
      m.metadata[k] = next().text;
      return;
    }
    if (peekIdent("lagrangian") || peekIdent("hamiltonian")) {
      bool isL = peekIdent("lagrangian");
      next();
      expectPunct("=");
      Expr e = expression(*m.ctx);
      try {
        e = normalize(e, *m.ctx);
        auto free = freeIndices(e, *m.ctx);
        if (!free.empty())
          err("nonscalar-density",
              "density has free index '" + Names::str(free[0].name) + "'",
              "every index must be contracted");
      } catch (IndexError& ex) {
        err("nonscalar-density", ex.what());
      } catch (std::exception& ex) {
        err("syntax", ex.what());
      }
      if (isL) m.lagrangian = e;
      else m.hamiltonian = e;
      return;
    }
    err("syntax", "unexpected token '" + shown() + "'");
    throw ParseAbort{};
  }

  void fieldDecl(ModelSpec& m) {
    next();
    int line = cur().line, col = cur().col;
    std::string name = expectAnyIdent("field name");
    std::string rankS = expectAnyIdent("field rank");
    std::string cxS = expectAnyIdent("field complexity");
    FieldRank rank;
    if (rankS == "scalar") rank = FieldRank::Scalar;
    else if (rankS == "covector") rank = FieldRank::Covector;
    else if (rankS == "covector3") rank = FieldRank::Covector3;
    else if (rankS == "spinor") rank = FieldRank::Spinor;
    else if (rankS == "doublet") rank = FieldRank::Doublet;
    else {
      diags_.push_back({ParseDiagnostic::Severity::Error, "syntax",
                        "unknown rank '" + rankS + "'", line, col, line, col,
                        "expected scalar|covector|covector3|spinor|doublet"});
      return;
    }
    Complexity cx;
    if (cxS == "real") cx = Complexity::Real;
    else if (cxS == "complex") cx = Complexity::Complex;
    else {
      diags_.push_back({ParseDiagnostic::Severity::Error, "syntax",
                        "unknown complexity '" + cxS + "'", line, col, line, col,
                        "expected real or complex"});
      return;
    }
    if (m.ctx->known(sym(name))) {
      diags_.push_back({ParseDiagnostic::Severity::Error, "undeclared",
                        "duplicate symbol '" + name + "'", line, col, line, col, ""});
      return;
    }
    Sym fs = m.ctx->declareField(name, rank, cx);
    if (rank == FieldRank::Spinor) m.ctx->declareAdjoint(name + "bar", fs);
    if (rank == FieldRank::Doublet) m.ctx->declareAdjoint(name + "dag", fs);
    m.fields.push_back({name, rank, cx});
  }

  void paramDecl(Context& ctx, ModelSpec* m) {
    next();
    std::string name = expectAnyIdent("parameter name");
    std::optional<Rat> value;
    if (acceptPunct("=")) {
      bool neg = acceptPunct("-");
      if (cur().kind != Token::Int) {
        err("syntax", "expected rational default value");
        throw ParseAbort{};
      }
      long long num = next().ival;
      long long den = 1;
      if (acceptPunct("/")) {
        if (cur().kind != Token::Int) {
          err("syntax", "expected denominator");
          throw ParseAbort{};
        }
        den = next().ival;
      }
      value = Rat(neg ? -num : num, den == 0 ? 1 : den);
    }
    bool nil = false;
    if (peekIdent("nilpotent")) { next(); nil = true; }
    // optional index signature, e.g. a nilpotent displacement dxv[up mu]
    std::vector<std::pair<IndexSpace, bool>> slots;
    if (peekPunct("[")) slots = slotSignature();
    SymbolInfo si;
    si.kind = AtomKind::Param;
    si.nilpotent = nil;
    si.slots = slots;
    if (ctx.known(sym(name))) {
      err("undeclared", "duplicate symbol '" + name + "'");
      return;
    }
    ctx.declare(name, si);
    if (m) m->params.push_back({name, value, nil});
  }

  void paramFnDecl(Context& ctx, ModelSpec* m) {
    next();
    std::string name = expectAnyIdent("function name");
    std::vector<std::pair<IndexSpace, bool>> slots;
    if (peekPunct("[")) slots = slotSignature();
    bool xdep = true;
    std::vector<std::string> deps;
    if (peekIdent("of")) {
      next();
      expectPunct("(");
      xdep = false;
      for (;;) {
        std::string d = expectAnyIdent("dependency");
        if (d == "x") xdep = true;
        else deps.push_back(d);
        if (!acceptPunct(",")) break;
      }
      expectPunct(")");
    }
    bool nil = false;
    if (peekIdent("nilpotent")) { next(); nil = true; }
    SymbolInfo si;
    si.kind = AtomKind::ParamFn;
    si.slots = slots;
    si.xdep = xdep;
    si.nilpotent = nil;
    for (auto& d : deps) {
      Sym ds = sym(d);
      if (!ctx.known(ds) || ctx.info(ds).kind != AtomKind::Field)
        err("undeclared", "function dependency '" + d + "' is not a declared field");
      else si.fndeps.push_back(ds);
    }
    if (ctx.known(sym(name))) {
      err("undeclared", "duplicate symbol '" + name + "'");
      return;
    }
    ctx.declare(name, si);
    if (m) m->paramfns.push_back({name, slots, xdep, deps, nil});
  }

  std::vector<std::pair<IndexSpace, bool>> slotSignature() {
    std::vector<std::pair<IndexSpace, bool>> slots;
    expectPunct("[");
    for (;;) {
      if (peekIdent("up") || peekIdent("dn")) {
        bool isUp = peekIdent("up");
        next();
        if (cur().kind == Token::Ident || cur().kind == Token::Int) next();
        slots.push_back({IndexSpace::Spacetime, isUp});
      } else {
        if (cur().kind == Token::Ident || cur().kind == Token::Int) next();
        slots.push_back({IndexSpace::Internal, false});
      }
      if (!acceptPunct(",")) break;
    }
    expectPunct("]");
    return slots;
  }

  void validate(ModelSpec& m) {
    if (!m.lagrangian && !m.hamiltonian)
      diags_.push_back({ParseDiagnostic::Severity::Error, "missing-density",
                        "model declares neither a lagrangian nor a hamiltonian", 1, 1, 1,
                        1, ""});
  }

  // ---- expressions ----

  Index indexItem() {
    auto stIndex = [&](bool isUp) -> Index {
      if (cur().kind == Token::Int) {
        long long v = next().ival;
        if (v < 0 || v > 3) {
          err("index-arity", "spacetime component out of range");
          v = 0;
        }
        return isUp ? upc(int(v)) : dnc(int(v));
      }
      std::string n = expectAnyIdent("index");
      if (n == "t") return isUp ? upc(0) : dnc(0);
      if (n == "x") return isUp ? upc(1) : dnc(1);
      if (n == "y") return isUp ? upc(2) : dnc(2);
      if (n == "z") return isUp ? upc(3) : dnc(3);
      return isUp ? up(n) : dn(n);
    };
    if (peekIdent("up")) { next(); return stIndex(true); }
    if (peekIdent("dn")) { next(); return stIndex(false); }
    if (cur().kind == Token::Int) {
      long long v = next().ival;
      if (v < 1 || v > 3) {
        err("index-arity", "internal component must be 1..3");
        v = 1;
      }
      return internalc(int(v) - 1);
    }
    std::string n = expectAnyIdent("index");
    return internal(n);
  }

  std::vector<Index> indexList() {
    std::vector<Index> out;
    expectPunct("[");
    for (;;) {
      out.push_back(indexItem());
      if (!acceptPunct(",")) break;
    }
    expectPunct("]");
    return out;
  }

  void checkArity(const Context& ctx, Sym s, const std::vector<Index>& idx, int extra) {
    const SymbolInfo& si = ctx.info(s);
    if ((int)idx.size() != (int)si.slots.size() + extra)
      err("index-arity",
          "'" + Names::str(s) + "' takes " + std::to_string(si.slots.size() + extra) +
              " indices, got " + std::to_string(idx.size()));
  }

  // field reference inside pi(...) / conj(...) heads
  Atom fieldRef(Context& ctx) {
    bool conj = false;
    std::string head = expectAnyIdent("field name");
    std::string name = head;
    if (head == "conj" || head == "bar" || head == "dag") {
      expectPunct("(");
      name = expectAnyIdent("field name");
      expectPunct(")");
      if (head == "conj") conj = true;
      else name = name + (head == "bar" ? "bar" : "dag");
    }
    Sym s = sym(name);
    if (!ctx.known(s) || ctx.info(s).kind != AtomKind::Field) {
      err("undeclared", "unknown field '" + name + "'");
      throw ParseAbort{};
    }
    if (conj && ctx.info(s).cx != Complexity::Complex)
      err("syntax", "conj() of a real field");
    Atom a = fieldAtom(s, {}, conj);
    if (acceptPunct("'")) a.primed = true;
    return a;
  }

  Expr expression(Context& ctx) {
    if (++depth_ > 200) {
      err("syntax", "expression nesting too deep");
      throw ParseAbort{};
    }
    Expr e = term(ctx);
    while (peekPunct("+") || peekPunct("-")) {
      bool plus = next().text == "+";
      Expr rhs = term(ctx);
      e = plus ? e + rhs : e - rhs;
    }
    --depth_;
    return e;
  }

  Expr term(Context& ctx) {
    Expr e = signedFactor(ctx);
    while (peekPunct("*") || peekPunct("/")) {
      bool mul = next().text == "*";
      Expr rhs = signedFactor(ctx);
      if (mul) e = e * rhs;
      else {
        try {
          e = divideByParams(e, rhs, ctx);
        } catch (std::exception& ex) {
          err("syntax", ex.what());
        }
      }
    }
    return e;
  }

  Expr signedFactor(Context& ctx) {
    if (acceptPunct("-")) return -signedFactor(ctx);
    if (acceptPunct("+")) return signedFactor(ctx);
    return power(ctx);
  }

  Expr power(Context& ctx) {
    Expr base = primary(ctx);
    if (acceptPunct("^")) {
      bool neg = acceptPunct("-");
      if (cur().kind != Token::Int) {
        err("syntax", "expected integer exponent");
        throw ParseAbort{};
      }
      long long n = next().ival;
      if (neg) {
        try {
          Expr inv = one();
          for (int k = 0; k < n; ++k) inv = inv * base;
          return divideByParams(one(), inv, ctx);
        } catch (std::exception& ex) {
          err("syntax", ex.what());
          return one();
        }
      }
      if (n > 64) {
        err("syntax", "exponent too large");
        return one();
      }
      return powi(base, int(n));
    }
    return base;
  }

  Expr primary(Context& ctx) {
    if (cur().kind == Token::Int) return rational(next().ival);
    if (acceptPunct("(")) {
      Expr e = expression(ctx);
      expectPunct(")");
      return e;
    }
    if (cur().kind != Token::Ident) {
      err("syntax", "expected an expression, found '" + shown() + "'");
      throw ParseAbort{};
    }
    std::string name = next().text;

    if (name == "i") return imag();
    if (name == "one") return fromChainAtom(unitMatAtom());
    if (name == "exp") {
      expectPunct("(");
      Expr inner = expression(ctx);
      expectPunct(")");
      return expPhase(inner);
    }
    if (name == "conj" && peekPunct("(")) {
      expectPunct("(");
      Expr inner = expression(ctx);
      expectPunct(")");
      bool primed = false;
      if (acceptPunct("'")) primed = true;
      try {
        Expr c = conjugate(inner, ctx);
        if (primed) {
          for (auto& mo : c.mono) {
            for (auto& [a, p] : mo.fac)
              if (a.kind == AtomKind::Field || a.kind == AtomKind::Momentum)
                a.primed = true;
          }
        }
        return c;
      } catch (std::exception& ex) {
        err("syntax", ex.what());
        return one();
      }
    }
    if ((name == "bar" || name == "dag") && peekPunct("(")) {
      expectPunct("(");
      std::string base = expectAnyIdent("field name");
      expectPunct(")");
      Sym s = sym(base + (name == "bar" ? "bar" : "dag"));
      if (!ctx.known(s)) {
        err("undeclared", "unknown field '" + base + "'");
        throw ParseAbort{};
      }
      Atom a = fieldAtom(s);
      if (acceptPunct("'")) a.primed = true;
      return fromChainAtom(a);
    }
    if (name == "d" && peekPunct("(")) {
      expectPunct("(");
      std::vector<Index> der;
      for (;;) {
        der.push_back(indexItem());
        if (!acceptPunct(",")) break;
      }
      expectPunct(")");
      Expr inner = primary(ctx);
      // the derivative applies to a single atom
      if (inner.mono.size() != 1 ||
          (inner.mono[0].fac.size() + inner.mono[0].chain.size()) != 1 ||
          !inner.mono[0].coef.isOne()) {
        err("syntax", "d(...) must apply to a single field or function atom");
        return inner;
      }
      Monomial m = inner.mono[0];
      if (!m.fac.empty()) {
        Atom a = m.fac[0].first;
        if (m.fac[0].second != 1) {
          err("syntax", "d(...) must apply to a single atom, not a power");
          return inner;
        }
        return fromAtom(derivedAtom(a, der));
      }
      return fromChainAtom(derivedAtom(m.chain[0], der));
    }
    if (name == "pi" && (peekPunct("(") || peekPunct("'"))) {
      bool primed = false;
      if (peekPunct("'")) {
        next();
        primed = true;
      }
      if (!peekPunct("(")) {
        err("syntax", "expected '(' after pi'");
        throw ParseAbort{};
      }
      expectPunct("(");
      Atom f = fieldRef(ctx);
      expectPunct(")");
      std::vector<Index> idx = indexList();
      checkArity(ctx, f.symbol, idx, 1);
      Atom a = momentumAtom(f.symbol, idx, f.conj, primed || f.primed);
      const SymbolInfo& si = ctx.info(f.symbol);
      if (si.shape == NcShape::Scalar) return fromAtom(a);
      return fromChainAtom(a);
    }
    if (name == "x" && peekPunct("[")) {
      auto idx = indexList();
      if (idx.size() != 1 || idx[0].space != IndexSpace::Spacetime)
        err("index-arity", "x takes one spacetime index");
      return fromAtom(coordAtom(idx[0]));
    }
    if (name == "delta" || name == "g" || name == "eps" || name == "gamma" ||
        name == "sigma" || name == "taumat" || name == "tau") {
      auto idx = indexList();
      auto need = [&](size_t n) {
        if (idx.size() != n) {
          err("index-arity", "'" + name + "' takes " + std::to_string(n) + " indices");
          while (idx.size() < n) idx.push_back(up("u"));
        }
      };
      if (name == "delta") { need(2); return fromAtom(deltaAtom(idx[0], idx[1])); }
      if (name == "g") { need(2); return fromAtom(metricAtom(idx[0], idx[1])); }
      if (name == "eps") { need(3); return fromAtom(epsilonAtom(idx[0], idx[1], idx[2])); }
      if (name == "gamma") { need(1); return fromChainAtom(gammaAtom(idx[0])); }
      if (name == "sigma") { need(2); return fromChainAtom(sigmaAtom(idx[0], idx[1])); }
      if (name == "taumat") { need(2); return fromChainAtom(tauMatAtom(idx[0], idx[1])); }
      need(1);
      return fromChainAtom(pauliAtom(idx[0]));
    }

    // declared symbol
    Sym s = sym(name);
    if (!ctx.known(s)) {
      err("undeclared", "undeclared symbol '" + name + "'");
      throw ParseAbort{};
    }
    const SymbolInfo& si = ctx.info(s);
    bool primed = acceptPunct("'");
    std::vector<Index> idx;
    if (peekPunct("[")) idx = indexList();
    checkArity(ctx, s, idx, 0);
    switch (si.kind) {
      case AtomKind::Param: {
        Atom a = paramAtom(s);
        a.idx = idx;
        return fromAtom(a);
      }
      case AtomKind::ParamFn: {
        Atom a = paramFnAtom(s, idx);
        return fromAtom(a);
      }
      case AtomKind::Field: {
        Atom a = fieldAtom(s, idx, false, primed);
        if (si.shape == NcShape::Scalar) return fromAtom(a);
        return fromChainAtom(a);
      }
      default:
        err("syntax", "symbol '" + name + "' cannot appear in an expression");
        throw ParseAbort{};
    }
  }
};

}  // namespace

ParseResult parseModel(const std::string& text) {
  std::vector<ParseDiagnostic> diags;
  Parser p(text, diags);
  ParseResult r = p.parseModelFile();
  if (!r.ok() && r.diagnostics.empty())
    r.diagnostics.push_back({ParseDiagnostic::Severity::Error, "syntax",
                             "empty or unparseable input", 1, 1, 1, 1, ""});
  return r;
}

GeneratorParseResult parseGenerator(const std::string& text, const ModelSpec& model) {
  std::vector<ParseDiagnostic> diags;
  Parser p(text, diags);
  auto r = p.parseGeneratorFile(model);
  return r;
}

}  // namespace covham
