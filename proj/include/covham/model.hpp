#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "covham/expr.hpp"
#include "covham/normalize.hpp"

namespace covham {

struct FieldDecl {
  std::string name;
  FieldRank rank = FieldRank::Scalar;
  Complexity cx = Complexity::Real;
};

struct ParamDecl {
  std::string name;
  std::optional<Rat> value;
  bool nilpotent = false;
};

struct ParamFnDecl {
  std::string name;
  std::vector<std::pair<IndexSpace, bool>> slots;
  bool xdep = true;
  std::vector<std::string> fieldDeps;
  bool nilpotent = false;
};

struct ModelSpec {
  std::string name;
  std::vector<FieldDecl> fields;
  std::vector<ParamDecl> params;
  std::vector<ParamFnDecl> paramfns;
  std::vector<std::string> algebras;            // "dirac", "su2"
  std::vector<std::string> antisymMomenta;      // fields with antisymmetric momentum tensors
  std::optional<Expr> lagrangian;
  std::optional<Expr> hamiltonian;
  std::map<std::string, std::string> metadata;
  std::shared_ptr<Context> ctx;

  const Context& context() const { return *ctx; }
};

struct ParseDiagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string code;     // lex, syntax, undeclared, index-arity, nonscalar-density, ...
  std::string message;
  int line = 1, col = 1;
  int endLine = 1, endCol = 1;
  std::string hint;

  std::string str() const;
};

struct ParseResult {
  std::optional<ModelSpec> model;
  std::vector<ParseDiagnostic> diagnostics;
  bool ok() const { return model.has_value(); }
};

ParseResult parseModel(const std::string& text);

// Deterministic text form; parseModel(serializeModel(m)) reproduces m.
std::string serializeModel(const ModelSpec& m);

// Expression in re-parseable surface syntax.
std::string serializeExpr(const Expr& e, const Context& ctx);

// Structural equality up to normalization of the densities.
bool sameModel(const ModelSpec& a, const ModelSpec& b);

// ---- generating-function definition files ----

enum class GenKind { F1, F2, F3, F4 };

struct GeneratingFunction {
  GenKind kind = GenKind::F2;
  // Component expressions carrying one free spacetime index named `mu`.
  Expr component;          // F^mu
  Sym componentIndex;      // the free index name (upper)
  std::optional<Expr> characteristic;   // g_al^mu for infinitesimal F2 kinds
  std::optional<Expr> lagrangianShift;  // f_al^be
  std::string name;
  std::shared_ptr<Context> ctx;  // model context plus generator-local symbols
};

struct GeneratorParseResult {
  std::optional<GeneratingFunction> generator;
  std::vector<ParseDiagnostic> diagnostics;
  bool ok() const { return generator.has_value(); }
};

// Parses a `generator NAME kind F2 { ... }` block against an existing model
// context (primed momenta etc. resolve against the model's fields).
GeneratorParseResult parseGenerator(const std::string& text, const ModelSpec& model);

}  // namespace covham
