#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "topothermo/dual.hpp"

/// Small expression language for potentials.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' ['-'] INTEGER)?
///   primary := NUMBER | coord | IDENT | func '(' expr ')' | sum | '(' expr ')'
///   coord   := 'q' '[' (INTEGER | 'i' (('+' | '-') INTEGER)?) ']'
///   sum     := 'sum_i' ('[' ('periodic' | 'open') ']')? '(' expr ')'
///   func    := 'sin' | 'cos' | 'exp' | 'log' | 'sqrt'
///
/// IDENT names a parameter supplied with the source (or the constant `pi`).
/// `q[i±k]` is only valid inside `sum_i`; periodic sums wrap indices modulo N,
/// open sums skip sites whose neighbours fall outside [0, N).
namespace topothermo::dsl {

using ParameterSet = std::map<std::string, double, std::less<>>;

enum class BinaryOp { add, sub, mul, div };
enum class Function { sin, cos, exp, log, sqrt };
enum class Boundary { periodic, open };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Number {
  double value;  // always >= 0; negation is a separate node
};
struct Coordinate {
  bool site_relative;  // q[i+offset] when true, q[offset] otherwise
  long offset;
};
struct Parameter {
  std::string name;
};
struct Negate {
  ExprPtr operand;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct Power {
  ExprPtr base;
  int exponent;
};
struct Call {
  Function fn;
  ExprPtr arg;
};
struct SiteSum {
  Boundary boundary;
  ExprPtr body;
  long min_offset = 0;  // range of relative offsets referenced by body
  long max_offset = 0;
};

struct Expr {
  std::variant<Number, Coordinate, Parameter, Negate, Binary, Power, Call, SiteSum> node;
};

/// Structural equality (source positions are not part of the tree).
bool operator==(const Expr& a, const Expr& b);

/// A parsed potential over N coordinates.
class Ast {
public:
  Ast(ExprPtr root, std::size_t dimension) : root_(std::move(root)), dimension_(dimension) {}

  [[nodiscard]] const Expr& root() const { return *root_; }
  [[nodiscard]] const ExprPtr& root_ptr() const { return root_; }
  [[nodiscard]] std::size_t dimension() const { return dimension_; }

  /// Number of SiteSum nodes in the tree.
  [[nodiscard]] std::size_t site_sum_count() const;

  friend bool operator==(const Ast& a, const Ast& b) {
    return a.dimension_ == b.dimension_ && *a.root_ == *b.root_;
  }

private:
  ExprPtr root_;
  std::size_t dimension_;
};

/// Parses `source` for an N-dimensional potential. Throws ParseError with
/// Errc::syntax_error, Errc::index_error or Errc::unknown_identifier.
Ast parse(std::string_view source, std::size_t dimension, const ParameterSet& parameters = {});

/// Canonical text; parse(serialize(ast)) reproduces ast.
std::string serialize(const Ast& ast);

/// Evaluates the potential. Parameters must cover every name in the tree.
template <class T>
T evaluate(const Ast& ast, std::span<const T> q, const ParameterSet& parameters);

extern template double evaluate<double>(const Ast&, std::span<const double>, const ParameterSet&);
extern template Dual<double> evaluate<Dual<double>>(const Ast&, std::span<const Dual<double>>,
                                                    const ParameterSet&);
extern template Dual<Dual<double>> evaluate<Dual<Dual<double>>>(const Ast&, std::span<const Dual<Dual<double>>>,
                                                                const ParameterSet&);

}  // namespace topothermo::dsl
