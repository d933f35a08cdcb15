#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace salvage {

using ParamMap = std::map<std::string, double, std::less<>>;

enum class Op { Number, Var, Param, Neg, Add, Sub, Mul, Div, Pow, Call };

/// Built-in functions. `Sign` and `Bump` extend the five user-facing
/// builtins: `sign` is needed to differentiate `abs`, `bump` is the smooth
/// compact bump exp(-1/(1-u^2)) used by the adversary (order k = k-th
/// derivative, written `bump1`, `bump2`, ... in text).
enum class Builtin { Exp, Log, Sqrt, Abs, Phi, Sign, Bump };

/// Immutable expression tree in one real variable `x`.
///
/// Copies share structure. Parameters are bound at construction, so an
/// `Expr` is closed and evaluation depends on `x` only.
class Expr {
 public:
  struct Node;

  Expr();  // the literal 0

  static Expr number(double value);
  static Expr var();
  static Expr param(std::string name, double value);
  static Expr call(Builtin fn, Expr arg, int order = 0);

  friend Expr operator-(const Expr& a);
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  static Expr pow(const Expr& base, const Expr& exponent);

  /// Builders that fold constants and drop neutral elements. Used by
  /// differentiation so that derivatives stay readable.
  static Expr add(const Expr& a, const Expr& b);
  static Expr sub(const Expr& a, const Expr& b);
  static Expr mul(const Expr& a, const Expr& b);
  static Expr div(const Expr& a, const Expr& b);
  static Expr neg(const Expr& a);
  static Expr power(const Expr& base, const Expr& exponent);

  /// Throws EvalError on log/sqrt of a negative, division by zero, or a
  /// non-finite result.
  double eval(double x) const;

  /// Exact symbolic derivative with respect to x.
  Expr derivative() const;

  /// Text that parses back to a structurally identical tree.
  std::string str() const;

  /// Structural equality (same node kinds, literals, names and shape).
  bool same_as(const Expr& other) const;

  bool depends_on_x() const;
  /// Arguments u of every abs(u) / sign(u) subterm: the expression may have
  /// a kink or jump where one of them changes sign.
  std::vector<Expr> kink_arguments() const;
  bool is_number() const;
  bool is_number(double value) const;

  Op op() const;
  double value() const;            // Number / Param
  const std::string& name() const;  // Param
  Builtin builtin() const;          // Call
  int order() const;                // Call(Bump)
  const Expr& lhs() const;          // Neg operand, binary lhs, Call argument
  const Expr& rhs() const;          // binary rhs

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr make(Node node);

  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  Op op = Op::Number;
  double value = 0.0;
  std::string name;
  Builtin fn = Builtin::Exp;
  int order = 0;
  Expr lhs;
  Expr rhs;
};

/// Parses `text` against the grammar
///
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := unary ("^" factor)?
///   unary  := "-" unary | atom
///   atom   := number | "x" | ident | ident "(" expr ")" | "(" expr ")"
///
/// Every identifier other than `x` and the builtin names must be bound in
/// `params`. Note that unary minus binds tighter than `^`: `-x^2` is (-x)^2.
Expr parse_expr(std::string_view text, const ParamMap& params = {});

std::string_view builtin_name(Builtin fn);

/// Standard normal density.
double normal_pdf(double x);

/// k-th derivative of exp(-1/(1-u^2)) on (-1, 1), zero outside.
double bump_derivative(double u, int order);

}  // namespace salvage
