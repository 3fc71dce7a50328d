#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cis/interval.hpp"

namespace cis::expr {

enum class Kind { Constant, Variable, Unary, Binary, Power };

enum class Op {
  Add, Sub, Mul, Div,  // binary
  Neg, Sin, Cos, Tan, Exp, Log, Sqrt, Abs,  // unary
};

struct Node;

/// Immutable expression tree over variables x1..xn.
///
/// Variables are stored 0-based: the text `x1` is `variable(0)`. Copies
/// share structure; every evaluator below is a pure function.
class Expr {
 public:
  static Expr constant(double value);
  static Expr variable(std::size_t index);
  static Expr unary(Op op, Expr arg);
  static Expr binary(Op op, Expr lhs, Expr rhs);
  static Expr power(Expr base, int exponent);

  Kind kind() const;
  Op op() const;
  double value() const;
  std::size_t index() const;
  int exponent() const;
  const Expr& lhs() const;
  const Expr& rhs() const;
  /// Operand of a unary node or base of a power node.
  const Expr& arg() const;

  /// One more than the largest referenced variable index (0 for constants).
  std::size_t arity() const;
  /// Fully parenthesized text that parses back to the same tree.
  std::string to_string() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

inline constexpr std::size_t kAnyArity = std::numeric_limits<std::size_t>::max();

/// Parses infix text. Precedence, tightest first: `^` (integer exponent),
/// unary minus, `* /`, `+ -`. Functions: sin cos tan exp log sqrt abs; the
/// constant `pi`. Throws ParseError for syntax errors, unknown identifiers,
/// wrong argument counts and variables beyond `num_vars`.
Expr parse(std::string_view source, std::size_t num_vars = kAnyArity);

enum class Inclusion {
  natural,     ///< interval arithmetic on the tree as written
  mean_value,  ///< f(mid) + grad_f([x]) . ([x] - mid)
  best,        ///< intersection of the two (natural when the gradient is undefined)
};

/// Point evaluation; throws DomainError outside an operator's domain.
double eval_real(const Expr& e, std::span<const double> x);

/// Inclusion function: the result contains e(p) for every p in `box`.
Interval eval_interval(const Expr& e, const Box& box, Inclusion mode = Inclusion::natural);

/// Forward-mode gradient at x. Throws DomainError at non-differentiable points.
std::vector<double> eval_gradient(const Expr& e, std::span<const double> x);

/// Enclosure of every gradient of e over `box`.
Box eval_gradient_interval(const Expr& e, const Box& box);

}  // namespace cis::expr
