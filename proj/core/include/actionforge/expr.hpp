#pragma once

#include <Eigen/Core>

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace actionforge::expr {

using Vec = Eigen::VectorXd;

enum class Kind { Constant, VarT, VarX, Add, Sub, Mul, Div, Pow, Neg, Call };

enum class Func { Sin, Cos, Exp, Log, AbsSq };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable expression tree node. Children are shared; trees may alias
/// subtrees freely (differentiation reuses operands of the input tree).
struct Node {
  Kind kind;
  int pos = 0;        ///< source position (0-based offset), kept for error reporting
  double value = 0;   ///< Constant
  int index = 0;      ///< VarX, 1-based coordinate
  long exponent = 0;  ///< Pow
  Func func = Func::Sin;
  NodePtr lhs;  ///< left operand; sole operand for Neg/Call/Pow
  NodePtr rhs;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int position)
      : std::runtime_error(msg + " at position " + std::to_string(position)), position(position) {}
  int position;
};

struct EvalError : std::runtime_error {
  EvalError(const std::string& msg, int position)
      : std::runtime_error(msg + " (node at position " + std::to_string(position) + ")"),
        position(position) {}
  int position;
};

/// Parses F(t, x1..xN). Precedence ^ > unary- > * / > + - ; + - * / are
/// left-associative; the ^ exponent must be an (optionally negated) integer
/// literal, which keeps differentiation closed-form. Whitespace is
/// insignificant. Recognized identifiers: t, x1..xN, sin, cos, exp, log,
/// abs_sq. Throws ParseError with a source position on malformed input.
NodePtr parse(std::string_view source, int dim);

/// Exact symbolic d/dx_i (1-based i). No simplification pass is applied.
NodePtr differentiate(const NodePtr& ast, int coordinate);

/// IEEE double evaluation. Throws EvalError on division by zero, log of a
/// non-positive value, or a zero base raised to a negative power.
double eval(const NodePtr& ast, double t, const Vec& x);

/// Canonical rendering with minimal parentheses; parse(to_string(ast))
/// evaluates identically to ast.
std::string to_string(const NodePtr& ast);

// Node constructors, used by the differentiator and handy in tests.
NodePtr constant(double v);
NodePtr var_t();
NodePtr var_x(int index);
NodePtr binary(Kind kind, NodePtr lhs, NodePtr rhs);
NodePtr power(NodePtr base, long exponent);
NodePtr negate(NodePtr operand);
NodePtr call(Func f, NodePtr operand);

}  // namespace actionforge::expr
