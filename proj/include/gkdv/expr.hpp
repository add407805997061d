#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace gkdv {

// Expression trees over a single variable u.  Nodes are immutable and
// shared, so copying an Expr is cheap and subtrees may be reused freely.
enum class NodeKind {
  constant,
  variable,
  add,   // n-ary sum
  mul,   // n-ary product
  neg,
  div,   // children: numerator, denominator
  pow,   // children: base, exponent
  exp_fn,
  log_fn,  // natural log
  sin_fn,
  cos_fn,
  abs_fn
};

class Expr {
 public:
  struct Node;  // definition private to the implementation

  Expr() = default;

  static Expr constant(double value);
  static Expr variable();
  static Expr add(std::vector<Expr> terms);
  static Expr mul(std::vector<Expr> factors);
  static Expr neg(Expr inner);
  static Expr div(Expr numerator, Expr denominator);
  static Expr pow(Expr base, Expr exponent);
  static Expr call(NodeKind fn, Expr argument);  // exp/log/sin/cos/abs

  bool empty() const { return node_ == nullptr; }
  NodeKind kind() const;
  double constant_value() const;  // valid only when kind() == constant
  const std::vector<Expr>& children() const;

  // Structural identity of the shared node, used by simplify memoization.
  const void* id() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Parse an expression in u.  Grammar (loosest to tightest): sums,
/// products/quotients, unary minus, then '^' which is right-associative and
/// binds tighter than unary minus ("-u^2" is -(u^2), "2^-1" is fine).
/// Throws Errc::syntax_error with the byte offset of the problem, or
/// Errc::unknown_identifier for names other than u and the function set.
Expr parse(std::string_view text);

/// Evaluate at a point.  Throws Errc::domain_error naming the offending
/// subexpression for log of a non-positive value, division by zero, and
/// powers with a negative base and non-integer exponent (or 0^negative).
double eval(const Expr& e, double u);

/// Exact derivative with respect to u.  Powers with non-constant exponent
/// differentiate through the exp/log rewrite; abs differentiates to
/// sign(x)*x' away from zero (evaluating it at zero raises domain_error).
Expr diff(const Expr& e);

Expr nth_derivative(const Expr& e, int n);

/// Constant folding plus the usual identity eliminations (x+0, x*1, x*0,
/// x^1, x^0, exp(0), log(1), double negation).  Value-preserving wherever
/// the input is defined; folding may widen the domain (0*log(u) becomes 0).
Expr simplify(const Expr& e);

std::string to_string(const Expr& e);

/// Open or closed interval of admissible u values.
struct DomainInterval {
  double lo = -1.0;
  double hi = 1.0;
  bool lo_open = true;
  bool hi_open = true;
};

}  // namespace gkdv
