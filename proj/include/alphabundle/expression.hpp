#pragma once

#include <memory>
#include <string>

#include "alphabundle/types.hpp"

namespace alphabundle::expr {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

enum class Fn { Exp, Log, Sqrt, Abs };

struct Node {
  enum class Kind {
    Number,
    VarX,
    Param,
    ConstPi,
    ConstE,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Call
  };

  Node() = default;
  explicit Node(Kind k) : kind(k) {}

  Kind kind = Kind::Number;
  double number = 0.0;  // Number
  int param = 0;        // Param, 0-based
  Fn fn = Fn::Exp;      // Call
  NodePtr a, b;
};

// A parsed log-density over x and th1..thn.
class DensityExpression {
 public:
  DensityExpression() = default;
  DensityExpression(NodePtr root, int n) : root_(std::move(root)), n_(n) {}

  double eval(double x, const Vector& theta) const;
  // theta-only expressions (quadrature hints); throws if the tree uses x.
  double eval_theta(const Vector& theta) const;
  std::string to_string() const;
  int n() const { return n_; }
  const NodePtr& root() const { return root_; }

 private:
  NodePtr root_;
  int n_ = 0;
};

// Recursive-descent parser. Grammar, loosest to tightest binding:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' factor)?          (right associative)
//   atom   := number | 'x' | 'th<k>' | 'pi' | 'e'
//           | ('exp'|'log'|'sqrt'|'abs') '(' expr ')' | '(' expr ')'
// Unary minus binds below '^', so -x^2 parses as -(x^2).
// Errors carry a 1-based character position.
DensityExpression parse_density(const std::string& src, int n, bool allow_x = true);

}  // namespace alphabundle::expr
