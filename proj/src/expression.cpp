#include "alphabundle/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "alphabundle/errors.hpp"

namespace alphabundle::expr {

namespace {

double eval_node(const Node& node, const double* x, const Vector& theta) {
  switch (node.kind) {
    case Node::Kind::Number:
      return node.number;
    case Node::Kind::VarX:
      if (!x) throw EvaluationError("expression uses x where only theta is allowed");
      return *x;
    case Node::Kind::Param:
      return theta[node.param];
    case Node::Kind::ConstPi:
      return M_PI;
    case Node::Kind::ConstE:
      return M_E;
    case Node::Kind::Neg:
      return -eval_node(*node.a, x, theta);
    case Node::Kind::Add:
      return eval_node(*node.a, x, theta) + eval_node(*node.b, x, theta);
    case Node::Kind::Sub:
      return eval_node(*node.a, x, theta) - eval_node(*node.b, x, theta);
    case Node::Kind::Mul:
      return eval_node(*node.a, x, theta) * eval_node(*node.b, x, theta);
    case Node::Kind::Div: {
      const double den = eval_node(*node.b, x, theta);
      if (den == 0.0) throw EvaluationError("division by zero in expression");
      return eval_node(*node.a, x, theta) / den;
    }
    case Node::Kind::Pow: {
      const double base = eval_node(*node.a, x, theta);
      const double ex = eval_node(*node.b, x, theta);
      const double v = std::pow(base, ex);
      if (!std::isfinite(v)) {
        throw EvaluationError("power produced a non-finite value in expression");
      }
      return v;
    }
    case Node::Kind::Call: {
      const double v = eval_node(*node.a, x, theta);
      switch (node.fn) {
        case Fn::Exp:
          return std::exp(v);
        case Fn::Log:
          if (!(v > 0)) throw EvaluationError("log of a non-positive value in expression");
          return std::log(v);
        case Fn::Sqrt:
          if (v < 0) throw EvaluationError("sqrt of a negative value in expression");
          return std::sqrt(v);
        case Fn::Abs:
          return std::abs(v);
      }
    }
  }
  throw EvaluationError("corrupt expression tree");
}

int precedence(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Add:
    case Node::Kind::Sub:
      return 1;
    case Node::Kind::Mul:
    case Node::Kind::Div:
      return 2;
    case Node::Kind::Neg:
      return 3;
    case Node::Kind::Pow:
      return 4;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

std::string fn_name(Fn f) {
  switch (f) {
    case Fn::Exp:
      return "exp";
    case Fn::Log:
      return "log";
    case Fn::Sqrt:
      return "sqrt";
    case Fn::Abs:
      return "abs";
  }
  return "?";
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, int parent_prec, bool needs_paren_on_equal,
                 std::string& out) {
  const bool paren = precedence(child) < parent_prec ||
                     (needs_paren_on_equal && precedence(child) == parent_prec);
  if (paren) out += '(';
  print_node(child, out);
  if (paren) out += ')';
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Node::Kind::Number:
      out += format_number(n.number);
      return;
    case Node::Kind::VarX:
      out += 'x';
      return;
    case Node::Kind::Param:
      out += "th" + std::to_string(n.param + 1);
      return;
    case Node::Kind::ConstPi:
      out += "pi";
      return;
    case Node::Kind::ConstE:
      out += 'e';
      return;
    case Node::Kind::Neg:
      out += '-';
      print_child(*n.a, precedence(n), true, out);
      return;
    case Node::Kind::Add:
      print_child(*n.a, 1, false, out);
      out += " + ";
      print_child(*n.b, 1, true, out);
      return;
    case Node::Kind::Sub:
      print_child(*n.a, 1, false, out);
      out += " - ";
      print_child(*n.b, 1, true, out);
      return;
    case Node::Kind::Mul:
      print_child(*n.a, 2, false, out);
      out += '*';
      print_child(*n.b, 2, true, out);
      return;
    case Node::Kind::Div:
      print_child(*n.a, 2, false, out);
      out += '/';
      print_child(*n.b, 2, true, out);
      return;
    case Node::Kind::Pow:
      print_child(*n.a, 4, true, out);
      out += '^';
      print_child(*n.b, 4, false, out);
      return;
    case Node::Kind::Call:
      out += fn_name(n.fn);
      out += '(';
      print_node(*n.a, out);
      out += ')';
      return;
  }
}

class Parser {
 public:
  Parser(const std::string& src, int n, bool allow_x)
      : src_(src), n_(n), allow_x_(allow_x) {}

  NodePtr run() {
    skip_ws();
    if (at_end()) throw ParseError("empty expression", 1);
    NodePtr e = parse_expr();
    skip_ws();
    if (!at_end()) throw ParseError("unexpected trailing input", pos_ + 1);
    return e;
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool consume(char c) {
    skip_ws();
    if (!at_end() && peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make(Node n) { return std::make_shared<Node>(std::move(n)); }

  NodePtr parse_expr() {
    NodePtr left = parse_term();
    for (;;) {
      if (consume('+')) {
        Node n{Node::Kind::Add};
        n.a = left;
        n.b = parse_term();
        left = make(std::move(n));
      } else if (consume('-')) {
        Node n{Node::Kind::Sub};
        n.a = left;
        n.b = parse_term();
        left = make(std::move(n));
      } else {
        return left;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr left = parse_factor();
    for (;;) {
      if (consume('*')) {
        Node n{Node::Kind::Mul};
        n.a = left;
        n.b = parse_factor();
        left = make(std::move(n));
      } else if (consume('/')) {
        Node n{Node::Kind::Div};
        n.a = left;
        n.b = parse_factor();
        left = make(std::move(n));
      } else {
        return left;
      }
    }
  }

  NodePtr parse_factor() {
    if (consume('-')) {
      Node n{Node::Kind::Neg};
      n.a = parse_factor();
      return make(std::move(n));
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (consume('^')) {
      Node n{Node::Kind::Pow};
      n.a = base;
      n.b = parse_factor();  // right associative; allows 2^-3
      return make(std::move(n));
    }
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (at_end()) throw ParseError("expected a value", pos_ + 1);
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      if (!consume(')')) throw ParseError("expected ')'", pos_ + 1);
      return e;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_ + 1);
  }

  NodePtr parse_number() {
    const size_t start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.'))
      ++pos_;
    if (!at_end() && (peek() == 'e' || peek() == 'E')) {
      const size_t mark = pos_;
      ++pos_;
      if (!at_end() && (peek() == '+' || peek() == '-')) ++pos_;
      if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) {
        pos_ = mark;  // not an exponent after all (e.g. "2*e")
      } else {
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      }
    }
    const std::string text = src_.substr(start, pos_ - start);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(v)) {
      throw ParseError("malformed number '" + text + "'", static_cast<int>(start) + 1);
    }
    Node n{Node::Kind::Number};
    n.number = v;
    return make(std::move(n));
  }

  NodePtr parse_identifier() {
    const size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
      ++pos_;
    const std::string name = src_.substr(start, pos_ - start);
    const int errpos = static_cast<int>(start) + 1;

    if (name == "x") {
      if (!allow_x_) throw ParseError("'x' is not allowed in this expression", errpos);
      return make(Node{Node::Kind::VarX});
    }
    if (name == "pi") return make(Node{Node::Kind::ConstPi});
    if (name == "e") return make(Node{Node::Kind::ConstE});
    if (name.rfind("th", 0) == 0 && name.size() > 2) {
      int idx = 0;
      auto [p, ec] = std::from_chars(name.data() + 2, name.data() + name.size(), idx);
      if (ec == std::errc() && p == name.data() + name.size()) {
        if (idx < 1 || idx > n_) {
          throw ParseError("unknown identifier '" + name + "' (parameters are th1..th" +
                               std::to_string(n_) + ")",
                           errpos);
        }
        Node n{Node::Kind::Param};
        n.param = idx - 1;
        return make(std::move(n));
      }
    }
    for (Fn f : {Fn::Exp, Fn::Log, Fn::Sqrt, Fn::Abs}) {
      if (name == fn_name(f)) {
        if (!consume('(')) {
          throw ParseError("function '" + name + "' expects an argument list", pos_ + 1);
        }
        Node n{Node::Kind::Call};
        n.fn = f;
        n.a = parse_expr();
        if (!consume(')')) throw ParseError("expected ')'", pos_ + 1);
        return make(std::move(n));
      }
    }
    throw ParseError("unknown identifier '" + name + "'", errpos);
  }

  const std::string& src_;
  size_t pos_ = 0;
  int n_;
  bool allow_x_;
};

}  // namespace

double DensityExpression::eval(double x, const Vector& theta) const {
  return eval_node(*root_, &x, theta);
}

double DensityExpression::eval_theta(const Vector& theta) const {
  return eval_node(*root_, nullptr, theta);
}

std::string DensityExpression::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

DensityExpression parse_density(const std::string& src, int n, bool allow_x) {
  if (n < 1) throw ConfigError("expression family dimension must be >= 1");
  Parser p(src, n, allow_x);
  return DensityExpression(p.run(), n);
}

}  // namespace alphabundle::expr
