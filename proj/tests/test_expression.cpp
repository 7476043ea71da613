#include <doctest.h>

#include <cmath>
#include <random>

#include "alphabundle/errors.hpp"
#include "alphabundle/expression.hpp"

using namespace alphabundle;
using expr::DensityExpression;
using expr::Node;
using expr::NodePtr;

namespace {

Vector theta2(double a, double b) {
  Vector t(2);
  t << a, b;
  return t;
}

bool same_tree(const NodePtr& a, const NodePtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Node::Kind::Number:
      return a->number == b->number;
    case Node::Kind::VarX:
      return true;
    case Node::Kind::Param:
      return a->param == b->param;
    case Node::Kind::Call:
      if (a->fn != b->fn) return false;
      return same_tree(a->a, b->a);
    case Node::Kind::Neg:
      return same_tree(a->a, b->a);
    default:
      return same_tree(a->a, b->a) && same_tree(a->b, b->b);
  }
}

std::string strip_ws(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

// Random expression trees for the structural round-trip property.
NodePtr random_tree(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  std::uniform_real_distribution<double> num(0.1, 9.9);
  Node n;
  switch (pick(rng)) {
    case 0:
      n.kind = Node::Kind::Number;
      n.number = std::round(num(rng) * 100) / 100;
      break;
    case 1:
      n.kind = Node::Kind::VarX;
      break;
    case 2:
      n.kind = Node::Kind::Param;
      n.param = static_cast<int>(rng() % 2);
      break;
    case 3:
      n.kind = Node::Kind::Neg;
      n.a = random_tree(rng, depth - 1);
      break;
    case 4:
      n.kind = Node::Kind::Call;
      n.fn = expr::Fn::Exp;
      n.a = random_tree(rng, depth - 1);
      break;
    case 5:
      n.kind = Node::Kind::Add;
      break;
    case 6:
      n.kind = Node::Kind::Sub;
      break;
    case 7:
      n.kind = Node::Kind::Mul;
      break;
    case 8:
      n.kind = Node::Kind::Div;
      break;
    default:
      n.kind = Node::Kind::Pow;
      break;
  }
  if (n.kind == Node::Kind::Add || n.kind == Node::Kind::Sub ||
      n.kind == Node::Kind::Mul || n.kind == Node::Kind::Div ||
      n.kind == Node::Kind::Pow) {
    n.a = random_tree(rng, depth - 1);
    n.b = random_tree(rng, depth - 1);
  }
  return std::make_shared<Node>(std::move(n));
}

}  // namespace

TEST_CASE("the normal log-density expression evaluates correctly") {
  const auto e = expr::parse_density(
      "-(x - th1)^2/(2*th2^2) - log(th2) - 0.5*log(2*pi)", 2);
  CHECK(e.eval(0.0, theta2(0, 1)) == doctest::Approx(-0.9189385332).epsilon(1e-9));
  CHECK(e.eval(2.0, theta2(1, 2)) ==
        doctest::Approx(-0.125 - std::log(2.0) - 0.5 * std::log(2 * M_PI)));
}

TEST_CASE("precedence and associativity") {
  const Vector th = theta2(0, 0);
  CHECK(expr::parse_density("1 + 2*3^2", 1).eval(0, th) == 19.0);
  CHECK(expr::parse_density("2^3^2", 1).eval(0, th) == 512.0);
  CHECK(expr::parse_density("2^-3", 1).eval(0, th) == 0.125);
  CHECK(expr::parse_density("-x^2", 1).eval(3.0, th) == -9.0);
  CHECK(expr::parse_density("(-x)^2", 1).eval(3.0, th) == 9.0);
  CHECK(expr::parse_density("6/3/2", 1).eval(0, th) == 1.0);
  CHECK(expr::parse_density("6 - 3 - 2", 1).eval(0, th) == 1.0);
  CHECK(expr::parse_density("pi", 1).eval(0, th) == doctest::Approx(M_PI));
  CHECK(expr::parse_density("e", 1).eval(0, th) == doctest::Approx(M_E));
  CHECK(expr::parse_density("2e3", 1).eval(0, th) == 2000.0);
}

TEST_CASE("parse errors carry positions") {
  try {
    expr::parse_density("x +", 1);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.pos == 4);
  }
  try {
    expr::parse_density("log(th3)", 2);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.pos == 5);
    CHECK(std::string(e.what()).find("th3") != std::string::npos);
  }
  CHECK_THROWS_AS(expr::parse_density("", 1), ParseError);
  CHECK_THROWS_AS(expr::parse_density("(x", 1), ParseError);
  CHECK_THROWS_AS(expr::parse_density("exp x", 1), ParseError);
  CHECK_THROWS_AS(expr::parse_density("x y", 1), ParseError);
  CHECK_THROWS_AS(expr::parse_density("1.2.3", 1), ParseError);
  CHECK_THROWS_AS(expr::parse_density("foo(x)", 1), ParseError);
}

TEST_CASE("x can be disallowed for theta-only expressions") {
  CHECK_THROWS_AS(expr::parse_density("x + th1", 1, /*allow_x=*/false), ParseError);
  const auto hint = expr::parse_density("1/th1", 1, /*allow_x=*/false);
  Vector th(1);
  th << 4.0;
  CHECK(hint.eval_theta(th) == 0.25);
}

TEST_CASE("evaluation raises domain errors") {
  const Vector th = theta2(0, 0);
  CHECK_THROWS_AS(expr::parse_density("log(x)", 1).eval(-1.0, th), EvaluationError);
  CHECK_THROWS_AS(expr::parse_density("sqrt(x)", 1).eval(-1.0, th), EvaluationError);
  CHECK_THROWS_AS(expr::parse_density("1/x", 1).eval(0.0, th), EvaluationError);
  CHECK_THROWS_AS(expr::parse_density("x^0.5", 1).eval(-2.0, th), EvaluationError);
}

TEST_CASE("printing canonical sources is the identity up to whitespace") {
  const char* corpus[] = {
      "x",
      "th1",
      "th2",
      "pi",
      "x + th1",
      "x - th1",
      "x*th1",
      "x/th2",
      "x^2",
      "-x",
      "-x^2",
      "(-x)^2",
      "x + th1 + th2",
      "x - th1 - th2",
      "x - (th1 - th2)",
      "x*(th1 + th2)",
      "(x + 1)/(th2 + 2)",
      "x/th1/th2",
      "x/(th1*th2)",
      "exp(x)",
      "log(th2)",
      "sqrt(abs(x))",
      "exp(-x^2/2)",
      "x^(th1 + 1)",
      "(x^2)^th1",
      "2^3^2",
      "-(x - th1)^2/(2*th2^2) - log(th2) - 0.5*log(2*pi)",
      "log(th1) - th1*x",
      "x*th1 - exp(th2)*x^2",
      "abs(x - th1)/sqrt(th2)",
  };
  for (const char* src : corpus) {
    const auto parsed = expr::parse_density(src, 2);
    CHECK(strip_ws(parsed.to_string()) == strip_ws(src));
  }
}

TEST_CASE("parse(print(tree)) is the identity on random trees") {
  std::mt19937_64 rng(4242);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const NodePtr tree = random_tree(rng, 4);
    const DensityExpression d(tree, 2);
    const std::string printed = d.to_string();
    const auto reparsed = expr::parse_density(printed, 2);
    CHECK(same_tree(tree, reparsed.root()));
    ++checked;
  }
  CHECK(checked == 300);
}
