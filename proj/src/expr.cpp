#include "pmpkit/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

#include "pmpkit/errors.hpp"

namespace pmpkit {
namespace detail {

enum class Op {
  Number,
  Var,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Sin,
  Cos,
  Exp,
  Log,
  Sqrt,
  Tanh,
};

struct ExprNode {
  Op op;
  double number = 0.0;
  VarKind var_kind = VarKind::Time;
  int var_index = 0;  // zero-based for State/Control
  std::shared_ptr<const ExprNode> a, b;
};

using NodePtr = std::shared_ptr<const ExprNode>;

namespace {

NodePtr make_number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Number;
  n->number = v;
  return n;
}

NodePtr make_var(VarKind kind, int index) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Var;
  n->var_kind = kind;
  n->var_index = index;
  return n;
}

NodePtr make_unary(Op op, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

// First-order dual number for the forward AD sweep.
struct Dual {
  double v = 0.0;
  double d = 0.0;
};

inline Dual operator+(Dual x, Dual y) { return {x.v + y.v, x.d + y.d}; }
inline Dual operator-(Dual x, Dual y) { return {x.v - y.v, x.d - y.d}; }
inline Dual operator-(Dual x) { return {-x.v, -x.d}; }
inline Dual operator*(Dual x, Dual y) { return {x.v * y.v, x.d * y.v + x.v * y.d}; }
inline Dual operator/(Dual x, Dual y) {
  return {x.v / y.v, (x.d * y.v - x.v * y.d) / (y.v * y.v)};
}

struct Num {
  static double value(double x) { return x; }
  static double constant(double c) { return c; }
  static double add(double x, double y) { return x + y; }
  static double sub(double x, double y) { return x - y; }
  static double neg(double x) { return -x; }
  static double mul(double x, double y) { return x * y; }
  static double div(double x, double y) { return x / y; }
  static double sin_(double x) { return std::sin(x); }
  static double cos_(double x) { return std::cos(x); }
  static double exp_(double x) { return std::exp(x); }
  static double tanh_(double x) { return std::tanh(x); }
  static double log_(double x) { return std::log(x); }
  static double sqrt_(double x) { return std::sqrt(x); }
  static double pow_(double x, double y) { return std::pow(x, y); }
  static bool has_derivative(double) { return false; }
};

struct DualOps {
  static double value(Dual x) { return x.v; }
  static Dual constant(double c) { return {c, 0.0}; }
  static Dual add(Dual x, Dual y) { return x + y; }
  static Dual sub(Dual x, Dual y) { return x - y; }
  static Dual neg(Dual x) { return -x; }
  static Dual mul(Dual x, Dual y) { return x * y; }
  static Dual div(Dual x, Dual y) { return x / y; }
  static Dual sin_(Dual x) { return {std::sin(x.v), std::cos(x.v) * x.d}; }
  static Dual cos_(Dual x) { return {std::cos(x.v), -std::sin(x.v) * x.d}; }
  static Dual exp_(Dual x) {
    const double e = std::exp(x.v);
    return {e, e * x.d};
  }
  static Dual tanh_(Dual x) {
    const double th = std::tanh(x.v);
    return {th, (1.0 - th * th) * x.d};
  }
  static Dual log_(Dual x) { return {std::log(x.v), x.d / x.v}; }
  static Dual sqrt_(Dual x) {
    const double s = std::sqrt(x.v);
    return {s, x.d / (2.0 * s)};
  }
  static Dual pow_(Dual x, Dual y) {
    const double p = std::pow(x.v, y.v);
    if (y.d == 0.0) {
      // Constant exponent: d(x^c) = c x^(c-1) dx. Valid for x < 0 as long as
      // the primal power is defined.
      double dv = 0.0;
      if (x.d != 0.0) dv = y.v * std::pow(x.v, y.v - 1.0) * x.d;
      return {p, dv};
    }
    if (x.v <= 0.0)
      throw Error(ErrorCode::DomainError,
                  "pow with non-constant exponent requires positive base");
    return {p, p * (y.d * std::log(x.v) + y.v * x.d / x.v)};
  }
  static bool has_derivative(Dual) { return true; }
};

template <typename Ops, typename Scalar, typename VarFn>
Scalar eval_node(const ExprNode& node, const VarFn& var) {
  switch (node.op) {
    case Op::Number:
      return Ops::constant(node.number);
    case Op::Var:
      return var(node.var_kind, node.var_index);
    case Op::Neg:
      return Ops::neg(eval_node<Ops, Scalar>(*node.a, var));
    case Op::Add:
      return Ops::add(eval_node<Ops, Scalar>(*node.a, var),
                      eval_node<Ops, Scalar>(*node.b, var));
    case Op::Sub:
      return Ops::sub(eval_node<Ops, Scalar>(*node.a, var),
                      eval_node<Ops, Scalar>(*node.b, var));
    case Op::Mul:
      return Ops::mul(eval_node<Ops, Scalar>(*node.a, var),
                      eval_node<Ops, Scalar>(*node.b, var));
    case Op::Div:
      return Ops::div(eval_node<Ops, Scalar>(*node.a, var),
                      eval_node<Ops, Scalar>(*node.b, var));
    case Op::Pow:
      return Ops::pow_(eval_node<Ops, Scalar>(*node.a, var),
                       eval_node<Ops, Scalar>(*node.b, var));
    case Op::Sin:
      return Ops::sin_(eval_node<Ops, Scalar>(*node.a, var));
    case Op::Cos:
      return Ops::cos_(eval_node<Ops, Scalar>(*node.a, var));
    case Op::Exp:
      return Ops::exp_(eval_node<Ops, Scalar>(*node.a, var));
    case Op::Tanh:
      return Ops::tanh_(eval_node<Ops, Scalar>(*node.a, var));
    case Op::Log: {
      Scalar arg = eval_node<Ops, Scalar>(*node.a, var);
      if (!(Ops::value(arg) > 0.0))
        throw Error(ErrorCode::DomainError, "log of nonpositive value");
      return Ops::log_(arg);
    }
    case Op::Sqrt: {
      Scalar arg = eval_node<Ops, Scalar>(*node.a, var);
      if (Ops::value(arg) < 0.0)
        throw Error(ErrorCode::DomainError, "sqrt of negative value");
      return Ops::sqrt_(arg);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "corrupt expression node");
}

bool node_uses_control(const ExprNode& node) {
  if (node.op == Op::Var) return node.var_kind == VarKind::Control;
  if (node.a && node_uses_control(*node.a)) return true;
  if (node.b && node_uses_control(*node.b)) return true;
  return false;
}

// --- parsing ---------------------------------------------------------------

struct Parser {
  std::string_view text;
  std::size_t pos = 0;
  int n = 0, m = 0;

  [[noreturn]] void fail(ErrorCode code, const std::string& msg, std::size_t at) {
    throw Error(code, msg + " (byte " + std::to_string(at) + ")")
        .with_offset(static_cast<std::ptrdiff_t>(at));
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  NodePtr parse_expression() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (eat('+'))
        lhs = make_binary(Op::Add, lhs, parse_term());
      else if (eat('-'))
        lhs = make_binary(Op::Sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (eat('*'))
        lhs = make_binary(Op::Mul, lhs, parse_unary());
      else if (eat('/'))
        lhs = make_binary(Op::Div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  // Unary minus binds looser than ^: -q1^2 parses as -(q1^2).
  NodePtr parse_unary() {
    if (eat('-')) return make_unary(Op::Neg, parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (eat('^')) return make_binary(Op::Pow, base, parse_unary());  // right-assoc
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos >= text.size()) fail(ErrorCode::SyntaxError, "unexpected end of expression", pos);
    const char c = text[pos];
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_expression();
      if (!eat(')')) fail(ErrorCode::SyntaxError, "expected ')'", pos);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail(ErrorCode::SyntaxError, std::string("unexpected character '") + c + "'", pos);
  }

  NodePtr parse_number() {
    const std::size_t start = pos;
    double value = 0.0;
    const char* begin = text.data() + pos;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{}) fail(ErrorCode::SyntaxError, "malformed number", start);
    pos += static_cast<std::size_t>(ptr - begin);
    return make_number(value);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    const std::string_view ident = text.substr(start, pos - start);

    if (ident == "t") return make_var(VarKind::Time, 0);

    if (ident == "sin" || ident == "cos" || ident == "exp" || ident == "log" ||
        ident == "sqrt" || ident == "tanh") {
      if (!eat('(')) fail(ErrorCode::SyntaxError, "expected '(' after function name", pos);
      NodePtr arg = parse_expression();
      if (!eat(')')) fail(ErrorCode::SyntaxError, "expected ')'", pos);
      Op op = ident == "sin"    ? Op::Sin
              : ident == "cos"  ? Op::Cos
              : ident == "exp"  ? Op::Exp
              : ident == "log"  ? Op::Log
              : ident == "sqrt" ? Op::Sqrt
                                : Op::Tanh;
      return make_unary(op, std::move(arg));
    }

    if ((ident[0] == 'q' || ident[0] == 'u') && ident.size() > 1) {
      bool all_digits = true;
      for (std::size_t i = 1; i < ident.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(ident[i]))) all_digits = false;
      if (all_digits) {
        int index = 0;
        std::from_chars(ident.data() + 1, ident.data() + ident.size(), index);
        const int limit = ident[0] == 'q' ? n : m;
        if (index < 1 || index > limit)
          fail(ErrorCode::IndexOutOfRange,
               "'" + std::string(ident) + "' exceeds declared dimension " + std::to_string(limit),
               start);
        return make_var(ident[0] == 'q' ? VarKind::State : VarKind::Control, index - 1);
      }
    }

    fail(ErrorCode::UnknownIdentifier, "unknown identifier '" + std::string(ident) + "'", start);
  }
};

// --- pretty printing --------------------------------------------------------

int precedence(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Pow:
      return 4;
    default:
      return 5;
  }
}

void print_node(const ExprNode& node, std::string& out);

void print_child(const ExprNode& child, int parent_prec, bool strict, std::string& out) {
  const bool parens = strict ? precedence(child.op) <= parent_prec
                             : precedence(child.op) < parent_prec;
  if (parens) out += '(';
  print_node(child, out);
  if (parens) out += ')';
}

void print_node(const ExprNode& node, std::string& out) {
  switch (node.op) {
    case Op::Number: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", node.number);
      out += buf;
      return;
    }
    case Op::Var:
      if (node.var_kind == VarKind::Time)
        out += 't';
      else
        out += (node.var_kind == VarKind::State ? "q" : "u") + std::to_string(node.var_index + 1);
      return;
    case Op::Neg:
      out += '-';
      print_child(*node.a, precedence(Op::Neg), false, out);
      return;
    // Right children of the left-associative operators are parenthesized at
    // equal precedence so reparsing reproduces the exact evaluation order.
    case Op::Add:
      print_child(*node.a, 1, false, out);
      out += '+';
      print_child(*node.b, 1, true, out);
      return;
    case Op::Sub:
      print_child(*node.a, 1, false, out);
      out += '-';
      print_child(*node.b, 1, true, out);
      return;
    case Op::Mul:
      print_child(*node.a, 2, false, out);
      out += '*';
      print_child(*node.b, 2, true, out);
      return;
    case Op::Div:
      print_child(*node.a, 2, false, out);
      out += '/';
      print_child(*node.b, 2, true, out);
      return;
    case Op::Pow:
      print_child(*node.a, 4, true, out);
      out += '^';
      print_child(*node.b, 3, false, out);  // exponent may be a unary minus
      return;
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Log:
    case Op::Sqrt:
    case Op::Tanh: {
      const char* name = node.op == Op::Sin    ? "sin"
                         : node.op == Op::Cos  ? "cos"
                         : node.op == Op::Exp  ? "exp"
                         : node.op == Op::Log  ? "log"
                         : node.op == Op::Sqrt ? "sqrt"
                                               : "tanh";
      out += name;
      out += '(';
      print_node(*node.a, out);
      out += ')';
      return;
    }
  }
}

}  // namespace
}  // namespace detail

Expr Expr::parse(std::string_view text, int state_dim, int control_dim) {
  if (state_dim < 1 || control_dim < 1)
    throw Error(ErrorCode::InvalidArgument, "state and control dimensions must be >= 1");
  detail::Parser parser{text, 0, state_dim, control_dim};
  detail::NodePtr root = parser.parse_expression();
  parser.skip_ws();
  if (parser.pos != text.size())
    parser.fail(ErrorCode::SyntaxError, "trailing input after expression", parser.pos);
  return Expr(std::move(root), state_dim, control_dim);
}

double Expr::eval(std::span<const double> q, std::span<const double> u, double t) const {
  if (static_cast<int>(q.size()) != state_dim_ || static_cast<int>(u.size()) != control_dim_)
    throw Error(ErrorCode::DimensionMismatch, "evaluation point has wrong dimensions");
  auto var = [&](VarKind kind, int index) -> double {
    switch (kind) {
      case VarKind::Time:
        return t;
      case VarKind::State:
        return q[static_cast<std::size_t>(index)];
      case VarKind::Control:
        return u[static_cast<std::size_t>(index)];
    }
    return 0.0;
  };
  const double value = detail::eval_node<detail::Num, double>(*root_, var);
  if (!std::isfinite(value))
    throw Error(ErrorCode::NonFiniteValue, "expression evaluated to a non-finite value");
  return value;
}

std::vector<double> Expr::partials(VarKind wrt, std::span<const double> q,
                                   std::span<const double> u, double t) const {
  if (static_cast<int>(q.size()) != state_dim_ || static_cast<int>(u.size()) != control_dim_)
    throw Error(ErrorCode::DimensionMismatch, "evaluation point has wrong dimensions");
  const int count = wrt == VarKind::Time ? 1
                    : wrt == VarKind::State ? state_dim_
                                            : control_dim_;
  std::vector<double> result(static_cast<std::size_t>(count));
  for (int seed = 0; seed < count; ++seed) {
    auto var = [&](VarKind kind, int index) -> detail::Dual {
      double value = kind == VarKind::Time ? t
                     : kind == VarKind::State ? q[static_cast<std::size_t>(index)]
                                              : u[static_cast<std::size_t>(index)];
      const double tangent = (kind == wrt && index == seed) ? 1.0 : 0.0;
      return {value, tangent};
    };
    const detail::Dual out = detail::eval_node<detail::DualOps, detail::Dual>(*root_, var);
    if (!std::isfinite(out.v) || !std::isfinite(out.d))
      throw Error(ErrorCode::NonFiniteValue, "derivative evaluated to a non-finite value");
    result[static_cast<std::size_t>(seed)] = out.d;
  }
  return result;
}

std::string Expr::str() const {
  std::string out;
  detail::print_node(*root_, out);
  return out;
}

bool Expr::uses_control() const noexcept { return detail::node_uses_control(*root_); }

}  // namespace pmpkit
