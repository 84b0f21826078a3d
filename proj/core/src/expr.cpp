#include "varcert/expr.hpp"

#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>
#include <vector>

namespace varcert {
namespace detail {

enum class NodeKind : std::uint8_t { Constant, Variable, Unary, Binary };
enum class UnaryOp : std::uint8_t { Neg, Sin, Cos, Sinh, Cosh, Tanh, Exp, Log, Sqrt };
enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Pow };

struct ExprNode {
  NodeKind kind;
  UnaryOp uop{};
  BinaryOp bop{};
  double value = 0.0;        // Constant payload; for Pow, the cached exponent
  bool pow_integer = false;  // Pow only: exponent is an exact integer
  VarRef var{VarKind::X, 0, 0};
  std::shared_ptr<const ExprNode> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_constant(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Constant;
  n->value = v;
  return n;
}

NodePtr make_variable(VarRef v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Variable;
  n->var = v;
  return n;
}

bool const_value(const NodePtr& n, double* out) {
  if (n->kind != NodeKind::Constant) return false;
  if (out) *out = n->value;
  return true;
}

bool is_const_equal(const NodePtr& n, double v) {
  return n->kind == NodeKind::Constant && n->value == v;
}

NodePtr make_unary(UnaryOp op, NodePtr a);

NodePtr make_neg(NodePtr a) {
  double c;
  if (const_value(a, &c)) return make_constant(-c);
  if (a->kind == NodeKind::Unary && a->uop == UnaryOp::Neg) return a->a;
  return make_unary(UnaryOp::Neg, std::move(a));
}

NodePtr make_unary(UnaryOp op, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Unary;
  n->uop = op;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(BinaryOp op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Binary;
  n->bop = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_add(NodePtr a, NodePtr b) {
  double ca, cb;
  if (const_value(a, &ca) && const_value(b, &cb) && std::isfinite(ca + cb)) return make_constant(ca + cb);
  if (is_const_equal(a, 0.0)) return b;
  if (is_const_equal(b, 0.0)) return a;
  return make_binary(BinaryOp::Add, std::move(a), std::move(b));
}

NodePtr make_sub(NodePtr a, NodePtr b) {
  double ca, cb;
  if (const_value(a, &ca) && const_value(b, &cb) && std::isfinite(ca - cb)) return make_constant(ca - cb);
  if (is_const_equal(b, 0.0)) return a;
  if (is_const_equal(a, 0.0)) return make_neg(std::move(b));
  return make_binary(BinaryOp::Sub, std::move(a), std::move(b));
}

NodePtr make_mul(NodePtr a, NodePtr b) {
  double ca, cb;
  if (const_value(a, &ca) && const_value(b, &cb) && std::isfinite(ca * cb)) return make_constant(ca * cb);
  if (is_const_equal(a, 0.0) || is_const_equal(b, 0.0)) return make_constant(0.0);
  if (is_const_equal(a, 1.0)) return b;
  if (is_const_equal(b, 1.0)) return a;
  // normalize a constant coefficient to the left and merge nested ones,
  // so derivatives like 0.5 * (2 * z1) collapse to z1
  if (b->kind == NodeKind::Constant) std::swap(a, b);
  if (a->kind == NodeKind::Constant && b->kind == NodeKind::Binary && b->bop == BinaryOp::Mul &&
      b->a->kind == NodeKind::Constant) {
    double merged = a->value * b->a->value;
    if (std::isfinite(merged)) return make_mul(make_constant(merged), b->b);
  }
  return make_binary(BinaryOp::Mul, std::move(a), std::move(b));
}

NodePtr make_div(NodePtr a, NodePtr b) {
  double ca, cb;
  if (const_value(a, &ca) && const_value(b, &cb) && cb != 0.0 && std::isfinite(ca / cb)) return make_constant(ca / cb);
  if (is_const_equal(a, 0.0)) return make_constant(0.0);
  if (is_const_equal(b, 1.0)) return a;
  return make_binary(BinaryOp::Div, std::move(a), std::move(b));
}

bool exponent_is_integer(double c) { return std::nearbyint(c) == c && std::fabs(c) <= 1e15; }

NodePtr make_pow(NodePtr base, NodePtr exponent) {
  double c;
  if (!const_value(exponent, &c)) throw ValidationError("power exponent must be a constant");
  if (c == 1.0) return base;
  if (c == 0.0) return make_constant(1.0);
  bool int_exp = exponent_is_integer(c);
  double bv;
  if (const_value(base, &bv)) {
    bool valid = int_exp ? !(bv == 0.0 && c < 0.0) : bv > 0.0;
    if (valid) {
      double r = std::pow(bv, c);
      if (std::isfinite(r)) return make_constant(r);
    }
  }
  auto n = make_binary(BinaryOp::Pow, std::move(base), std::move(exponent));
  auto m = std::const_pointer_cast<ExprNode>(n);
  m->value = c;
  m->pow_integer = int_exp;
  return n;
}

std::string var_debug_name(const VarRef& v) {
  switch (v.kind) {
    case VarKind::X: return "x" + std::to_string(v.k);
    case VarKind::Y: return "y" + std::to_string(v.j);
    case VarKind::Z: return "z" + std::to_string(v.j) + std::to_string(v.k);
    case VarKind::Lambda: return "l" + std::to_string(v.j);
  }
  return "?";
}

double eval_node(const ExprNode* e, const EvalEnv& env) {
  switch (e->kind) {
    case NodeKind::Constant:
      return e->value;
    case NodeKind::Variable: {
      const VarRef& v = e->var;
      std::size_t idx = 0;
      std::span<const double> slot;
      switch (v.kind) {
        case VarKind::X: slot = env.x; idx = static_cast<std::size_t>(v.k - 1); break;
        case VarKind::Y: slot = env.y; idx = static_cast<std::size_t>(v.j - 1); break;
        case VarKind::Lambda: slot = env.lambda; idx = static_cast<std::size_t>(v.j - 1); break;
        case VarKind::Z: {
          slot = env.z;
          int n = env.n > 0 ? env.n : v.k;  // single-component layouts need no stride
          idx = static_cast<std::size_t>((v.j - 1) * n + (v.k - 1));
          break;
        }
      }
      if (idx >= slot.size()) throw EvalError("unbound variable '" + var_debug_name(v) + "'");
      return slot[idx];
    }
    case NodeKind::Unary: {
      double a = eval_node(e->a.get(), env);
      switch (e->uop) {
        case UnaryOp::Neg: return -a;
        case UnaryOp::Sin: return std::sin(a);
        case UnaryOp::Cos: return std::cos(a);
        case UnaryOp::Sinh: return std::sinh(a);
        case UnaryOp::Cosh: return std::cosh(a);
        case UnaryOp::Tanh: return std::tanh(a);
        case UnaryOp::Exp: return std::exp(a);
        case UnaryOp::Log:
          if (a <= 0.0) throw EvalError("log of non-positive value");
          return std::log(a);
        case UnaryOp::Sqrt:
          if (a < 0.0) throw EvalError("sqrt of negative value");
          return std::sqrt(a);
      }
      break;
    }
    case NodeKind::Binary: {
      double a = eval_node(e->a.get(), env);
      if (e->bop == BinaryOp::Pow) {
        double c = e->value;
        if (e->pow_integer) {
          if (a == 0.0 && c < 0.0) throw EvalError("zero base raised to negative power");
        } else if (a <= 0.0) {
          throw EvalError("non-integer power of non-positive base");
        }
        return std::pow(a, c);
      }
      double b = eval_node(e->b.get(), env);
      switch (e->bop) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div:
          if (b == 0.0) throw EvalError("division by zero");
          return a / b;
        case BinaryOp::Pow: break;  // handled above
      }
      break;
    }
  }
  throw EvalError("malformed expression node");
}

NodePtr diff_node(const NodePtr& e, const VarRef& v) {
  switch (e->kind) {
    case NodeKind::Constant:
      return make_constant(0.0);
    case NodeKind::Variable:
      return make_constant(e->var == v ? 1.0 : 0.0);
    case NodeKind::Unary: {
      NodePtr da = diff_node(e->a, v);
      switch (e->uop) {
        case UnaryOp::Neg: return make_neg(da);
        case UnaryOp::Sin: return make_mul(make_unary(UnaryOp::Cos, e->a), da);
        case UnaryOp::Cos: return make_neg(make_mul(make_unary(UnaryOp::Sin, e->a), da));
        case UnaryOp::Sinh: return make_mul(make_unary(UnaryOp::Cosh, e->a), da);
        case UnaryOp::Cosh: return make_mul(make_unary(UnaryOp::Sinh, e->a), da);
        case UnaryOp::Tanh: {
          NodePtr t = make_unary(UnaryOp::Tanh, e->a);
          NodePtr sech2 = make_sub(make_constant(1.0), make_pow(t, make_constant(2.0)));
          return make_mul(sech2, da);
        }
        case UnaryOp::Exp: return make_mul(make_unary(UnaryOp::Exp, e->a), da);
        case UnaryOp::Log: return make_div(da, e->a);
        case UnaryOp::Sqrt:
          return make_div(da, make_mul(make_constant(2.0), make_unary(UnaryOp::Sqrt, e->a)));
      }
      break;
    }
    case NodeKind::Binary: {
      switch (e->bop) {
        case BinaryOp::Add: return make_add(diff_node(e->a, v), diff_node(e->b, v));
        case BinaryOp::Sub: return make_sub(diff_node(e->a, v), diff_node(e->b, v));
        case BinaryOp::Mul:
          return make_add(make_mul(diff_node(e->a, v), e->b), make_mul(e->a, diff_node(e->b, v)));
        case BinaryOp::Div: {
          NodePtr num = make_sub(make_mul(diff_node(e->a, v), e->b), make_mul(e->a, diff_node(e->b, v)));
          return make_div(num, make_pow(e->b, make_constant(2.0)));
        }
        case BinaryOp::Pow: {
          // exponent is constant by construction: d(a^c) = c*a^(c-1)*da
          double c = e->value;
          NodePtr deriv = make_mul(make_constant(c), make_pow(e->a, make_constant(c - 1.0)));
          return make_mul(deriv, diff_node(e->a, v));
        }
      }
      break;
    }
  }
  throw ValidationError("malformed expression node in diff");
}

bool same_node(const ExprNode* a, const ExprNode* b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::Constant: return a->value == b->value;
    case NodeKind::Variable: return a->var == b->var;
    case NodeKind::Unary: return a->uop == b->uop && same_node(a->a.get(), b->a.get());
    case NodeKind::Binary:
      return a->bop == b->bop && same_node(a->a.get(), b->a.get()) && same_node(a->b.get(), b->b.get());
  }
  return false;
}

bool depends_node(const ExprNode* e, const VarRef& v) {
  switch (e->kind) {
    case NodeKind::Constant: return false;
    case NodeKind::Variable: return e->var == v;
    case NodeKind::Unary: return depends_node(e->a.get(), v);
    case NodeKind::Binary: return depends_node(e->a.get(), v) || depends_node(e->b.get(), v);
  }
  return false;
}

void index_use_node(const ExprNode* e, Expr::IndexUse& u) {
  switch (e->kind) {
    case NodeKind::Constant: return;
    case NodeKind::Variable: {
      const VarRef& v = e->var;
      switch (v.kind) {
        case VarKind::X: u.max_x = std::max(u.max_x, v.k); break;
        case VarKind::Y: u.max_yj = std::max(u.max_yj, v.j); break;
        case VarKind::Z:
          u.max_zj = std::max(u.max_zj, v.j);
          u.max_zk = std::max(u.max_zk, v.k);
          break;
        case VarKind::Lambda: u.max_lj = std::max(u.max_lj, v.j); break;
      }
      return;
    }
    case NodeKind::Unary: index_use_node(e->a.get(), u); return;
    case NodeKind::Binary:
      index_use_node(e->a.get(), u);
      index_use_node(e->b.get(), u);
      return;
  }
}

std::string format_constant(double v) {
  char buf[40];
  if (std::nearbyint(v) == v && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

const char* unary_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Sinh: return "sinh";
    case UnaryOp::Cosh: return "cosh";
    case UnaryOp::Tanh: return "tanh";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Log: return "log";
    case UnaryOp::Sqrt: return "sqrt";
  }
  return "?";
}

// precedence levels: + - (1), * / (2), ^ (3), atoms (9)
int node_prec(const ExprNode* e) {
  switch (e->kind) {
    case NodeKind::Constant: return e->value < 0.0 ? 8 : 9;  // "-2" is a negated atom
    case NodeKind::Variable: return 9;
    case NodeKind::Unary: return e->uop == UnaryOp::Neg ? 8 : 9;  // calls self-delimit
    case NodeKind::Binary:
      switch (e->bop) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 2;
        case BinaryOp::Pow: return 3;
      }
  }
  return 9;
}

void print_node(const ExprNode* e, const Dims& dims, std::string& out);

void print_child(const ExprNode* child, const Dims& dims, int min_prec, std::string& out) {
  if (node_prec(child) < min_prec) {
    out += '(';
    print_node(child, dims, out);
    out += ')';
  } else {
    print_node(child, dims, out);
  }
}

void print_node(const ExprNode* e, const Dims& dims, std::string& out) {
  switch (e->kind) {
    case NodeKind::Constant:
      out += format_constant(e->value);
      return;
    case NodeKind::Variable:
      out += e->var.name(dims);
      return;
    case NodeKind::Unary:
      if (e->uop == UnaryOp::Neg) {
        out += '-';
        print_child(e->a.get(), dims, 8, out);
      } else {
        out += unary_name(e->uop);
        out += '(';
        print_node(e->a.get(), dims, out);
        out += ')';
      }
      return;
    case NodeKind::Binary: {
      int prec = node_prec(e);
      const char* op = "";
      switch (e->bop) {
        case BinaryOp::Add: op = " + "; break;
        case BinaryOp::Sub: op = " - "; break;
        case BinaryOp::Mul: op = " * "; break;
        case BinaryOp::Div: op = " / "; break;
        case BinaryOp::Pow: op = " ^ "; break;
      }
      if (e->bop == BinaryOp::Pow) {
        // both sides of ^ must print as atoms (possibly negated)
        print_child(e->a.get(), dims, 8, out);
        out += op;
        print_child(e->b.get(), dims, 8, out);
      } else {
        print_child(e->a.get(), dims, prec, out);
        out += op;
        print_child(e->b.get(), dims, prec + 1, out);
      }
      return;
    }
  }
}

}  // namespace
}  // namespace detail

using detail::NodePtr;

std::string VarRef::name(const Dims& dims) const {
  switch (kind) {
    case VarKind::X: return "x" + std::to_string(k);
    case VarKind::Y: return "y" + std::to_string(j);
    case VarKind::Z:
      if (dims.N == 1) return "z" + std::to_string(k);
      return "z" + std::to_string(j) + std::to_string(k);
    case VarKind::Lambda: return "l" + std::to_string(j);
  }
  return "?";
}

Expr::Expr() : node_(detail::make_constant(0.0)) {}

Expr Expr::constant(double v) { return Expr(detail::make_constant(v)); }
Expr Expr::variable(VarRef v) { return Expr(detail::make_variable(v)); }

Expr operator+(const Expr& a, const Expr& b) { return Expr(detail::make_add(a.node_, b.node_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(detail::make_sub(a.node_, b.node_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(detail::make_mul(a.node_, b.node_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(detail::make_div(a.node_, b.node_)); }
Expr operator-(const Expr& a) { return Expr(detail::make_neg(a.node_)); }

Expr Expr::pow(const Expr& base, const Expr& exponent) { return Expr(detail::make_pow(base.node_, exponent.node_)); }
Expr Expr::sin(const Expr& a) { return Expr(detail::make_unary(detail::UnaryOp::Sin, a.node_)); }
Expr Expr::cos(const Expr& a) { return Expr(detail::make_unary(detail::UnaryOp::Cos, a.node_)); }
Expr Expr::sinh(const Expr& a) { return Expr(detail::make_unary(detail::UnaryOp::Sinh, a.node_)); }
Expr Expr::cosh(const Expr& a) { return Expr(detail::make_unary(detail::UnaryOp::Cosh, a.node_)); }
Expr Expr::tanh(const Expr& a) { return Expr(detail::make_unary(detail::UnaryOp::Tanh, a.node_)); }
Expr Expr::exp(const Expr& a) { return Expr(detail::make_unary(detail::UnaryOp::Exp, a.node_)); }
Expr Expr::log(const Expr& a) { return Expr(detail::make_unary(detail::UnaryOp::Log, a.node_)); }
Expr Expr::sqrt(const Expr& a) { return Expr(detail::make_unary(detail::UnaryOp::Sqrt, a.node_)); }

double Expr::eval(const EvalEnv& env) const { return detail::eval_node(node_.get(), env); }
Expr Expr::diff(const VarRef& v) const { return Expr(detail::diff_node(node_, v)); }

bool Expr::is_constant() const { return node_->kind == detail::NodeKind::Constant; }

double Expr::constant_value() const {
  if (!is_constant()) throw ValidationError("expression is not a constant");
  return node_->value;
}

bool Expr::is_zero() const { return is_constant() && node_->value == 0.0; }

bool Expr::depends_on(const VarRef& v) const { return detail::depends_node(node_.get(), v); }

bool Expr::IndexUse::uses(VarKind kind) const {
  switch (kind) {
    case VarKind::X: return max_x > 0;
    case VarKind::Y: return max_yj > 0;
    case VarKind::Z: return max_zj > 0;
    case VarKind::Lambda: return max_lj > 0;
  }
  return false;
}

Expr::IndexUse Expr::index_use() const {
  IndexUse u;
  detail::index_use_node(node_.get(), u);
  return u;
}

std::string Expr::str(const Dims& dims) const {
  std::string out;
  detail::print_node(node_.get(), dims, out);
  return out;
}

bool Expr::same_tree(const Expr& other) const { return detail::same_node(node_.get(), other.node_.get()); }

namespace {

struct Parser {
  std::string_view s;
  std::size_t pos = 0;
  Dims dims;
  VarClassSet allowed;

  Parser(std::string_view text, const Dims& d, VarClassSet a) : s(text), dims(d), allowed(a) {}

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\n' || s[pos] == '\r')) ++pos;
  }
  int peek() {
    skip_ws();
    return pos < s.size() ? static_cast<unsigned char>(s[pos]) : -1;
  }
  bool eat(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg, std::size_t at) { throw ParseError(msg, at); }

  Expr parse() {
    Expr e = expression();
    if (peek() != -1) fail("unexpected trailing input", pos);
    return e;
  }

  Expr expression() {
    Expr e = term();
    for (;;) {
      if (eat('+')) {
        e = e + term();
      } else if (eat('-')) {
        e = e - term();
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (eat('*')) {
        e = e * factor();
      } else if (eat('/')) {
        e = e / factor();
      } else {
        return e;
      }
    }
  }

  Expr factor() {
    Expr base = atom();
    if (eat('^')) {
      skip_ws();
      std::size_t exp_at = pos;
      Expr exponent = atom();
      try {
        return Expr::pow(base, exponent);
      } catch (const ValidationError&) {
        fail("power exponent must be a constant", exp_at);
      }
    }
    return base;
  }

  Expr atom() {
    int c = peek();
    if (c == '-') {
      ++pos;
      return -atom();
    }
    if (c == '(') {
      ++pos;
      Expr e = expression();
      if (!eat(')')) fail("expected ')'", pos);
      return e;
    }
    if (c >= '0' && c <= '9') return number();
    if (c == '.') return number();
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return identifier();
    fail("expected expression", pos);
  }

  Expr number() {
    skip_ws();
    double v = 0.0;
    const char* begin = s.data() + pos;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc()) fail("malformed number", pos);
    pos += static_cast<std::size_t>(p - begin);
    return Expr::constant(v);
  }

  Expr identifier() {
    skip_ws();
    std::size_t start = pos;
    std::size_t i = pos;
    while (i < s.size() && ((s[i] >= 'a' && s[i] <= 'z') || (s[i] >= 'A' && s[i] <= 'Z'))) ++i;
    std::string word(s.substr(pos, i - pos));
    std::size_t digit_start = i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    std::string digits(s.substr(digit_start, i - digit_start));
    pos = i;

    if (digits.empty() && peek() == '(') {
      ++pos;  // consume '('
      Expr arg = expression();
      if (!eat(')')) fail("expected ')'", pos);
      if (word == "sin") return Expr::sin(arg);
      if (word == "cos") return Expr::cos(arg);
      if (word == "sinh") return Expr::sinh(arg);
      if (word == "cosh") return Expr::cosh(arg);
      if (word == "tanh") return Expr::tanh(arg);
      if (word == "exp") return Expr::exp(arg);
      if (word == "log") return Expr::log(arg);
      if (word == "sqrt") return Expr::sqrt(arg);
      fail("unknown function '" + word + "'", start);
    }

    if (digits.empty()) {
      if (word == "pi") return Expr::constant(3.14159265358979323846);
      if (word == "e") return Expr::constant(2.71828182845904523536);
      fail("unknown identifier '" + word + "'", start);
    }

    VarRef v{};
    if (word == "x") {
      v = var_x(parse_index(digits, start));
      if (v.k < 1 || v.k > dims.n) fail("index out of range in '" + word + digits + "'", start);
    } else if (word == "y") {
      v = var_y(parse_index(digits, start));
      if (v.j < 1 || v.j > dims.N) fail("index out of range in '" + word + digits + "'", start);
    } else if (word == "l") {
      v = var_lambda(parse_index(digits, start));
      if (v.j < 1 || v.j > dims.N) fail("index out of range in '" + word + digits + "'", start);
    } else if (word == "z") {
      if (dims.N == 1) {
        v = var_z(1, parse_index(digits, start));
        if (v.k < 1 || v.k > dims.n) fail("index out of range in '" + word + digits + "'", start);
      } else {
        if (dims.n > 9 || dims.N > 9)
          fail("z indices are ambiguous for more than 9 components or axes", start);
        if (digits.size() != 2) fail("expected z<j><k> with single-digit indices", start);
        v = var_z(digits[0] - '0', digits[1] - '0');
        if (v.j < 1 || v.j > dims.N || v.k < 1 || v.k > dims.n)
          fail("index out of range in '" + word + digits + "'", start);
      }
    } else {
      fail("unknown identifier '" + word + digits + "'", start);
    }

    if (!allowed.contains(v.kind)) fail("variable '" + word + digits + "' not allowed in this context", start);
    return Expr::variable(v);
  }

  int parse_index(const std::string& digits, std::size_t at) {
    if (digits.size() > 6) fail("index out of range", at);
    return std::stoi(digits);
  }
};

}  // namespace

Expr parse_expr(std::string_view text, const Dims& dims, VarClassSet allowed) {
  if (dims.n < 1 || dims.N < 1) throw ValidationError("dimensions must be at least 1");
  Parser p(text, dims, allowed);
  return p.parse();
}

void validate_vars(const Expr& e, const Dims& dims, VarClassSet allowed, const std::string& what) {
  Expr::IndexUse u = e.index_use();
  auto bad = [&](const std::string& msg) { throw ValidationError(what + ": " + msg); };
  if (u.max_x > dims.n) bad("x index " + std::to_string(u.max_x) + " exceeds n = " + std::to_string(dims.n));
  if (u.max_yj > dims.N) bad("y index " + std::to_string(u.max_yj) + " exceeds N = " + std::to_string(dims.N));
  if (u.max_zj > dims.N) bad("z component " + std::to_string(u.max_zj) + " exceeds N = " + std::to_string(dims.N));
  if (u.max_zk > dims.n) bad("z axis " + std::to_string(u.max_zk) + " exceeds n = " + std::to_string(dims.n));
  if (u.max_lj > dims.N) bad("lambda index " + std::to_string(u.max_lj) + " exceeds N = " + std::to_string(dims.N));
  if (u.uses(VarKind::X) && !allowed.contains(VarKind::X)) bad("may not depend on x");
  if (u.uses(VarKind::Y) && !allowed.contains(VarKind::Y)) bad("may not depend on y");
  if (u.uses(VarKind::Z) && !allowed.contains(VarKind::Z)) bad("may not depend on z");
  if (u.uses(VarKind::Lambda) && !allowed.contains(VarKind::Lambda)) bad("may not depend on lambda");
}

}  // namespace varcert
