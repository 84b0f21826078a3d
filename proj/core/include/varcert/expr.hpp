#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "varcert/errors.hpp"

namespace varcert {

// Problem dimensions: n independent variables x1..xn, N dependent
// components y1..yN (so the gradient slot z has N*n entries).
struct Dims {
  int n = 1;
  int N = 1;
};

// Variable classes a formula may mention.
enum class VarKind : std::uint8_t { X, Y, Z, Lambda };

// A concrete variable.  Indices are 1-based, matching the surface syntax:
//   X       -> x<k>          (j unused, 0)
//   Y       -> y<j>          (k unused, 0)
//   Z       -> z<j><k>       (written z<k> when N = 1)
//   Lambda  -> l<j>
struct VarRef {
  VarKind kind;
  int j = 0;
  int k = 0;

  std::string name(const Dims& dims) const;
  bool operator==(const VarRef&) const = default;
};

inline VarRef var_x(int k) { return {VarKind::X, 0, k}; }
inline VarRef var_y(int j) { return {VarKind::Y, j, 0}; }
inline VarRef var_z(int j, int k) { return {VarKind::Z, j, k}; }
inline VarRef var_lambda(int j) { return {VarKind::Lambda, j, 0}; }

// Set of variable classes permitted in a given formula slot.
class VarClassSet {
 public:
  static VarClassSet lagrangian() { return VarClassSet(bit(VarKind::X) | bit(VarKind::Y) | bit(VarKind::Z)); }
  static VarClassSet family() { return VarClassSet(bit(VarKind::X) | bit(VarKind::Lambda)); }
  static VarClassSet spatial() { return VarClassSet(bit(VarKind::X)); }
  static VarClassSet all() { return VarClassSet(0xF); }

  bool contains(VarKind v) const { return (mask_ & bit(v)) != 0; }

 private:
  explicit VarClassSet(std::uint8_t m) : mask_(m) {}
  static std::uint8_t bit(VarKind v) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(v)); }
  std::uint8_t mask_;
};

// Values bound for evaluation.  An empty span means the whole class is
// unbound; referencing a variable from an unbound class (or past the end
// of a bound span) raises EvalError.  z is row-major by component:
// z[(j-1)*n + (k-1)].
struct EvalEnv {
  std::span<const double> x{};
  std::span<const double> y{};
  std::span<const double> z{};
  std::span<const double> lambda{};
  int n = 0;  // axis count used to index z
};

namespace detail {
struct ExprNode;
}

// Immutable expression tree over the variable classes above.
// Construction folds constants (c1 op c2) and eliminates trivial
// identities (0*e, e+0, e^1, ...); nothing else is rewritten, so
// printed formulas stay recognizable.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr constant(double v);
  static Expr variable(VarRef v);

  friend Expr operator+(const Expr&, const Expr&);
  friend Expr operator-(const Expr&, const Expr&);
  friend Expr operator*(const Expr&, const Expr&);
  friend Expr operator/(const Expr&, const Expr&);
  friend Expr operator-(const Expr&);

  // Exponent must fold to a constant; throws ValidationError otherwise.
  static Expr pow(const Expr& base, const Expr& exponent);
  static Expr sin(const Expr&);
  static Expr cos(const Expr&);
  static Expr sinh(const Expr&);
  static Expr cosh(const Expr&);
  static Expr tanh(const Expr&);
  static Expr exp(const Expr&);
  static Expr log(const Expr&);
  static Expr sqrt(const Expr&);

  double eval(const EvalEnv& env) const;

  // Exact partial derivative with respect to one variable, with the same
  // folding as the factory functions applied to the result.
  Expr diff(const VarRef& v) const;

  bool is_constant() const;
  double constant_value() const;  // requires is_constant()
  bool is_zero() const;

  bool depends_on(const VarRef& v) const;
  // Largest indices mentioned, for dimension validation: returns
  // {max x-axis, max y-component, max z-component, max z-axis, max lambda}.
  struct IndexUse {
    int max_x = 0, max_yj = 0, max_zj = 0, max_zk = 0, max_lj = 0;
    bool uses(VarKind kind) const;
  };
  IndexUse index_use() const;

  // Printable form; parsing it back yields a structurally equal tree.
  std::string str(const Dims& dims) const;
  bool same_tree(const Expr& other) const;

 private:
  explicit Expr(std::shared_ptr<const detail::ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::ExprNode> node_;
  friend struct detail::ExprNode;
  friend class ExprBuilder;
};

// Parse per the grammar
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' atom)?
//   atom   := number | ident | func '(' expr ')' | '(' expr ')' | '-' atom
// Identifiers must belong to `allowed` and have indices within `dims`;
// pi and e denote the usual constants.  Throws ParseError.
Expr parse_expr(std::string_view text, const Dims& dims, VarClassSet allowed);

// Checks that every variable in e is allowed and within dims; throws
// ValidationError naming the offending variable.  `what` names the slot
// being validated ("f", "y0[1]", ...) for the error message.
void validate_vars(const Expr& e, const Dims& dims, VarClassSet allowed, const std::string& what);

}  // namespace varcert
