#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace carnot {

/// Exact rational scalar. Literals are never floats; doubles enter only
/// through the lossless dyadic conversion in Expr::from_double.
using Rational = boost::multiprecision::cpp_rational;

enum class Func : std::uint8_t { Sin, Cos, Tan, Exp, Ln, Sqrt };

const char* func_name(Func f);

/// Immutable symbolic scalar expression over an indexed coordinate list.
///
/// Trees are kept in a canonical form by construction: sums and products
/// are flat, sorted, and coefficient-collected; rational arithmetic is
/// folded exactly; sin^2 u + cos^2 u collapses to 1 for syntactically
/// equal u. Structural equality of canonical trees is decidable and
/// cheap (hash fast path).
class Expr {
 public:
  enum class Kind : std::uint8_t { Num, Coord, Fun, Pow, Mul, Add };

  Expr();  // zero literal

  static Expr num(Rational r);
  static Expr integer(long long v);
  static Expr rational(long long num, long long den);
  static Expr coord(int index);
  /// Exact dyadic embedding of a finite double (no rounding).
  static Expr from_double(double v);

  Kind kind() const;
  bool is_num() const;
  bool is_zero() const;
  bool is_one() const;

  const Rational& value() const;          // Num
  int coord_index() const;                // Coord
  Func fun() const;                       // Fun
  const Expr& arg() const;                // Fun argument
  const Expr& base() const;               // Pow base
  int exponent() const;                   // Pow exponent
  const std::vector<Expr>& args() const;  // Add terms / Mul factors

  std::size_t hash() const;
  std::uint32_t size() const;  // node count

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend int compare(const Expr& a, const Expr& b);
  friend class ExprBuilder;
};

/// Deterministic total order on canonical trees (used for sorting terms
/// and factors; fixes the printed form).
int compare(const Expr& a, const Expr& b);

// Canonicalizing constructors.
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr pow(Expr base, int exponent);
Expr apply_fun(Func f, Expr arg);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
/// Quotient a/b, represented as a * b^-1.
Expr quotient(const Expr& a, const Expr& b);

inline Expr sin(Expr e) { return apply_fun(Func::Sin, std::move(e)); }
inline Expr cos(Expr e) { return apply_fun(Func::Cos, std::move(e)); }
inline Expr tan(Expr e) { return apply_fun(Func::Tan, std::move(e)); }
inline Expr exp(Expr e) { return apply_fun(Func::Exp, std::move(e)); }
inline Expr ln(Expr e) { return apply_fun(Func::Ln, std::move(e)); }
inline Expr sqrt(Expr e) { return apply_fun(Func::Sqrt, std::move(e)); }

/// Exact partial derivative with respect to coordinate index k.
Expr diff(const Expr& e, int k);

/// Raised on eval failures (ln of a non-positive value, division by
/// zero, negative sqrt argument). Carries the offending subtree.
class EvalDomainError : public std::runtime_error {
 public:
  EvalDomainError(std::string msg, Expr subtree)
      : std::runtime_error(std::move(msg)), subtree_(std::move(subtree)) {}
  const Expr& subtree() const { return subtree_; }

 private:
  Expr subtree_;
};

/// Double-precision value at a point (one double per coordinate).
double eval(const Expr& e, std::span<const double> point);

/// Bottom-up canonical rebuild. Idempotent; trees produced by the
/// constructors above are already canonical, so this is a fixpoint.
Expr simplify(const Expr& e);

/// Canonical printer; parse(to_string(e)) == e for canonical trees.
std::string to_string(const Expr& e, std::span<const std::string> coord_names);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, int line, int column)
      : std::runtime_error(std::move(msg)), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Recursive-descent parser for the expression grammar:
///   expr   := term (("+" | "-") term)*
///   term   := factor (("*" | "/") factor)*
///   factor := "-" factor | atom ("^" integer)?
///   atom   := rational | identifier | func "(" expr ")" | "(" expr ")"
///   rational := integer ("/" integer)?   func in {sin,cos,tan,exp,ln,sqrt}
/// Whitespace is insignificant; "#" comments to end of line.
Expr parse_expr(std::string_view text, std::span<const std::string> coord_names);

}  // namespace carnot
