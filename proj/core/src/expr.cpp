#include "carnot/expr.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace carnot {

struct Expr::Node {
  Kind kind;
  Func fun = Func::Sin;
  int coord = -1;
  int exponent = 0;
  Rational value;
  std::vector<Expr> args;
  std::size_t hash = 0;
  std::uint32_t size = 1;
};

namespace {

std::size_t hash_mix(std::size_t h, std::size_t v) {
  // splitmix-style combiner
  v += 0x9e3779b97f4a7c15ULL + h;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return v ^ (v >> 31);
}

std::size_t hash_rational(const Rational& r) {
  std::size_t h = 0x5bd1e995;
  for (auto limb : {numerator(r), denominator(r)}) {
    // hash the decimal form; exactness matters, speed does not
    h = hash_mix(h, std::hash<std::string>{}(limb.str()));
  }
  return h;
}

std::shared_ptr<const Expr::Node> finish(Expr::Node n) {
  std::size_t h = hash_mix(0, static_cast<std::size_t>(n.kind));
  std::uint32_t sz = 1;
  switch (n.kind) {
    case Expr::Kind::Num:
      h = hash_mix(h, hash_rational(n.value));
      break;
    case Expr::Kind::Coord:
      h = hash_mix(h, static_cast<std::size_t>(n.coord));
      break;
    case Expr::Kind::Fun:
      h = hash_mix(h, static_cast<std::size_t>(n.fun));
      break;
    case Expr::Kind::Pow:
      h = hash_mix(h, static_cast<std::size_t>(n.exponent));
      break;
    default:
      break;
  }
  for (const Expr& a : n.args) {
    h = hash_mix(h, a.hash());
    sz += a.size();
  }
  n.hash = h;
  n.size = sz;
  return std::make_shared<const Expr::Node>(std::move(n));
}

}  // namespace

Expr::Expr() : node_(nullptr) {
  static const std::shared_ptr<const Node> zero = [] {
    Node n;
    n.kind = Kind::Num;
    n.value = 0;
    return finish(std::move(n));
  }();
  node_ = zero;
}

Expr Expr::num(Rational r) {
  Node n;
  n.kind = Kind::Num;
  n.value = std::move(r);
  return Expr(finish(std::move(n)));
}

Expr Expr::integer(long long v) { return num(Rational(v)); }

Expr Expr::rational(long long num_, long long den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  return num(Rational(num_) / den);
}

Expr Expr::coord(int index) {
  if (index < 0) throw std::invalid_argument("negative coordinate index");
  Node n;
  n.kind = Kind::Coord;
  n.coord = index;
  return Expr(finish(std::move(n)));
}

Expr Expr::from_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite double literal");
  return num(Rational(v));  // cpp_rational converts doubles exactly
}

Expr::Kind Expr::kind() const { return node_->kind; }
bool Expr::is_num() const { return node_->kind == Kind::Num; }
bool Expr::is_zero() const { return is_num() && node_->value == 0; }
bool Expr::is_one() const { return is_num() && node_->value == 1; }
const Rational& Expr::value() const { return node_->value; }
int Expr::coord_index() const { return node_->coord; }
Func Expr::fun() const { return node_->fun; }
const Expr& Expr::arg() const { return node_->args[0]; }
const Expr& Expr::base() const { return node_->args[0]; }
int Expr::exponent() const { return node_->exponent; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
std::size_t Expr::hash() const { return node_->hash; }
std::uint32_t Expr::size() const { return node_->size; }

int compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return 0;
  if (a.kind() != b.kind())
    return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case Expr::Kind::Num: {
      if (a.value() == b.value()) return 0;
      return a.value() < b.value() ? -1 : 1;
    }
    case Expr::Kind::Coord:
      return a.coord_index() - b.coord_index();
    case Expr::Kind::Fun: {
      if (a.fun() != b.fun())
        return static_cast<int>(a.fun()) < static_cast<int>(b.fun()) ? -1 : 1;
      return compare(a.arg(), b.arg());
    }
    case Expr::Kind::Pow: {
      int c = compare(a.base(), b.base());
      if (c != 0) return c;
      return a.exponent() - b.exponent();
    }
    case Expr::Kind::Mul:
    case Expr::Kind::Add: {
      const auto& xs = a.args();
      const auto& ys = b.args();
      std::size_t n = std::min(xs.size(), ys.size());
      for (std::size_t i = 0; i < n; ++i) {
        int c = compare(xs[i], ys[i]);
        if (c != 0) return c;
      }
      if (xs.size() == ys.size()) return 0;
      return xs.size() < ys.size() ? -1 : 1;
    }
  }
  return 0;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Exp: return "exp";
    case Func::Ln: return "ln";
    case Func::Sqrt: return "sqrt";
  }
  return "?";
}

class ExprBuilder {
 public:
  static Expr build(Expr::Node n) { return Expr(finish(std::move(n))); }
};

namespace {

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

struct ExprVecLess {
  bool operator()(const std::vector<Expr>& a, const std::vector<Expr>& b) const {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      int c = compare(a[i], b[i]);
      if (c != 0) return c < 0;
    }
    return a.size() < b.size();
  }
};

// Assemble coefficient * sorted factors without re-canonicalizing.
// Factors must already be canonical non-Num atoms with distinct bases.
Expr assemble_term(const Rational& coeff, std::vector<Expr> factors) {
  if (coeff == 0) return Expr();
  if (factors.empty()) return Expr::num(coeff);
  if (coeff == 1 && factors.size() == 1) return factors[0];
  Expr::Node n;
  n.kind = Expr::Kind::Mul;
  if (coeff != 1) n.args.push_back(Expr::num(coeff));
  for (auto& f : factors) n.args.push_back(std::move(f));
  return ExprBuilder::build(std::move(n));
}

// factor as (base, exponent)
std::pair<Expr, int> factor_power(const Expr& e) {
  if (e.kind() == Expr::Kind::Pow) return {e.base(), e.exponent()};
  return {e, 1};
}

bool is_trig(const Expr& base, Func f, Expr* arg_out) {
  if (base.kind() != Expr::Kind::Fun || base.fun() != f) return false;
  if (arg_out) *arg_out = base.arg();
  return true;
}

// replace the power of `base` in a sorted factor key by old+delta
std::vector<Expr> adjust_key(const std::vector<Expr>& key, const Expr& base, int delta) {
  std::vector<Expr> out;
  out.reserve(key.size() + 1);
  bool found = false;
  for (const Expr& f : key) {
    auto [b, e] = factor_power(f);
    if (!found && b == base) {
      found = true;
      int ne = e + delta;
      if (ne != 0) out.push_back(pow(b, ne));
    } else {
      out.push_back(f);
    }
  }
  if (!found && delta != 0) out.push_back(pow(base, delta));
  std::sort(out.begin(), out.end(), ExprLess{});
  return out;
}

Rational rational_intpow(const Rational& b, int e) {
  Rational acc = 1;
  Rational base = b;
  int n = e < 0 ? -e : e;
  while (n > 0) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  if (e < 0) acc = Rational(1) / acc;
  return acc;
}

}  // namespace

Expr pow(Expr base, int exponent) {
  if (exponent == 0) return Expr::integer(1);
  if (exponent == 1) return base;
  switch (base.kind()) {
    case Expr::Kind::Num: {
      if (base.value() == 0 && exponent < 0) break;  // leave 0^-n; eval reports it
      return Expr::num(rational_intpow(base.value(), exponent));
    }
    case Expr::Kind::Pow: {
      long long e = static_cast<long long>(base.exponent()) * exponent;
      if (e > INT32_MAX || e < INT32_MIN) throw std::overflow_error("power exponent overflow");
      return pow(base.base(), static_cast<int>(e));
    }
    case Expr::Kind::Mul: {
      std::vector<Expr> fs;
      fs.reserve(base.args().size());
      for (const Expr& f : base.args()) fs.push_back(pow(f, exponent));
      return product(std::move(fs));
    }
    default:
      break;
  }
  Expr::Node n;
  n.kind = Expr::Kind::Pow;
  n.exponent = exponent;
  n.args.push_back(std::move(base));
  return ExprBuilder::build(std::move(n));
}

Expr product(std::vector<Expr> factors) {
  Rational coeff = 1;
  // base -> exponent, collected in canonical base order
  std::map<Expr, long long, ExprLess> powers;

  std::vector<Expr> queue = std::move(factors);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    Expr f = queue[qi];
    switch (f.kind()) {
      case Expr::Kind::Num:
        if (f.value() == 0) return Expr();
        coeff *= f.value();
        break;
      case Expr::Kind::Mul:
        for (const Expr& g : f.args()) queue.push_back(g);
        break;
      case Expr::Kind::Pow:
        powers[f.base()] += f.exponent();
        break;
      default:
        powers[f] += 1;
        break;
    }
  }

  std::vector<Expr> out;
  out.reserve(powers.size());
  for (const auto& [base, e] : powers) {
    if (e == 0) continue;
    if (e > INT32_MAX || e < INT32_MIN) throw std::overflow_error("power exponent overflow");
    Expr p = pow(base, static_cast<int>(e));
    // pow may fold (rational base) or stay atomic; a fold goes to coeff
    if (p.is_num()) {
      if (p.value() == 0) return Expr();
      coeff *= p.value();
    } else {
      out.push_back(std::move(p));
    }
  }
  std::sort(out.begin(), out.end(), ExprLess{});

  // Distribute over first-power sum factors when the expansion stays
  // small; like-term collection then cancels across the product. Large
  // products keep their factored form.
  long long expansion = 1;
  for (const Expr& f : out)
    if (f.kind() == Expr::Kind::Add) {
      expansion *= static_cast<long long>(f.args().size());
      if (expansion > 64) break;
    }
  if (expansion > 1 && expansion <= 64) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (out[i].kind() != Expr::Kind::Add) continue;
      std::vector<Expr> terms;
      terms.reserve(out[i].args().size());
      for (const Expr& t : out[i].args()) {
        std::vector<Expr> fs;
        fs.reserve(out.size() + 1);
        fs.push_back(Expr::num(coeff));
        for (std::size_t j = 0; j < out.size(); ++j)
          if (j != i) fs.push_back(out[j]);
        fs.push_back(t);
        terms.push_back(product(std::move(fs)));
      }
      return sum(std::move(terms));
    }
  }
  return assemble_term(coeff, std::move(out));
}

Expr sum(std::vector<Expr> terms) {
  // term key (sorted factor list, no coefficient) -> rational coefficient
  std::map<std::vector<Expr>, Rational, ExprVecLess> acc;

  auto add_term = [&acc](const Rational& c, std::vector<Expr> key) {
    auto it = acc.find(key);
    if (it == acc.end())
      acc.emplace(std::move(key), c);
    else
      it->second += c;
  };

  std::vector<Expr> queue = std::move(terms);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    Expr t = queue[qi];
    switch (t.kind()) {
      case Expr::Kind::Add:
        for (const Expr& u : t.args()) queue.push_back(u);
        break;
      case Expr::Kind::Num:
        add_term(t.value(), {});
        break;
      case Expr::Kind::Mul: {
        const auto& fs = t.args();
        if (fs[0].is_num()) {
          add_term(fs[0].value(), std::vector<Expr>(fs.begin() + 1, fs.end()));
        } else {
          add_term(1, fs);
        }
        break;
      }
      default:
        add_term(1, {t});
        break;
    }
  }

  // Pythagorean collection on syntactically equal arguments:
  //   a sin^k(u) R  +  b sin^(k-2)(u) cos^(m+2)(u) R
  //     ->  b sin^(k-2)(u) cos^m(u) R  +  (a-b) sin^k(u) R
  // (k >= 2; m is the existing cos power in the first key). Each rewrite
  // removes two from the total cos power mass, so the loop terminates.
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = acc.begin(); it != acc.end() && !changed; ++it) {
      if (it->second == 0) continue;
      const std::vector<Expr>& key = it->first;
      for (std::size_t i = 0; i < key.size(); ++i) {
        auto [base, k] = factor_power(key[i]);
        Expr u;
        if (k < 2 || !is_trig(base, Func::Sin, &u)) continue;
        Expr cos_u = cos(u);
        std::vector<Expr> partner = adjust_key(adjust_key(key, base, -2), cos_u, 2);
        auto pit = acc.find(partner);
        if (pit == acc.end() || pit == it || pit->second == 0) continue;
        Rational a = it->second;
        Rational b = pit->second;
        std::vector<Expr> residual = adjust_key(key, base, -2);
        acc.erase(pit);
        it->second = a - b;
        add_term(b, std::move(residual));
        changed = true;
        break;
      }
    }
  }

  std::vector<Expr> out;
  out.reserve(acc.size());
  for (auto& [key, c] : acc) {
    if (c == 0) continue;
    out.push_back(assemble_term(c, key));
  }
  if (out.empty()) return Expr();
  if (out.size() == 1) return out[0];
  std::sort(out.begin(), out.end(), ExprLess{});
  Expr::Node n;
  n.kind = Expr::Kind::Add;
  n.args = std::move(out);
  return ExprBuilder::build(std::move(n));
}

Expr apply_fun(Func f, Expr a) {
  if (a.is_num()) {
    const Rational& r = a.value();
    if (r == 0) {
      switch (f) {
        case Func::Sin: case Func::Tan: case Func::Sqrt: return Expr();
        case Func::Cos: case Func::Exp: return Expr::integer(1);
        case Func::Ln: break;  // domain error at eval
      }
    }
    if (r == 1 && f == Func::Ln) return Expr();
    if (r == 1 && f == Func::Sqrt) return Expr::integer(1);
    if (f == Func::Sqrt && r > 0) {
      // fold exact rational squares
      auto n = numerator(r), d = denominator(r);
      auto sn = boost::multiprecision::sqrt(n), sd = boost::multiprecision::sqrt(d);
      if (sn * sn == n && sd * sd == d) return Expr::num(Rational(sn, sd));
    }
  }
  // parity: sin(-u) = -sin u, cos(-u) = cos u, tan(-u) = -tan u
  if (f == Func::Sin || f == Func::Cos || f == Func::Tan) {
    bool neg = false;
    if (a.is_num() && a.value() < 0) neg = true;
    if (a.kind() == Expr::Kind::Mul && a.args()[0].is_num() && a.args()[0].value() < 0) neg = true;
    if (neg) {
      Expr flipped = product({Expr::integer(-1), a});
      Expr::Node n;
      n.kind = Expr::Kind::Fun;
      n.fun = f;
      n.args.push_back(std::move(flipped));
      Expr inner = ExprBuilder::build(std::move(n));
      return f == Func::Cos ? inner : product({Expr::integer(-1), inner});
    }
  }
  Expr::Node n;
  n.kind = Expr::Kind::Fun;
  n.fun = f;
  n.args.push_back(std::move(a));
  return ExprBuilder::build(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return sum({a, product({Expr::integer(-1), b})}); }
Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
Expr operator-(const Expr& a) { return product({Expr::integer(-1), a}); }
Expr quotient(const Expr& a, const Expr& b) { return product({a, pow(b, -1)}); }

// ---------------------------------------------------------------------------
// differentiation

namespace {

Expr diff_impl(const Expr& e, int k, std::unordered_map<const void*, Expr>& memo);

Expr diff_fun(const Expr& e, int k, std::unordered_map<const void*, Expr>& memo) {
  const Expr& u = e.arg();
  Expr du = diff_impl(u, k, memo);
  if (du.is_zero()) return Expr();
  switch (e.fun()) {
    case Func::Sin: return cos(u) * du;
    case Func::Cos: return -(sin(u) * du);
    case Func::Tan: return (Expr::integer(1) + pow(tan(u), 2)) * du;
    case Func::Exp: return exp(u) * du;
    case Func::Ln: return quotient(du, u);
    case Func::Sqrt: return product({Expr::rational(1, 2), du, pow(sqrt(u), -1)});
  }
  return Expr();
}

Expr diff_impl(const Expr& e, int k, std::unordered_map<const void*, Expr>& memo) {
  // node identity via the args vector address (stable per shared node)
  const void* id = static_cast<const void*>(&e.args());
  auto it = memo.find(id);
  if (it != memo.end()) return it->second;

  Expr result;
  switch (e.kind()) {
    case Expr::Kind::Num:
      result = Expr();
      break;
    case Expr::Kind::Coord:
      result = e.coord_index() == k ? Expr::integer(1) : Expr();
      break;
    case Expr::Kind::Fun:
      result = diff_fun(e, k, memo);
      break;
    case Expr::Kind::Pow: {
      Expr db = diff_impl(e.base(), k, memo);
      if (db.is_zero()) {
        result = Expr();
      } else {
        result = product({Expr::integer(e.exponent()), pow(e.base(), e.exponent() - 1), db});
      }
      break;
    }
    case Expr::Kind::Mul: {
      const auto& fs = e.args();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        Expr dfi = diff_impl(fs[i], k, memo);
        if (dfi.is_zero()) continue;
        std::vector<Expr> rest;
        rest.reserve(fs.size());
        for (std::size_t j = 0; j < fs.size(); ++j)
          if (j != i) rest.push_back(fs[j]);
        rest.push_back(std::move(dfi));
        terms.push_back(product(std::move(rest)));
      }
      result = sum(std::move(terms));
      break;
    }
    case Expr::Kind::Add: {
      std::vector<Expr> terms;
      terms.reserve(e.args().size());
      for (const Expr& t : e.args()) terms.push_back(diff_impl(t, k, memo));
      result = sum(std::move(terms));
      break;
    }
  }
  memo.emplace(id, result);
  return result;
}

}  // namespace

Expr diff(const Expr& e, int k) {
  if (k < 0) throw std::invalid_argument("negative coordinate index in diff");
  std::unordered_map<const void*, Expr> memo;
  return diff_impl(e, k, memo);
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

double intpow(double b, int e) {
  double acc = 1.0, base = b;
  int n = e < 0 ? -e : e;
  while (n > 0) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  return e < 0 ? 1.0 / acc : acc;
}

double eval_impl(const Expr& e, std::span<const double> pt,
                 std::unordered_map<const void*, double>& memo) {
  const void* id = static_cast<const void*>(&e.args());
  if (e.size() > 8) {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
  }
  double result = 0.0;
  switch (e.kind()) {
    case Expr::Kind::Num:
      result = e.value().convert_to<double>();
      break;
    case Expr::Kind::Coord: {
      int i = e.coord_index();
      if (i >= static_cast<int>(pt.size()))
        throw EvalDomainError("coordinate index out of range for point", e);
      result = pt[static_cast<std::size_t>(i)];
      break;
    }
    case Expr::Kind::Fun: {
      double u = eval_impl(e.arg(), pt, memo);
      switch (e.fun()) {
        case Func::Sin: result = std::sin(u); break;
        case Func::Cos: result = std::cos(u); break;
        case Func::Tan: result = std::tan(u); break;
        case Func::Exp: result = std::exp(u); break;
        case Func::Ln:
          if (u <= 0.0) throw EvalDomainError("ln of non-positive value", e);
          result = std::log(u);
          break;
        case Func::Sqrt:
          if (u < 0.0) throw EvalDomainError("sqrt of negative value", e);
          result = std::sqrt(u);
          break;
      }
      break;
    }
    case Expr::Kind::Pow: {
      double b = eval_impl(e.base(), pt, memo);
      if (e.exponent() < 0 && b == 0.0) throw EvalDomainError("division by zero", e);
      result = intpow(b, e.exponent());
      break;
    }
    case Expr::Kind::Mul: {
      result = 1.0;
      for (const Expr& f : e.args()) result *= eval_impl(f, pt, memo);
      break;
    }
    case Expr::Kind::Add: {
      result = 0.0;
      for (const Expr& t : e.args()) result += eval_impl(t, pt, memo);
      break;
    }
  }
  if (e.size() > 8) memo.emplace(id, result);
  return result;
}

}  // namespace

double eval(const Expr& e, std::span<const double> point) {
  std::unordered_map<const void*, double> memo;
  return eval_impl(e, point, memo);
}

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Num:
    case Expr::Kind::Coord:
      return e;
    case Expr::Kind::Fun:
      return apply_fun(e.fun(), simplify(e.arg()));
    case Expr::Kind::Pow:
      return pow(simplify(e.base()), e.exponent());
    case Expr::Kind::Mul: {
      std::vector<Expr> fs;
      fs.reserve(e.args().size());
      for (const Expr& f : e.args()) fs.push_back(simplify(f));
      return product(std::move(fs));
    }
    case Expr::Kind::Add: {
      std::vector<Expr> ts;
      ts.reserve(e.args().size());
      for (const Expr& t : e.args()) ts.push_back(simplify(t));
      return sum(std::move(ts));
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// printing

namespace {

std::string rational_str(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << "/" << denominator(r);
  return os.str();
}

struct Printer {
  std::span<const std::string> names;

  std::string coord_name(int i) const {
    if (i >= 0 && i < static_cast<int>(names.size())) return names[static_cast<std::size_t>(i)];
    return "x" + std::to_string(i + 1);
  }

  // atom-level string: parenthesized when the node is a sum or product
  std::string atom(const Expr& e) const {
    switch (e.kind()) {
      case Expr::Kind::Add:
      case Expr::Kind::Mul:
        return "(" + print(e) + ")";
      case Expr::Kind::Num:
        if (e.value() < 0 || denominator(e.value()) != 1) return "(" + rational_str(e.value()) + ")";
        return rational_str(e.value());
      default:
        return print(e);
    }
  }

  std::string pow_str(const Expr& base, int e) const {
    std::string b = atom(base);
    if (e == 1) return b;
    return b + "^" + std::to_string(e);
  }

  // product of |coeff| and factors as numerator/denominator chain
  std::string magnitude(Rational coeff, const std::vector<Expr>& factors) const {
    if (coeff < 0) coeff = -coeff;
    std::vector<std::string> nums, dens;
    auto cn = numerator(coeff), cd = denominator(coeff);
    std::vector<std::pair<Expr, int>> den_pows;
    for (const Expr& f : factors) {
      if (f.kind() == Expr::Kind::Pow && f.exponent() < 0)
        den_pows.emplace_back(f.base(), -f.exponent());
      else if (f.kind() == Expr::Kind::Pow)
        nums.push_back(pow_str(f.base(), f.exponent()));
      else
        nums.push_back(atom(f));
    }
    std::string out;
    if (cn != 1 || nums.empty()) out = cn.str();
    for (const auto& s : nums) {
      if (!out.empty()) out += "*";
      out += s;
    }
    if (cd != 1) out += "/" + cd.str();
    for (const auto& [b, e] : den_pows) out += "/" + pow_str(b, e);
    return out;
  }

  // term decomposed into sign and magnitude
  std::pair<bool, std::string> term(const Expr& e) const {
    switch (e.kind()) {
      case Expr::Kind::Num:
        return {e.value() < 0, magnitude(e.value(), {})};
      case Expr::Kind::Mul: {
        const auto& fs = e.args();
        if (fs[0].is_num()) {
          return {fs[0].value() < 0,
                  magnitude(fs[0].value(), std::vector<Expr>(fs.begin() + 1, fs.end()))};
        }
        return {false, magnitude(1, fs)};
      }
      case Expr::Kind::Pow:
        return {false, magnitude(1, {e})};
      default:
        return {false, print(e)};
    }
  }

  std::string print(const Expr& e) const {
    switch (e.kind()) {
      case Expr::Kind::Num:
        return rational_str(e.value());
      case Expr::Kind::Coord:
        return coord_name(e.coord_index());
      case Expr::Kind::Fun:
        return std::string(func_name(e.fun())) + "(" + print(e.arg()) + ")";
      case Expr::Kind::Pow:
      case Expr::Kind::Mul: {
        auto [neg, mag] = term(e);
        return neg ? "-" + mag : mag;
      }
      case Expr::Kind::Add: {
        std::string out;
        bool first = true;
        for (const Expr& t : e.args()) {
          auto [neg, mag] = term(t);
          if (first) {
            out = neg ? "-" + mag : mag;
            first = false;
          } else {
            out += neg ? " - " : " + ";
            out += mag;
          }
        }
        return out;
      }
    }
    return "?";
  }
};

}  // namespace

std::string to_string(const Expr& e, std::span<const std::string> coord_names) {
  return Printer{coord_names}.print(e);
}

// ---------------------------------------------------------------------------
// parsing

namespace {

struct Token {
  enum Type { Number, Ident, Op, End } type = End;
  std::string text;
  long long number = 0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg, const Token& at) const {
    throw ParseError(msg + " at line " + std::to_string(at.line) + ", column " +
                         std::to_string(at.col),
                     at.line, at.col);
  }

 private:
  void advance() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_, ++col_;
        continue;
      }
      if (c == '\n') {
        ++pos_, ++line_;
        col_ = 1;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_, ++col_;
        continue;
      }
      break;
    }
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.type = Token::End;
      return;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        ++pos_, ++col_;
      tok_.type = Token::Number;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      try {
        tok_.number = std::stoll(tok_.text);
      } catch (const std::out_of_range&) {
        throw ParseError("integer literal out of range at line " + std::to_string(tok_.line) +
                             ", column " + std::to_string(tok_.col),
                         tok_.line, tok_.col);
      }
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_, ++col_;
      tok_.type = Token::Ident;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    tok_.type = Token::Op;
    tok_.text = std::string(1, c);
    ++pos_, ++col_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

std::optional<Func> func_from_name(std::string_view s) {
  for (Func f : {Func::Sin, Func::Cos, Func::Tan, Func::Exp, Func::Ln, Func::Sqrt})
    if (s == func_name(f)) return f;
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> coords)
      : lex_(text), coords_(coords) {}

  Expr run() {
    Expr e = expr();
    if (lex_.peek().type != Token::End)
      lex_.fail("unexpected trailing input '" + lex_.peek().text + "'", lex_.peek());
    return e;
  }

 private:
  Expr expr() {
    Expr e = term();
    while (is_op("+") || is_op("-")) {
      bool plus = is_op("+");
      lex_.next();
      Expr rhs = term();
      e = plus ? e + rhs : e - rhs;
    }
    return e;
  }

  Expr term() {
    Expr e = factor();
    while (is_op("*") || is_op("/")) {
      bool mul = is_op("*");
      Token op = lex_.next();
      Expr rhs = factor();
      if (!mul) {
        if (rhs.is_zero()) lex_.fail("division by zero literal", op);
        e = quotient(e, rhs);
      } else {
        e = e * rhs;
      }
    }
    return e;
  }

  Expr factor() {
    if (is_op("-")) {
      lex_.next();
      return -factor();
    }
    Expr a = atom();
    if (is_op("^")) {
      lex_.next();
      long long sign = 1;
      if (is_op("-")) {
        lex_.next();
        sign = -1;
      }
      Token t = lex_.peek();
      if (t.type != Token::Number) lex_.fail("expected integer exponent", t);
      lex_.next();
      long long e = sign * t.number;
      if (e > INT32_MAX || e < INT32_MIN) lex_.fail("exponent out of range", t);
      return pow(a, static_cast<int>(e));
    }
    return a;
  }

  Expr atom() {
    Token t = lex_.peek();
    if (t.type == Token::Number) {
      lex_.next();
      return Expr::integer(t.number);
    }
    if (t.type == Token::Ident) {
      lex_.next();
      if (auto f = func_from_name(t.text)) {
        expect_op("(");
        Expr a = expr();
        expect_op(")");
        return apply_fun(*f, std::move(a));
      }
      for (std::size_t i = 0; i < coords_.size(); ++i)
        if (coords_[i] == t.text) return Expr::coord(static_cast<int>(i));
      lex_.fail("undeclared identifier '" + t.text + "'", t);
    }
    if (t.type == Token::Op && t.text == "(") {
      lex_.next();
      Expr e = expr();
      expect_op(")");
      return e;
    }
    lex_.fail(t.type == Token::End ? "unexpected end of input"
                                   : "unexpected token '" + t.text + "'",
              t);
  }

  bool is_op(std::string_view s) const {
    return lex_.peek().type == Token::Op && lex_.peek().text == s;
  }

  void expect_op(std::string_view s) {
    if (!is_op(s)) lex_.fail("expected '" + std::string(s) + "'", lex_.peek());
    lex_.next();
  }

  Lexer lex_;
  std::span<const std::string> coords_;
};

}  // namespace

Expr parse_expr(std::string_view text, std::span<const std::string> coord_names) {
  return Parser(text, coord_names).run();
}

}  // namespace carnot
