#include "carnot/connection.hpp"

#include <cmath>

namespace carnot {

Connection::Connection(const SubRiemannianStructure& s, Gamma g) : s_(s), gamma_(std::move(g)) {
  for (int i = 0; i < 3; ++i) f_[i] = gamma_[i][0][1];
  c_[0] = simplify(pair(s_.xi(3), lie_bracket(s_.X(2), s_.X(3))));
  c_[1] = simplify(pair(s_.xi(3), lie_bracket(s_.X(3), s_.X(1))));
}

VectorField Connection::nabla(int i, int j) const {
  return s_.from_frame_components(gamma_[static_cast<std::size_t>(i - 1)]
                                        [static_cast<std::size_t>(j - 1)]);
}

VectorField Connection::nabla_field(int i, const VectorField& w) const {
  std::array<Expr, 3> wc = s_.frame_components(w);
  VectorField out = VectorField::zero();
  for (int j = 1; j <= 3; ++j) {
    const Expr& wj = wc[static_cast<std::size_t>(j - 1)];
    out = out + apply(s_.X(i), wj) * s_.X(j) + wj * nabla(i, j);
  }
  return out;
}

VectorField Connection::covariant_derivative(const VectorField& v, const VectorField& w) const {
  std::array<Expr, 3> vc = s_.frame_components(v);
  VectorField out = VectorField::zero();
  for (int i = 1; i <= 3; ++i)
    out = out + vc[static_cast<std::size_t>(i - 1)] * nabla_field(i, w);
  return out;
}

Connection Connection::from_coefficients(const SubRiemannianStructure& s, Gamma g) {
  for (auto& row : g)
    for (auto& col : row)
      for (auto& e : col) e = simplify(e);
  return Connection(s, std::move(g));
}

Connection Connection::natural(const SubRiemannianStructure& s) {
  Expr c1 = simplify(pair(s.xi(3), lie_bracket(s.X(2), s.X(3))));
  Expr c2 = simplify(pair(s.xi(3), lie_bracket(s.X(3), s.X(1))));

  Expr f1 = c1;
  Expr f2 = c2;
  Expr f3 = apply(s.X(1), f2) - apply(s.X(2), f1);

  Gamma g;
  auto set_horizontal = [&g](int i, const Expr& fi) {
    g[i][0] = {Expr(), fi, Expr()};       // nabla_{X_{i+1}} X1 = f X2
    g[i][1] = {-fi, Expr(), Expr()};      // nabla_{X_{i+1}} X2 = -f X1
  };
  set_horizontal(0, f1);
  set_horizontal(1, f2);
  set_horizontal(2, f3);

  // vertical direction N = c1 X1 + c2 X2 + X3 pins the remaining torsion:
  // T(X2,X3) = -c2 N and T(X3,X1) = -c1 N
  VectorField n = c1 * s.X(1) + c2 * s.X(2) + s.X(3);
  VectorField t23 = -(c2 * n);
  VectorField t31 = -(c1 * n);

  // torsion identity: nabla_{X1} X3 = -T(X3,X1) + nabla_{X3} X1 + [X1,X3]
  VectorField n31 = f3 * s.X(2);  // nabla_{X3} X1
  VectorField n32 = -(f3 * s.X(1));
  VectorField n13 = -t31 + n31 + lie_bracket(s.X(1), s.X(3));
  VectorField n23 = t23 + n32 + lie_bracket(s.X(2), s.X(3));
  g[0][2] = s.frame_components(n13);
  g[1][2] = s.frame_components(n23);

  Connection partial(s, g);
  // R_H X3 = 0 forces nabla_{X3} X3
  VectorField n33 = partial.nabla_field(1, n23) - partial.nabla_field(2, n13);
  g[2][2] = partial.s_.frame_components(n33);

  for (auto& row : g)
    for (auto& col : row)
      for (auto& e : col) e = simplify(e);
  return Connection(s, std::move(g));
}

Connection Connection::from_data(const SubRiemannianStructure& s, const TorsionData& t,
                                 const CurvatureData& r) {
  auto check = [&s](const Expr& e, const std::string& identity) {
    if (!s.is_zero_expr(e))
      throw DataConstraintError("connection data violates " + identity, identity);
  };

  std::array<Expr, 3> tau = s.frame_components(t.t12);
  check(tau[2] + Expr::integer(1), "xi^3(T(X1,X2)) = -1");

  std::array<Expr, 3> r1 = s.frame_components(r.r1);
  std::array<Expr, 3> r2 = s.frame_components(r.r2);
  check(r1[0], "xi^1(R_H X1) = 0");
  check(r2[1], "xi^2(R_H X2) = 0");
  check(r1[1] + r2[0], "xi^2(R_H X1) + xi^1(R_H X2) = 0");
  check(r1[2], "xi^3(R_H X1) = 0");
  check(r2[2], "xi^3(R_H X2) = 0");

  Expr f1 = -tau[0];
  Expr f2 = -tau[1];

  Gamma g;
  g[0][0] = {Expr(), f1, Expr()};
  g[0][1] = {-f1, Expr(), Expr()};
  g[1][0] = {Expr(), f2, Expr()};
  g[1][1] = {-f2, Expr(), Expr()};

  // nabla_{X3} X1 = (X1 f2 - X2 f1) X2 - R_H X1 and its skew partner
  Expr df = apply(s.X(1), f2) - apply(s.X(2), f1);
  VectorField n31 = df * s.X(2) - r.r1;
  VectorField n32 = -(df * s.X(1)) - r.r2;
  g[2][0] = s.frame_components(n31);
  g[2][1] = s.frame_components(n32);

  VectorField n13 = -t.t31 + n31 + lie_bracket(s.X(1), s.X(3));
  VectorField n23 = t.t23 + n32 + lie_bracket(s.X(2), s.X(3));
  g[0][2] = s.frame_components(n13);
  g[1][2] = s.frame_components(n23);

  Connection partial(s, g);
  VectorField n33 = partial.nabla_field(1, n23) - partial.nabla_field(2, n13) - r.r3;
  g[2][2] = partial.s_.frame_components(n33);

  for (auto& row : g)
    for (auto& col : row)
      for (auto& e : col) e = simplify(e);
  return Connection(s, std::move(g));
}

TorsionData torsion(const Connection& c) {
  const SubRiemannianStructure& s = c.structure();
  TorsionData t;
  t.t12 = c.nabla(1, 2) - c.nabla(2, 1) - lie_bracket(s.X(1), s.X(2));
  t.t23 = c.nabla(2, 3) - c.nabla(3, 2) - lie_bracket(s.X(2), s.X(3));
  t.t31 = c.nabla(3, 1) - c.nabla(1, 3) - lie_bracket(s.X(3), s.X(1));
  return t;
}

VectorField torsion_at(const Connection& c, const VectorField& v, const VectorField& w) {
  return c.covariant_derivative(v, w) - c.covariant_derivative(w, v) - lie_bracket(v, w);
}

VectorField horizontal_curvature(const Connection& c, const VectorField& v) {
  const SubRiemannianStructure& s = c.structure();
  return c.nabla_field(1, c.nabla_field(2, v)) - c.nabla_field(2, c.nabla_field(1, v)) -
         c.nabla_field(3, v);
}

CurvatureData curvature_data(const Connection& c) {
  const SubRiemannianStructure& s = c.structure();
  return {horizontal_curvature(c, s.X(1)), horizontal_curvature(c, s.X(2)),
          horizontal_curvature(c, s.X(3))};
}

CompatibilityReport check_compatibility(const Connection& c) {
  const SubRiemannianStructure& s = c.structure();
  CompatibilityReport rep;
  auto entry = [&](const std::string& identity, const Expr& e) {
    ZeroTestResult z = zero_test(e, s.chart().box, s.zero_options());
    rep.entries.push_back({identity, z.zero, z.worst});
    rep.all_pass = rep.all_pass && z.zero;
    rep.worst = std::max(rep.worst, z.worst);
  };
  for (int i = 1; i <= 3; ++i) {
    std::string xi = "X" + std::to_string(i);
    entry("xi^1(nabla_{" + xi + "} X1) = 0", c.gamma(i, 1, 1));
    entry("xi^2(nabla_{" + xi + "} X2) = 0", c.gamma(i, 2, 2));
    entry("xi^2(nabla_{" + xi + "} X1) + xi^1(nabla_{" + xi + "} X2) = 0",
          c.gamma(i, 1, 2) + c.gamma(i, 2, 1));
    entry("xi^3(nabla_{" + xi + "} X1) = 0", c.gamma(i, 1, 3));
    entry("xi^3(nabla_{" + xi + "} X2) = 0", c.gamma(i, 2, 3));
  }
  return rep;
}

Curve Curve::parse(const std::string& spec) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : spec) {
    if (ch == ';') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 3)
    throw ParseError("curve must have exactly three ';'-separated components", 1, 1);
  static const std::vector<std::string> tname{"t"};
  Curve c;
  for (int k = 0; k < 3; ++k) c.pos[k] = parse_expr(parts[static_cast<std::size_t>(k)], tname);
  return c;
}

Point Curve::at(double t) const {
  std::array<double, 1> tv{t};
  Point p;
  for (int k = 0; k < 3; ++k) p.x[static_cast<std::size_t>(k)] = eval(pos[static_cast<std::size_t>(k)], tv);
  return p;
}

std::array<double, 3> Curve::velocity(double t) const {
  std::array<double, 1> tv{t};
  std::array<double, 3> v;
  for (int k = 0; k < 3; ++k)
    v[static_cast<std::size_t>(k)] = eval(diff(pos[static_cast<std::size_t>(k)], 0), tv);
  return v;
}

std::array<double, 3> parallel_transport(const Connection& c, const Curve& curve,
                                         const std::array<double, 3>& v0, int steps) {
  if (steps < 1) throw std::invalid_argument("parallel_transport: steps must be >= 1");
  const SubRiemannianStructure& s = c.structure();

  std::array<Expr, 3> vel;
  for (int k = 0; k < 3; ++k) vel[k] = diff(curve.pos[k], 0);

  // w'(t) = -sum_{i,j} v^i(t) w^j Gamma^k_{ij}(gamma(t)) in frame components
  auto slope = [&](double t, const std::array<double, 3>& w) {
    std::array<double, 1> tv{t};
    Point p;
    std::array<double, 3> qdot;
    for (int k = 0; k < 3; ++k) {
      p.x[k] = eval(curve.pos[k], tv);
      qdot[k] = eval(vel[k], tv);
    }
    std::array<double, 3> v{};
    for (int i = 0; i < 3; ++i)
      for (int a = 0; a < 3; ++a) v[i] += eval(s.xi(i + 1).a[a], p) * qdot[a];
    std::array<double, 3> dw{};
    for (int k = 1; k <= 3; ++k)
      for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
          const Expr& gamma = c.gamma(i, j, k);
          if (gamma.is_zero()) continue;
          dw[k - 1] -= v[i - 1] * w[j - 1] * eval(gamma, p);
        }
    return dw;
  };

  std::array<double, 3> w = v0;
  double h = 1.0 / steps;
  auto axpy = [](const std::array<double, 3>& a, double s, const std::array<double, 3>& b) {
    return std::array<double, 3>{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]};
  };
  for (int n = 0; n < steps; ++n) {
    double t = n * h;
    auto k1 = slope(t, w);
    auto k2 = slope(t + 0.5 * h, axpy(w, 0.5 * h, k1));
    auto k3 = slope(t + 0.5 * h, axpy(w, 0.5 * h, k2));
    auto k4 = slope(t + h, axpy(w, h, k3));
    for (int k = 0; k < 3; ++k)
      w[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
  }
  return w;
}

}  // namespace carnot
