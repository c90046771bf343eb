#include "carnot/flatten.hpp"

#include <cmath>
#include <sstream>

namespace carnot {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

double det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 invert3(const Mat3& m) {
  double d = det3(m);
  if (std::fabs(d) < 1e-14)
    throw InternalError("singular 3x3 matrix in normalization solve (determinant " +
                        std::to_string(d) + ")");
  Mat3 inv;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
      int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / d;
    }
  return inv;
}

Vec3 mat_vec(const Mat3& m, const Vec3& v) {
  Vec3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i] += m[i][j] * v[j];
  return r;
}

Mat3 mat_mul(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

Mat3 transpose(const Mat3& m) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = m[j][i];
  return r;
}

std::array<Expr, 3> centered_coords(const Point& p) {
  std::array<Expr, 3> u;
  for (int k = 0; k < 3; ++k) u[k] = Expr::coord(k) - Expr::from_double(p.x[k]);
  return u;
}

Expr frame_apply_chain(const SubRiemannianStructure& s, std::span<const int> alpha,
                       const Expr& f) {
  Expr g = f;
  for (auto it = alpha.rbegin(); it != alpha.rend(); ++it) g = apply(s.X(*it), g);
  return g;
}

double frame_derivative_at(const SubRiemannianStructure& s, std::span<const int> alpha,
                           const Expr& f, const Point& p) {
  return eval(frame_apply_chain(s, alpha, f), p);
}

}  // namespace

ThetaJet carnot_theta_jet(const SubRiemannianStructure& s, const Point& p) {
  VectorField b13 = lie_bracket(s.X(1), s.X(3));
  VectorField b23 = lie_bracket(s.X(2), s.X(3));
  Vec3 a, b;
  for (int i = 1; i <= 3; ++i) {
    a[i - 1] = eval(pair(s.xi(i), b13), p);
    b[i - 1] = eval(pair(s.xi(i), b23), p);
  }
  ThetaJet j;
  j.x1 = -b[2];
  j.x2 = a[2];
  j.x11 = a[0];
  j.x12 = (a[2] * a[2] + b[2] * b[2] + b[0] + 2.0 * a[1]) / 3.0;
  j.x21 = (-a[2] * a[2] - b[2] * b[2] + a[1] + 2.0 * b[0]) / 3.0;
  j.x22 = b[1];
  return j;
}

Expr realize_theta(const SubRiemannianStructure& s, const Point& p, const ThetaJet& jet) {
  Mat3 m = s.frame_matrix_at(p);
  Mat3 minv = invert3(m);

  // linear part from the 1-jet plus the forced X3 value
  Vec3 rhs{jet.x1, jet.x2, jet.commutator()};
  Vec3 lin = mat_vec(minv, rhs);

  // second-order residue left for the quadratic part
  auto second_residue = [&](int i, int j, double target) {
    double acc = target;
    for (int a = 0; a < 3; ++a) {
      Expr de = apply(s.X(i), s.X(j).e[static_cast<std::size_t>(a)]);
      acc -= eval(de, p) * lin[a];
    }
    return acc;
  };
  double g11 = second_residue(1, 1, jet.x11);
  double g12 = second_residue(1, 2, jet.x12);
  double g21 = second_residue(2, 1, jet.x21);
  double g22 = second_residue(2, 2, jet.x22);

  Mat3 target{};
  target[0][0] = g11;
  target[0][1] = target[1][0] = 0.5 * (g12 + g21);
  target[1][1] = g22;
  // rows/columns involving the third frame direction stay zero
  Mat3 hess = mat_mul(mat_mul(minv, target), transpose(minv));

  std::array<Expr, 3> u = centered_coords(p);
  std::vector<Expr> terms;
  for (int k = 0; k < 3; ++k)
    if (lin[k] != 0.0) terms.push_back(Expr::from_double(lin[k]) * u[k]);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (hess[a][b] != 0.0)
        terms.push_back(product({Expr::rational(1, 2), Expr::from_double(hess[a][b]), u[a], u[b]}));
  Expr theta = sum(std::move(terms));

  // the realization must reproduce the jet
  double worst = 0.0;
  auto check = [&](std::initializer_list<int> alpha, double want) {
    std::vector<int> al(alpha);
    worst = std::max(worst, std::fabs(frame_derivative_at(s, al, theta, p) - want));
  };
  check({1}, jet.x1);
  check({2}, jet.x2);
  check({1, 1}, jet.x11);
  check({1, 2}, jet.x12);
  check({2, 1}, jet.x21);
  check({2, 2}, jet.x22);
  if (worst > tolerances::linear_solve)
    throw InternalError("realized rotation angle misses its jet by " + std::to_string(worst));
  return theta;
}

CarnotFrame carnot_frame(const SubRiemannianStructure& s, const Point& p, double tol) {
  ThetaJet jet = carnot_theta_jet(s, p);
  Expr theta = realize_theta(s, p, jet);
  CarnotFrame cf{theta, rotate_frame(s, theta), p, 0.0};

  for (int i = 1; i <= 2; ++i) {
    VectorField br = lie_bracket(cf.rotated.X(i), cf.rotated.X(3));
    Vec3 v = eval_field(br, p);
    for (double x : v) cf.residual = std::max(cf.residual, std::fabs(x));
  }
  if (cf.residual > tol) {
    std::ostringstream os;
    os << "Carnot conditions [X1',X3']_p = [X2',X3']_p = 0 failed: residual " << cf.residual;
    throw CarnotVerificationError(os.str(), cf.residual);
  }
  return cf;
}

std::array<double, 3> vertical_direction(const SubRiemannianStructure& s, const Point& p) {
  Expr c1 = pair(s.xi(3), lie_bracket(s.X(2), s.X(3)));
  Expr c2 = pair(s.xi(3), lie_bracket(s.X(3), s.X(1)));
  VectorField n = c1 * s.X(1) + c2 * s.X(2) + s.X(3);
  return eval_field(n, p);
}

ChartNormalization normalize_chart_order2(const SubRiemannianStructure& s, const Point& p) {
  Mat3 m = s.frame_matrix_at(p);
  Mat3 minv = invert3(m);
  std::array<Expr, 3> u = centered_coords(p);

  // affine stage: (X_i y^j)(p) = delta^j_i
  std::array<Expr, 3> y;
  for (int j = 0; j < 3; ++j) {
    std::vector<Expr> terms;
    for (int k = 0; k < 3; ++k)
      if (minv[k][j] != 0.0) terms.push_back(Expr::from_double(minv[k][j]) * u[k]);
    y[j] = sum(std::move(terms));
  }

  // quadratic corrections kill the horizontal second derivatives; the
  // mixed x^3 coefficient is shifted so X3 = X1X2 - X2X1 splits it into
  // the (1/2, -1/2) pair
  Expr y1sq = pow(y[0], 2), y1y2 = y[0] * y[1], y2sq = pow(y[1], 2);
  std::array<Expr, 3> out;
  for (int l = 0; l < 3; ++l) {
    double q11 = frame_derivative_at(s, std::array{1, 1}, y[l], p);
    double q12 = frame_derivative_at(s, std::array{1, 2}, y[l], p);
    double q22 = frame_derivative_at(s, std::array{2, 2}, y[l], p);
    double mixed = l == 2 ? q12 - 0.5 : q12;
    out[l] = y[l] - product({Expr::rational(1, 2), Expr::from_double(q11), y1sq}) -
             Expr::from_double(mixed) * y1y2 -
             product({Expr::rational(1, 2), Expr::from_double(q22), y2sq});
  }

  // postconditions at p
  double worst = 0.0;
  for (int l = 0; l < 3; ++l) {
    worst = std::max(worst, std::fabs(eval(out[l], p)));
    for (int i = 1; i <= 3; ++i) {
      double want = (i - 1 == l) ? 1.0 : 0.0;
      worst = std::max(worst,
                       std::fabs(frame_derivative_at(s, std::array{i}, out[l], p) - want));
    }
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j) {
        double want = 0.0;
        if (l == 2 && i == 1 && j == 2) want = 0.5;
        if (l == 2 && i == 2 && j == 1) want = -0.5;
        worst = std::max(
            worst, std::fabs(frame_derivative_at(s, std::array{i, j}, out[l], p) - want));
      }
  }
  if (worst > tolerances::linear_solve)
    throw InternalError("order-2 chart normalization postconditions off by " +
                        std::to_string(worst));
  return ChartNormalization{out, 2};
}

int phi_index(int i, int j, int k) { return 4 * (i - 1) + 2 * (j - 1) + (k - 1); }

std::array<Expr, 8> phi_correctors(const std::array<Expr, 3>& c) {
  const Expr& y1 = c[0];
  const Expr& y2 = c[1];
  const Expr& y3 = c[2];
  Expr half = Expr::rational(1, 2), quarter = Expr::rational(1, 4), sixth = Expr::rational(1, 6);
  std::array<Expr, 8> phi;
  phi[phi_index(1, 1, 1)] = sixth * pow(y1, 3);
  phi[phi_index(1, 1, 2)] = quarter * pow(y1, 2) * y2 + half * y1 * y3;
  phi[phi_index(1, 2, 1)] = Expr();
  phi[phi_index(1, 2, 2)] = quarter * y1 * pow(y2, 2) + half * y2 * y3;
  phi[phi_index(2, 1, 1)] = quarter * pow(y1, 2) * y2 - half * y1 * y3;
  phi[phi_index(2, 1, 2)] = Expr();
  phi[phi_index(2, 2, 1)] = quarter * y1 * pow(y2, 2) - half * y2 * y3;
  phi[phi_index(2, 2, 2)] = sixth * pow(y2, 3);
  return phi;
}

ChartNormalization normalize_chart_order3(const CarnotFrame& cf, const Point& p) {
  if (cf.residual > tolerances::bracket_residual)
    throw CarnotRequiredError("order-3 normalization requires a verified Carnot frame (residual " +
                              std::to_string(cf.residual) + ")");
  const SubRiemannianStructure& s = cf.rotated;
  ChartNormalization base = normalize_chart_order2(s, p);
  std::array<Expr, 8> phi = phi_correctors(base.coords);

  std::array<Expr, 3> out;
  for (int l = 0; l < 3; ++l) {
    std::vector<Expr> terms{base.coords[static_cast<std::size_t>(l)]};
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j)
        for (int k = 1; k <= 2; ++k) {
          double t = frame_derivative_at(s, std::array{i, j, k},
                                         base.coords[static_cast<std::size_t>(l)], p);
          const Expr& corrector = phi[static_cast<std::size_t>(phi_index(i, j, k))];
          if (t != 0.0 && !corrector.is_zero())
            terms.push_back(-(Expr::from_double(t) * corrector));
        }
    out[l] = sum(std::move(terms));
  }

  // all third horizontal derivatives must vanish now, including the
  // (1,2,1) and (2,1,2) slots the correctors skip
  double worst = 0.0;
  for (int l = 0; l < 3; ++l)
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j)
        for (int k = 1; k <= 2; ++k)
          worst = std::max(worst, std::fabs(frame_derivative_at(
                                      s, std::array{i, j, k}, out[l], p)));
  if (worst > tolerances::bracket_residual)
    throw InternalError("order-3 chart normalization postconditions off by " +
                        std::to_string(worst));
  return ChartNormalization{out, 3};
}

std::vector<PhiDualityEntry> phi_duality_table(const CarnotFrame& cf,
                                               const ChartNormalization& order2, const Point& p) {
  const SubRiemannianStructure& s = cf.rotated;
  std::array<Expr, 8> phi = phi_correctors(order2.coords);
  std::vector<PhiDualityEntry> table;
  auto delta = [](std::array<int, 3> a, std::array<int, 3> b) {
    return a == b ? 1.0 : 0.0;
  };
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      for (int k = 1; k <= 2; ++k)
        for (int a = 1; a <= 2; ++a)
          for (int b = 1; b <= 2; ++b)
            for (int c = 1; c <= 2; ++c) {
              PhiDualityEntry e;
              e.op = {i, j, k};
              e.phi = {a, b, c};
              e.value = frame_derivative_at(
                  s, std::array{i, j, k}, phi[static_cast<std::size_t>(phi_index(a, b, c))], p);
              if (e.op == std::array{1, 2, 1}) {
                // X1X2X1 = (X1X1X2 + X2X1X1)/2 - [X1,X3]/2, and the
                // bracket term dies at a Carnot point
                e.expected = 0.5 * (delta({1, 1, 2}, e.phi) + delta({2, 1, 1}, e.phi));
              } else if (e.op == std::array{2, 1, 2}) {
                e.expected = 0.5 * (delta({2, 2, 1}, e.phi) + delta({1, 2, 2}, e.phi));
              } else {
                e.expected = delta(e.op, e.phi);
              }
              table.push_back(e);
            }
  return table;
}

Flattening flatten(const SubRiemannianStructure& s, const Point& p) {
  CarnotFrame cf = carnot_frame(s, p);
  ChartNormalization chart = normalize_chart_order3(cf, p);

  Chart model_chart;
  model_chart.coords = {"y1", "y2", "y3"};
  model_chart.box = Box::unit_cube(3);

  Expr y1 = Expr::coord(0), y2 = Expr::coord(1);
  std::array<VectorField, 3> model;
  model[0].e = {Expr::integer(1), Expr(), -(Expr::rational(1, 2) * y2)};
  model[1].e = {Expr(), Expr::integer(1), Expr::rational(1, 2) * y1};
  model[2].e = {Expr(), Expr(), Expr::integer(1)};

  // the model frame must satisfy the Heisenberg bracket relations on
  // the nose, symbolically
  VectorField b12 = lie_bracket(model[0], model[1]);
  VectorField b31 = lie_bracket(model[2], model[0]);
  VectorField b23 = lie_bracket(model[1], model[2]);
  for (int a = 0; a < 3; ++a) {
    if (!(b12.e[a] - model[2].e[a]).is_zero() || !b31.e[a].is_zero() || !b23.e[a].is_zero())
      throw InternalError("model frame bracket relations failed symbolically");
  }
  return Flattening{std::move(cf), std::move(chart), std::move(model_chart), std::move(model), p};
}

namespace {

std::vector<std::vector<int>> weighted_multi_indices(int max_weight) {
  std::vector<std::vector<int>> out;
  std::vector<std::vector<int>> frontier{{}};
  for (int len = 1; len <= max_weight; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& a : frontier)
      for (int v = 1; v <= 3; ++v) {
        std::vector<int> b = a;
        b.push_back(v);
        if (weighted_order(b) <= max_weight) {
          out.push_back(b);
          next.push_back(b);
        }
      }
    frontier = std::move(next);
  }
  return out;
}

std::vector<std::array<int, 3>> monomial_exponents(int max_degree) {
  std::vector<std::array<int, 3>> out;
  for (int d = 0; d <= max_degree; ++d)
    for (int b1 = 0; b1 <= d; ++b1)
      for (int b2 = 0; b2 + b1 <= d; ++b2) out.push_back({b1, b2, d - b1 - b2});
  return out;
}

Expr monomial(const std::array<Expr, 3>& coords, const std::array<int, 3>& beta) {
  std::vector<Expr> fs;
  for (int k = 0; k < 3; ++k)
    if (beta[static_cast<std::size_t>(k)] > 0)
      fs.push_back(pow(coords[static_cast<std::size_t>(k)], beta[static_cast<std::size_t>(k)]));
  if (fs.empty()) return Expr::integer(1);
  return product(std::move(fs));
}

}  // namespace

JetAgreementReport verify_jet_agreement(const Flattening& f) {
  const SubRiemannianStructure& s = f.frame.rotated;
  JetAgreementReport rep;

  std::array<Expr, 3> model_coords{Expr::coord(0), Expr::coord(1), Expr::coord(2)};
  Point origin;

  auto model_apply = [&f](std::span<const int> alpha, const Expr& g0) {
    Expr g = g0;
    for (auto it = alpha.rbegin(); it != alpha.rend(); ++it)
      g = apply(f.model[static_cast<std::size_t>(*it - 1)], g);
    return g;
  };

  std::vector<std::vector<int>> alphas = weighted_multi_indices(3);
  std::vector<std::array<int, 3>> betas = monomial_exponents(3);

  for (const auto& alpha : alphas) {
    JetAgreementEntry entry;
    entry.alpha = alpha;
    for (const auto& beta : betas) {
      double lhs = eval(frame_apply_chain(s, alpha, monomial(f.chart.coords, beta)), f.base);
      double rhs = eval(model_apply(alpha, monomial(model_coords, beta)), origin);
      entry.max_dev = std::max(entry.max_dev, std::fabs(lhs - rhs));
    }
    rep.max_dev = std::max(rep.max_dev, entry.max_dev);
    rep.entries.push_back(std::move(entry));
  }
  return rep;
}

ConnectionAgreement flattening_connection_agreement(const Flattening& f, const Connection& c) {
  const SubRiemannianStructure& s = c.structure();
  const Point& p = f.base;

  // model coframe pulled back through the normalized chart:
  // xihat^1 = d y1, xihat^2 = d y2, xihat^3 = y2/2 d y1 - y1/2 d y2 + d y3
  auto model_components = [&](const VectorField& w) {
    Expr w1 = apply(w, f.chart.coords[0]);
    Expr w2 = apply(w, f.chart.coords[1]);
    Expr w3 = apply(w, f.chart.coords[2]);
    Expr half = Expr::rational(1, 2);
    Expr c3 = half * f.chart.coords[1] * w1 - half * f.chart.coords[0] * w2 + w3;
    return std::array<Expr, 3>{w1, w2, c3};
  };

  // Jacobian of the normalized chart at p; model frame vectors at p are
  // the columns of its inverse
  Mat3 jac;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) jac[a][b] = eval(diff(f.chart.coords[static_cast<std::size_t>(a)], b), p);
  Mat3 jinv = invert3(jac);

  ConnectionAgreement out;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      std::array<Expr, 3> wh = model_components(s.X(j));
      Vec3 inherited{};
      for (int k = 0; k < 3; ++k) {
        double ak = eval(apply(s.X(i), wh[static_cast<std::size_t>(k)]), p);
        for (int a = 0; a < 3; ++a) inherited[a] += ak * jinv[a][k];
      }
      Vec3 natural = eval_field(c.nabla(i, j), p);
      double d = 0.0;
      for (int a = 0; a < 3; ++a) d = std::max(d, std::fabs(natural[a] - inherited[a]));
      out.dev[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] = d;
      out.max_dev = std::max(out.max_dev, d);
    }
  return out;
}

}  // namespace carnot
