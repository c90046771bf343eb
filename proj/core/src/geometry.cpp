#include "carnot/geometry.hpp"

#include <cmath>
#include <sstream>

namespace carnot {

int Chart::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (coords[i] == name) return static_cast<int>(i);
  return -1;
}

VectorField VectorField::basis(int k) {
  VectorField v;
  v.e[static_cast<std::size_t>(k)] = Expr::integer(1);
  return v;
}

VectorField operator+(const VectorField& v, const VectorField& w) {
  VectorField r;
  for (int k = 0; k < 3; ++k) r.e[k] = v.e[k] + w.e[k];
  return r;
}

VectorField operator-(const VectorField& v, const VectorField& w) {
  VectorField r;
  for (int k = 0; k < 3; ++k) r.e[k] = v.e[k] - w.e[k];
  return r;
}

VectorField operator-(const VectorField& v) {
  VectorField r;
  for (int k = 0; k < 3; ++k) r.e[k] = -v.e[k];
  return r;
}

VectorField operator*(const Expr& f, const VectorField& v) {
  VectorField r;
  for (int k = 0; k < 3; ++k) r.e[k] = f * v.e[k];
  return r;
}

Expr apply(const VectorField& v, const Expr& f) {
  std::vector<Expr> terms;
  terms.reserve(3);
  for (int k = 0; k < 3; ++k) terms.push_back(v.e[k] * diff(f, k));
  return sum(std::move(terms));
}

Expr pair(const Covector& xi, const VectorField& v) {
  std::vector<Expr> terms;
  terms.reserve(3);
  for (int k = 0; k < 3; ++k) terms.push_back(xi.a[k] * v.e[k]);
  return sum(std::move(terms));
}

VectorField lie_bracket(const VectorField& v, const VectorField& w) {
  VectorField r;
  for (int k = 0; k < 3; ++k) {
    std::vector<Expr> terms;
    terms.reserve(6);
    for (int j = 0; j < 3; ++j) {
      terms.push_back(v.e[j] * diff(w.e[k], j));
      terms.push_back(-(w.e[j] * diff(v.e[k], j)));
    }
    r.e[k] = sum(std::move(terms));
  }
  return r;
}

std::array<double, 3> eval_field(const VectorField& v, const Point& p) {
  return {eval(v.e[0], p), eval(v.e[1], p), eval(v.e[2], p)};
}

int weighted_order(std::span<const int> alpha) {
  int w = 0;
  for (int a : alpha) {
    if (a == 1 || a == 2)
      w += 1;
    else if (a == 3)
      w += 2;
    else
      throw std::invalid_argument("multi-index entries must lie in {1,2,3}");
  }
  return w;
}

namespace {

Expr det3(const std::array<std::array<Expr, 3>, 3>& m) {
  std::vector<Expr> terms;
  terms.push_back(m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]));
  terms.push_back(-(m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])));
  terms.push_back(m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]));
  return sum(std::move(terms));
}

// adjugate transpose entry: cofactor C_ij = (-1)^(i+j) det(minor_ij)
Expr cofactor(const std::array<std::array<Expr, 3>, 3>& m, int i, int j) {
  int r0 = (i + 1) % 3, r1 = (i + 2) % 3;
  int c0 = (j + 1) % 3, c1 = (j + 2) % 3;
  // cyclic minors absorb the sign
  return m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
}

std::string point_str(const Point& p) {
  std::ostringstream os;
  os << "(" << p.x[0] << ", " << p.x[1] << ", " << p.x[2] << ")";
  return os.str();
}

}  // namespace

SubRiemannianStructure SubRiemannianStructure::build(Chart chart, VectorField x1, VectorField x2,
                                                     ZeroTestOptions zopt) {
  SubRiemannianStructure s;
  s.chart_ = std::move(chart);
  s.zopt_ = zopt;
  s.frame_[0] = std::move(x1);
  s.frame_[1] = std::move(x2);
  s.frame_[2] = lie_bracket(s.frame_[0], s.frame_[1]);

  std::array<std::array<Expr, 3>, 3> m;
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a) m[i][a] = s.frame_[i].e[a];
  s.det_ = det3(m);

  // growth vector (2,3): the frame matrix must be nonsingular on the box
  PointSampler gen(zopt.seed);
  for (int n = 0; n < zopt.samples; ++n) {
    std::vector<double> q = gen.point_in(s.chart_.box);
    Point p;
    for (int k = 0; k < 3; ++k) p.x[static_cast<std::size_t>(k)] = q[static_cast<std::size_t>(k)];
    double d;
    try {
      d = eval(s.det_, p);
    } catch (const EvalDomainError& err) {
      throw GrowthVectorError(std::string("frame determinant not evaluable at ") + point_str(p) +
                                  ": " + err.what(),
                              p);
    }
    if (std::fabs(d) <= zopt.tol)
      throw GrowthVectorError("frame {X1, X2, [X1,X2]} is degenerate at " + point_str(p) +
                                  " (determinant " + std::to_string(d) +
                                  "); the growth vector is not (2,3) there",
                              p);
  }

  // dual coframe xi^i = (adj M / det M) row, i.e. xi^i_a = C_ia / det
  Expr inv_det = pow(s.det_, -1);
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a) s.coframe_[i].a[a] = cofactor(m, i, a) * inv_det;

  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      Expr d = pair(s.xi(i), s.X(j)) - (i == j ? Expr::integer(1) : Expr());
      if (!is_zero(d, s.chart_.box, zopt))
        throw CoframeError("coframe duality failed for xi^" + std::to_string(i) + "(X" +
                           std::to_string(j) + ")");
    }
  return s;
}

std::array<Expr, 3> SubRiemannianStructure::frame_components(const VectorField& v) const {
  return {pair(coframe_[0], v), pair(coframe_[1], v), pair(coframe_[2], v)};
}

VectorField SubRiemannianStructure::from_frame_components(const std::array<Expr, 3>& c) const {
  VectorField r;
  for (int a = 0; a < 3; ++a) {
    std::vector<Expr> terms;
    for (int i = 0; i < 3; ++i) terms.push_back(c[i] * frame_[i].e[a]);
    r.e[a] = sum(std::move(terms));
  }
  return r;
}

std::array<std::array<double, 3>, 3> SubRiemannianStructure::frame_matrix_at(const Point& p) const {
  std::array<std::array<double, 3>, 3> m;
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a) m[i][a] = eval(frame_[i].e[a], p);
  return m;
}

CoMetric cometric(const SubRiemannianStructure& s) {
  CoMetric g;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      g.g[a][b] = s.X(1).e[a] * s.X(1).e[b] + s.X(2).e[a] * s.X(2).e[b];
  return g;
}

SubRiemannianStructure rotate_frame(const SubRiemannianStructure& s, const Expr& theta) {
  Expr c = cos(theta), n = sin(theta);
  VectorField x1p = c * s.X(1) + n * s.X(2);
  VectorField x2p = -(n * s.X(1)) + c * s.X(2);
  SubRiemannianStructure r =
      SubRiemannianStructure::build(s.chart(), x1p, x2p, s.zero_options());

  // cross-check the derived X3' against -(X1 theta) X1 - (X2 theta) X2 + X3
  VectorField expected =
      -(apply(s.X(1), theta) * s.X(1)) - (apply(s.X(2), theta) * s.X(2)) + s.X(3);
  for (int a = 0; a < 3; ++a) {
    if (!s.is_zero_expr(r.X(3).e[a] - expected.e[a]))
      throw CoframeError("rotated frame X3' does not match its bracket expansion");
  }
  return r;
}

}  // namespace carnot
