#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "carnot/expr.hpp"
#include "carnot/sampling.hpp"

namespace carnot {

/// A single oriented 3-coordinate chart with its sampling domain.
struct Chart {
  std::array<std::string, 3> coords{"x1", "x2", "x3"};
  Box box = Box::unit_cube(3);

  int index_of(std::string_view name) const;
  std::span<const std::string> names() const { return coords; }
};

/// Point in chart coordinates.
struct Point {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  operator std::span<const double>() const { return x; }
};

/// Vector field sum_k e^k d/dx^k over a fixed chart.
struct VectorField {
  std::array<Expr, 3> e;

  static VectorField zero() { return {}; }
  static VectorField basis(int k);
};

/// Covector field sum_k a_k dx^k.
struct Covector {
  std::array<Expr, 3> a;
};

VectorField operator+(const VectorField& v, const VectorField& w);
VectorField operator-(const VectorField& v, const VectorField& w);
VectorField operator-(const VectorField& v);
VectorField operator*(const Expr& f, const VectorField& v);

/// Derivation V f = sum_k e^k df/dx^k.
Expr apply(const VectorField& v, const Expr& f);

/// Pairing sum_k a_k e^k.
Expr pair(const Covector& xi, const VectorField& v);

/// Lie bracket [V, W]^k = sum_j (v^j dw^k/dx^j - w^j dv^k/dx^j).
VectorField lie_bracket(const VectorField& v, const VectorField& w);

std::array<double, 3> eval_field(const VectorField& v, const Point& p);

/// Weighted order of a multi-index over {1,2,3}: entries 1 and 2 count
/// once, entries 3 count twice.
int weighted_order(std::span<const int> alpha);

class GrowthVectorError : public std::runtime_error {
 public:
  GrowthVectorError(std::string msg, Point at) : std::runtime_error(std::move(msg)), at_(at) {}
  const Point& at() const { return at_; }

 private:
  Point at_;
};

class CoframeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered orthonormal horizontal frame {X1, X2} on a chart, completed
/// by X3 = [X1, X2], with the dual coframe computed symbolically
/// (adjugate over determinant). Construction fails when the frame
/// matrix determinant vanishes at a sample point (the growth-vector
/// condition) or when a coframe duality identity does not check out.
class SubRiemannianStructure {
 public:
  static SubRiemannianStructure build(Chart chart, VectorField x1, VectorField x2,
                                      ZeroTestOptions zopt = {});

  const Chart& chart() const { return chart_; }
  const ZeroTestOptions& zero_options() const { return zopt_; }
  const VectorField& X(int i) const { return frame_[static_cast<std::size_t>(i - 1)]; }
  const Covector& xi(int i) const { return coframe_[static_cast<std::size_t>(i - 1)]; }
  const Expr& frame_determinant() const { return det_; }

  /// Frame components (xi^1(V), xi^2(V), xi^3(V)).
  std::array<Expr, 3> frame_components(const VectorField& v) const;
  /// Recombine frame components into a coordinate field.
  VectorField from_frame_components(const std::array<Expr, 3>& c) const;

  /// 3x3 matrix of frame coefficients at p, rows indexed by field.
  std::array<std::array<double, 3>, 3> frame_matrix_at(const Point& p) const;

  bool is_zero_expr(const Expr& e) const { return is_zero(e, chart_.box, zopt_); }

 private:
  SubRiemannianStructure() = default;
  Chart chart_;
  std::array<VectorField, 3> frame_;
  std::array<Covector, 3> coframe_;
  Expr det_;
  ZeroTestOptions zopt_;
};

/// Co-metric g = X1 (x) X1 + X2 (x) X2 in coordinate components.
struct CoMetric {
  std::array<std::array<Expr, 3>, 3> g;
};

CoMetric cometric(const SubRiemannianStructure& s);

/// Rotates the horizontal frame by angle field theta:
///   X1' = cos(theta) X1 + sin(theta) X2,
///   X2' = -sin(theta) X1 + cos(theta) X2.
/// The rebuilt X3' is cross-checked against
///   -(X1 theta) X1 - (X2 theta) X2 + X3.
SubRiemannianStructure rotate_frame(const SubRiemannianStructure& s, const Expr& theta);

}  // namespace carnot
