#pragma once

#include <array>
#include <string>
#include <vector>

#include "carnot/geometry.hpp"

namespace carnot {

/// Torsion values on the frame generators, as coordinate vector fields:
/// T(X1,X2), T(X2,X3), T(X3,X1).
struct TorsionData {
  VectorField t12, t23, t31;
};

/// Horizontal curvature values R_H X1, R_H X2, R_H X3.
struct CurvatureData {
  VectorField r1, r2, r3;
};

class DataConstraintError : public std::runtime_error {
 public:
  DataConstraintError(std::string msg, std::string identity)
      : std::runtime_error(std::move(msg)), identity_(std::move(identity)) {}
  const std::string& identity() const { return identity_; }

 private:
  std::string identity_;
};

/// Affine connection on a fixed frame, stored as the 27 coefficients
/// gamma[i][j][k] = xi^k(nabla_{X_{i+1}} X_{j+1}) (0-based storage).
class Connection {
 public:
  using Gamma = std::array<std::array<std::array<Expr, 3>, 3>, 3>;

  /// The natural connection: the unique compatible connection whose
  /// torsion is pinned by the bracket scalars c1 = xi^3([X2,X3]) and
  /// c2 = xi^3([X3,X1]) and whose horizontal curvature vanishes.
  /// Coefficients: f1 = c1, f2 = c2, f3 = X1 f2 - X2 f1, horizontal rows
  /// nabla_{X_i} X1 = f_i X2 and nabla_{X_i} X2 = -f_i X1, the X3-argument
  /// rows from the torsion identity, and nabla_{X3} X3 from R_H X3 = 0.
  static Connection natural(const SubRiemannianStructure& s);

  /// Reconstructs the unique compatible connection with the given
  /// torsion and horizontal curvature. Preconditions (checked by
  /// sampling): xi^3(T(X1,X2)) = -1; R_H X1 and R_H X2 have the
  /// skew-horizontal component shape with vanishing xi^3 parts.
  static Connection from_data(const SubRiemannianStructure& s, const TorsionData& t,
                              const CurvatureData& r);

  /// Wraps raw coefficients (perturbation experiments, tests).
  static Connection from_coefficients(const SubRiemannianStructure& s, Gamma g);

  const SubRiemannianStructure& structure() const { return s_; }
  const Expr& gamma(int i, int j, int k) const {
    return gamma_[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]
                 [static_cast<std::size_t>(k - 1)];
  }
  const Gamma& coefficients() const { return gamma_; }

  /// nabla_{X_i} X_j as a coordinate vector field.
  VectorField nabla(int i, int j) const;
  /// nabla_{X_i} W for an arbitrary field W (Leibniz over frame
  /// components of W).
  VectorField nabla_field(int i, const VectorField& w) const;
  /// nabla_V W = sum_i xi^i(V) nabla_{X_i} W.
  VectorField covariant_derivative(const VectorField& v, const VectorField& w) const;

  const Expr& f(int i) const { return f_[static_cast<std::size_t>(i - 1)]; }
  const Expr& c(int i) const { return c_[static_cast<std::size_t>(i - 1)]; }

 private:
  Connection(const SubRiemannianStructure& s, Gamma g);
  SubRiemannianStructure s_;
  Gamma gamma_;
  std::array<Expr, 3> f_;  // f_i = xi^2(nabla_{X_i} X1)
  std::array<Expr, 2> c_;  // c1 = xi^3([X2,X3]), c2 = xi^3([X3,X1])
};

/// Torsion on the frame generators, from
/// T(V,W) = nabla_V W - nabla_W V - [V,W].
TorsionData torsion(const Connection& c);

/// Torsion at arbitrary arguments (same defining formula).
VectorField torsion_at(const Connection& c, const VectorField& v, const VectorField& w);

/// R_H V = nabla_{X1} nabla_{X2} V - nabla_{X2} nabla_{X1} V - nabla_{X3} V.
VectorField horizontal_curvature(const Connection& c, const VectorField& v);

CurvatureData curvature_data(const Connection& c);

struct CompatibilityEntry {
  std::string identity;
  bool pass = false;
  double worst = 0.0;
};

struct CompatibilityReport {
  std::vector<CompatibilityEntry> entries;
  bool all_pass = true;
  double worst = 0.0;
};

/// Evaluates the component identities a compatible connection must
/// satisfy: xi^1(nabla_{X_i} X1) = 0, xi^2(nabla_{X_i} X2) = 0,
/// xi^2(nabla_{X_i} X1) + xi^1(nabla_{X_i} X2) = 0, and
/// xi^3(nabla_{X_i} X1) = xi^3(nabla_{X_i} X2) = 0 for each frame
/// direction.
CompatibilityReport check_compatibility(const Connection& c);

/// Parametric path: three coordinate expressions in a parameter t
/// (coordinate index 0 of a one-coordinate context), t in [0,1].
struct Curve {
  std::array<Expr, 3> pos;

  static Curve parse(const std::string& spec);  // "e1;e2;e3" in t
  Point at(double t) const;
  std::array<double, 3> velocity(double t) const;
};

/// Solves nabla_{gamma'} W = 0 in frame components with classical RK4.
/// v0 and the return value are frame components.
std::array<double, 3> parallel_transport(const Connection& c, const Curve& curve,
                                         const std::array<double, 3>& v0, int steps);

}  // namespace carnot
