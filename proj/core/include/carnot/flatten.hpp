#pragma once

#include <array>
#include <string>
#include <vector>

#include "carnot/connection.hpp"
#include "carnot/geometry.hpp"

namespace carnot {

namespace tolerances {
inline constexpr double bracket_residual = 1e-9;   // Carnot residuals, order-3 checks
inline constexpr double linear_solve = 1e-10;      // order-2 postconditions, jet realization
inline constexpr double jet_agreement = 1e-9;
inline constexpr double connection_agreement = 1e-8;
inline constexpr double frame_agreement = 1e-8;
inline constexpr double transport_drift = 1e-6;
}  // namespace tolerances

class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CarnotVerificationError : public std::runtime_error {
 public:
  CarnotVerificationError(std::string msg, double residual)
      : std::runtime_error(std::move(msg)), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class CarnotRequiredError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Horizontal 2-jet of the rotation angle that turns the frame into a
/// Carnot frame at the base point: the brackets [X1,X3], [X2,X3] paired
/// against the coframe prescribe
///   X1 t = -xi^3([X2,X3]),  X2 t = xi^3([X1,X3]),
///   X1X1 t = xi^1([X1,X3]),  X2X2 t = xi^2([X2,X3]),
///   X1X2 t = (xi3(b13)^2 + xi3(b23)^2 + xi^1([X2,X3]) + 2 xi^2([X1,X3])) / 3,
///   X2X1 t = (-xi3(b13)^2 - xi3(b23)^2 + xi^2([X1,X3]) + 2 xi^1([X2,X3])) / 3.
struct ThetaJet {
  double x1 = 0, x2 = 0;
  double x11 = 0, x12 = 0, x21 = 0, x22 = 0;

  /// X3 theta forced by X3 = X1 X2 - X2 X1 as operators.
  double commutator() const { return x12 - x21; }
  std::array<double, 6> as_array() const { return {x1, x2, x11, x12, x21, x22}; }
};

ThetaJet carnot_theta_jet(const SubRiemannianStructure& s, const Point& p);

/// Minimal realization: a polynomial of degree <= 2 in the centered
/// coordinates with theta(p) = 0 whose frame derivatives at p reproduce
/// the jet; the three second-order components the jet leaves free are
/// zeroed in frame-adapted coordinates.
Expr realize_theta(const SubRiemannianStructure& s, const Point& p, const ThetaJet& jet);

struct CarnotFrame {
  Expr theta;
  SubRiemannianStructure rotated;
  Point base;
  double residual = 0.0;  // max |coefficient| of [X1',X3'] and [X2',X3'] at p
};

/// Rotates by the realized theta and verifies the Carnot conditions
/// [X1',X3']_p = [X2',X3']_p = 0 to tolerance.
CarnotFrame carnot_frame(const SubRiemannianStructure& s, const Point& p,
                         double tol = tolerances::bracket_residual);

/// N = c1 X1 + c2 X2 + X3 at p (coordinate components): the direction
/// every flattening's vertical field takes at the base point.
std::array<double, 3> vertical_direction(const SubRiemannianStructure& s, const Point& p);

struct ChartNormalization {
  std::array<Expr, 3> coords;  // functions of the original coordinates
  int order = 2;
};

/// Coordinates centered at p with (X_i xbar^j)(p) = delta and all
/// horizontal second derivatives zero except (X1X2 xbar^3)(p) = 1/2,
/// (X2X1 xbar^3)(p) = -1/2.
ChartNormalization normalize_chart_order2(const SubRiemannianStructure& s, const Point& p);

/// Extends the order-2 chart of the Carnot frame with cubic correctors
/// so that every third horizontal frame derivative of every coordinate
/// vanishes at p.
ChartNormalization normalize_chart_order3(const CarnotFrame& cf, const Point& p);

/// The eight cubic corrector polynomials, expressed in the order-2
/// coordinates (index encof (i,j,k) over {1,2}).
std::array<Expr, 8> phi_correctors(const std::array<Expr, 3>& coords);
int phi_index(int i, int j, int k);

struct PhiDualityEntry {
  std::array<int, 3> op;   // (i,j,k) applied as X_i X_j X_k
  std::array<int, 3> phi;  // corrector superscript
  double value = 0.0;
  double expected = 0.0;
};

/// Duality table (X_i X_j X_k)_p phi^(a,b,c). For rows other than
/// (1,2,1) and (2,1,2) the expected value is the Kronecker delta; those
/// two rows resolve through X3 = X1X2 - X2X1 and the Carnot condition
/// to the average of their neighbouring rows.
std::vector<PhiDualityEntry> phi_duality_table(const CarnotFrame& cf,
                                               const ChartNormalization& order2, const Point& p);

struct Flattening {
  CarnotFrame frame;
  ChartNormalization chart;              // order 3
  Chart model_chart;                     // normalized coordinates y1,y2,y3
  std::array<VectorField, 3> model;      // X^1 = d1 - y2/2 d3, etc., over model_chart
  Point base;
};

Flattening flatten(const SubRiemannianStructure& s, const Point& p);

struct JetAgreementEntry {
  std::vector<int> alpha;
  double max_dev = 0.0;
};

struct JetAgreementReport {
  std::vector<JetAgreementEntry> entries;
  double max_dev = 0.0;
};

/// Compares (X_alpha)_p applied to normalized-coordinate monomials of
/// degree <= 3 against the model fields, over every multi-index of
/// weighted order <= 3. Evaluation is symbolic application followed by
/// evaluation at the base point.
JetAgreementReport verify_jet_agreement(const Flattening& f);

struct ConnectionAgreement {
  double max_dev = 0.0;
  // deviation per (i,j) frame pair of nabla_{X_i} X_j at p
  std::array<std::array<double, 3>, 3> dev{};
};

/// Compares the given connection at the base point with the connection
/// the flattening inherits from its model frame (whose coefficients all
/// vanish in the model frame).
ConnectionAgreement flattening_connection_agreement(const Flattening& f, const Connection& c);

}  // namespace carnot
