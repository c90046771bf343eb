#include "carnot/models.hpp"

namespace carnot {

namespace {

VectorField field(const Chart& c, const char* e1, const char* e2, const char* e3) {
  VectorField v;
  v.e[0] = parse_expr(e1, c.names());
  v.e[1] = parse_expr(e2, c.names());
  v.e[2] = parse_expr(e3, c.names());
  return v;
}

}  // namespace

SubRiemannianStructure heisenberg(ZeroTestOptions zopt) {
  Chart c;
  return SubRiemannianStructure::build(c, field(c, "1", "0", "-(1/2)*x2"),
                                       field(c, "0", "1", "(1/2)*x1"), zopt);
}

SubRiemannianStructure rototranslation(ZeroTestOptions zopt) {
  Chart c;
  return SubRiemannianStructure::build(c, field(c, "cos(x3)", "sin(x3)", "0"),
                                       field(c, "0", "0", "1"), zopt);
}

SubRiemannianStructure heisenberg_rotated(ZeroTestOptions zopt) {
  SubRiemannianStructure h = heisenberg(zopt);
  return rotate_frame(h, Expr::coord(0));
}

std::vector<std::string> bundled_model_names() {
  return {"heisenberg", "rototranslation", "heisenberg-rotated"};
}

std::optional<SubRiemannianStructure> bundled_model(const std::string& name,
                                                    ZeroTestOptions zopt) {
  if (name == "heisenberg") return heisenberg(zopt);
  if (name == "rototranslation") return rototranslation(zopt);
  if (name == "heisenberg-rotated") return heisenberg_rotated(zopt);
  return std::nullopt;
}

}  // namespace carnot
