#pragma once

#include <optional>
#include <string>
#include <vector>

#include "carnot/geometry.hpp"

namespace carnot {

/// Bundled model structures, usable by name anywhere a manifest path is
/// accepted: "heisenberg", "rototranslation", "heisenberg-rotated".
///
/// heisenberg:          X1 = d1 - (1/2) x2 d3, X2 = d2 + (1/2) x1 d3
/// rototranslation:     X1 = cos(x3) d1 + sin(x3) d2, X2 = d3
/// heisenberg-rotated:  the Heisenberg frame rotated by theta = x1
SubRiemannianStructure heisenberg(ZeroTestOptions zopt = {});
SubRiemannianStructure rototranslation(ZeroTestOptions zopt = {});
SubRiemannianStructure heisenberg_rotated(ZeroTestOptions zopt = {});

std::vector<std::string> bundled_model_names();
std::optional<SubRiemannianStructure> bundled_model(const std::string& name,
                                                    ZeroTestOptions zopt = {});

}  // namespace carnot
