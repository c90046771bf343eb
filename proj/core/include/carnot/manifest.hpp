#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "carnot/geometry.hpp"

namespace carnot {

class ManifestError : public std::runtime_error {
 public:
  ManifestError(std::string msg, int line) : std::runtime_error(std::move(msg)), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Parsed manifest: one manifold, two horizontal frame fields, a
/// sampling domain (default [-1,1] per coordinate), optional seed/tol
/// overrides. Format:
///
///   [manifold]
///   name = heisenberg
///   coords = x1, x2, x3
///   [frame]
///   X1 = 1, 0, -(1/2)*x2
///   X2 = 0, 1, (1/2)*x1
///   [domain]
///   x1 = -1 .. 1
///
/// "#" comments to end of line; blank lines are ignored.
struct Manifest {
  std::string name;
  Chart chart;
  VectorField x1, x2;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;

  /// Builds the structure; explicit options override the manifest's
  /// seed/tol fields, which override the defaults.
  SubRiemannianStructure build(ZeroTestOptions base = {}) const;
};

Manifest parse_manifest(const std::string& text);

/// Loads a manifest from a bundled model name ("heisenberg",
/// "rototranslation", "heisenberg-rotated") or a file path.
Manifest load_manifest(const std::string& path_or_name);

/// Text of the named bundled manifest, empty optional if unknown.
std::optional<std::string> bundled_manifest_text(const std::string& name);

}  // namespace carnot
