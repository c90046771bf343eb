#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "carnot/expr.hpp"

namespace carnot {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

/// Axis-aligned sampling box, one [lo, hi] interval per coordinate.
struct Box {
  std::vector<std::array<double, 2>> ranges;

  static Box unit_cube(std::size_t dim) {
    Box b;
    b.ranges.assign(dim, {-1.0, 1.0});
    return b;
  }
  std::size_t dim() const { return ranges.size(); }
  std::array<double, 3> center() const;
};

/// Deterministic pseudorandom points in a box (xorshift64* with an
/// explicit bit-level double conversion, so streams are identical
/// across platforms for a fixed seed).
class PointSampler {
 public:
  explicit PointSampler(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::vector<double> point_in(const Box& box);

 private:
  std::uint64_t state_;
};

struct ZeroTestOptions {
  int samples = 64;
  double tol = 1e-9;
  std::uint64_t seed = kDefaultSeed;
};

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ZeroTestResult {
  bool zero = false;
  bool symbolic = false;       // decided by simplification alone
  double worst = 0.0;          // largest |value| over successful samples
  std::vector<double> worst_point;
  int skipped = 0;             // samples lost to evaluation domain errors
};

/// Probabilistic zero test: structural simplification first, then seeded
/// sampling. Domain errors skip the point; fewer than samples/2 usable
/// points raises SamplingError.
ZeroTestResult zero_test(const Expr& e, const Box& box, const ZeroTestOptions& opt = {});

bool is_zero(const Expr& e, const Box& box, const ZeroTestOptions& opt = {});

}  // namespace carnot
