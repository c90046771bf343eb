#include "carnot/sampling.hpp"

#include <cmath>

namespace carnot {

std::array<double, 3> Box::center() const {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < ranges.size() && i < 3; ++i)
    c[i] = 0.5 * (ranges[i][0] + ranges[i][1]);
  return c;
}

double PointSampler::uniform01() {
  // xorshift64* core; top 53 bits to mantissa
  std::uint64_t x = state_;
  x ^= x >> 12;
  x ^= x << 25;
  x ^= x >> 27;
  state_ = x;
  std::uint64_t y = x * 0x2545F4914F6CDD1DULL;
  return static_cast<double>(y >> 11) * 0x1.0p-53;
}

std::vector<double> PointSampler::point_in(const Box& box) {
  std::vector<double> p(box.dim());
  for (std::size_t i = 0; i < box.dim(); ++i)
    p[i] = uniform(box.ranges[i][0], box.ranges[i][1]);
  return p;
}

ZeroTestResult zero_test(const Expr& e, const Box& box, const ZeroTestOptions& opt) {
  if (opt.samples < 1) throw std::invalid_argument("zero_test: samples must be >= 1");
  if (!(opt.tol > 0)) throw std::invalid_argument("zero_test: tol must be positive");

  ZeroTestResult r;
  Expr s = simplify(e);
  if (s.is_zero()) {
    r.zero = true;
    r.symbolic = true;
    return r;
  }

  PointSampler gen(opt.seed);
  int ok = 0;
  r.zero = true;
  for (int i = 0; i < opt.samples; ++i) {
    std::vector<double> p = gen.point_in(box);
    double v;
    try {
      v = eval(s, p);
    } catch (const EvalDomainError&) {
      ++r.skipped;
      continue;
    }
    ++ok;
    double a = std::fabs(v);
    if (a > r.worst) {
      r.worst = a;
      r.worst_point = p;
    }
    if (!(a <= opt.tol)) r.zero = false;
  }
  if (ok < (opt.samples + 1) / 2)
    throw SamplingError("zero_test: fewer than half of the samples evaluated cleanly");
  return r;
}

bool is_zero(const Expr& e, const Box& box, const ZeroTestOptions& opt) {
  return zero_test(e, box, opt).zero;
}

}  // namespace carnot
