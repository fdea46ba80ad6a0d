#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace comtdp {

inline constexpr double kProbabilityTolerance = 1e-9;
inline constexpr double kWeightPruneThreshold = 1e-15;

/// Neumaier-compensated accumulator. Keeps sums independent of the
/// floating-point noise that plain left-to-right addition would pick up,
/// so sweep outputs stay byte-identical across run orders.
class KahanAccumulator {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// 12-significant-digit decimal formatting used for all CSV output.
inline std::string formatValue(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace comtdp
