#pragma once

// Small numeric building blocks shared across modules.

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace rwre {

// Point estimate with its Monte Carlo standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Neumaier's improved Kahan summation.  All reductions that feed
// bit-reproducibility contracts go through this in fixed index order, so
// results do not depend on how work was scheduled.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
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

// Sample mean and standard error of the mean from streamed values.
// The mean is a compensated sum; the spread uses Welford's recurrence,
// which yields an exact zero for constant input (a point-mass environment
// must report std_error == 0, not rounding dust).
class MeanAccumulator {
 public:
  void add(double x) {
    sum_.add(x);
    ++count_;
    const double delta = x - running_mean_;
    running_mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - running_mean_);
  }
  std::size_t count() const { return count_; }
  Estimate finish() const {
    if (count_ < 2) {
      throw std::logic_error("MeanAccumulator needs at least 2 samples");
    }
    const double n = static_cast<double>(count_);
    const double var = std::max(0.0, m2_ / (n - 1.0));
    return Estimate{sum_.value() / n, std::sqrt(var / n)};
  }

 private:
  NeumaierSum sum_;
  double running_mean_ = 0.0;
  double m2_ = 0.0;
  std::size_t count_ = 0;
};

}  // namespace rwre
