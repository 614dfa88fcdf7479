#pragma once

#include <cmath>
#include <cstddef>

namespace cxshrink {

// Neumaier compensated sum; result depends only on the order values are fed,
// so a fixed reduction order gives bit-stable aggregates.
struct NeumaierSum {
  double s = 0.0;
  double c = 0.0;

  void add(double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }

  double get() const { return s + c; }
};

// Mean and standard error of the mean over a fixed-order stream.
struct MeanSe {
  NeumaierSum sum;
  NeumaierSum sum_sq;
  std::size_t count = 0;

  void add(double x) {
    sum.add(x);
    sum_sq.add(x * x);
    ++count;
  }

  double mean() const { return count ? sum.get() / count : 0.0; }

  double se() const {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    const double m = sum.get() / n;
    double var = (sum_sq.get() - n * m * m) / (n - 1.0);
    if (var < 0.0) var = 0.0;
    return std::sqrt(var / n);
  }
};

}  // namespace cxshrink
