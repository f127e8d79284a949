#pragma once

#include <cmath>
#include <cstdint>

namespace teamdec {

/// Kahan compensated accumulator. Deterministic for a fixed add order.
class KahanSum {
 public:
  void add(double x) {
    double y = x - compensation_;
    double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Streaming mean/variance over scalars; sums are compensated and the first
/// sample is used as a shift so large means do not swamp the spread.
class RunningMoments {
 public:
  void add(double x) {
    if (count_ == 0) shift_ = x;
    ++count_;
    sum_.add(x - shift_);
    sum_sq_.add((x - shift_) * (x - shift_));
  }

  std::int64_t count() const { return count_; }

  double mean() const { return count_ == 0 ? 0.0 : shift_ + sum_.value() / static_cast<double>(count_); }

  /// Bessel-corrected sample variance; 0 for fewer than two samples.
  double sample_variance() const {
    if (count_ < 2) return 0.0;
    double n = static_cast<double>(count_);
    double var = (sum_sq_.value() - sum_.value() * sum_.value() / n) / (n - 1.0);
    return var > 0.0 ? var : 0.0;
  }

  double sample_stddev() const { return std::sqrt(sample_variance()); }

  /// Standard error of the mean.
  double standard_error() const {
    return count_ < 2 ? 0.0 : sample_stddev() / std::sqrt(static_cast<double>(count_));
  }

 private:
  std::int64_t count_ = 0;
  double shift_ = 0.0;
  KahanSum sum_;
  KahanSum sum_sq_;
};

}  // namespace teamdec
