#ifndef QTANNEAL_SUMMATION_H_
#define QTANNEAL_SUMMATION_H_

#include <cmath>
#include <span>

namespace qtanneal {

// Neumaier-compensated accumulator. Results depend only on the order of
// Add() calls, which keeps batch aggregates reproducible.
class CompensatedSum {
 public:
  void Add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      compensation_ += (sum_ - t) + v;
    } else {
      compensation_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline double CompensatedTotal(std::span<const double> values) {
  CompensatedSum s;
  for (double v : values) s.Add(v);
  return s.value();
}

}  // namespace qtanneal

#endif  // QTANNEAL_SUMMATION_H_
