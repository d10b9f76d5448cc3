#pragma once

#include <cmath>

namespace rdsec {

// Neumaier compensated summation. Reductions that must agree between serial
// and parallel runs accumulate through this.
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

inline double neumaier_total(const double* data, std::size_t n) {
    NeumaierSum s;
    for (std::size_t i = 0; i < n; ++i) s.add(data[i]);
    return s.value();
}

}  // namespace rdsec
