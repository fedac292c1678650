#include "zerops/standardizer.hpp"

#include <cmath>

#include "zerops/log.hpp"

namespace zerops {

std::vector<double> Standardizer::standardize(std::span<const double> x) {
    const size_t d = dim();
    std::vector<double> z(d, 0.0);
    ++count_;
    const double n = static_cast<double>(count_);
    for (size_t i = 0; i < d; ++i) {
        double v = x[i];
        if (!std::isfinite(v)) {
            v = mean_[i];
            ++nonfinite_;
            if (nonfinite_ == 1 || (nonfinite_ & (nonfinite_ - 1)) == 0)
                log::warn("standardizer: replaced non-finite input (total %llu)",
                          static_cast<unsigned long long>(nonfinite_));
        }
        const double delta = v - mean_[i];
        mean_[i] += delta / n;
        m2_[i] += delta * (v - mean_[i]);
        const double stddev = std::sqrt(m2_[i] / n);
        z[i] = (v - mean_[i]) / (stddev > kStddevFloor ? stddev : kStddevFloor);
    }
    return z;
}

}  // namespace zerops
