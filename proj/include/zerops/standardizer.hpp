#pragma once

// Online per-metric standardization with Welford counters. All identity
// functions consume standardized vectors so reconstruction errors are
// comparable across metrics of wildly different scales.

#include <cstdint>
#include <span>
#include <vector>

namespace zerops {

class Standardizer {
public:
    static constexpr double kStddevFloor = 1e-9;

    explicit Standardizer(size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}

    size_t dim() const { return mean_.size(); }
    uint64_t count() const { return count_; }
    uint64_t nonfinite_replacements() const { return nonfinite_; }

    // Updates the running moments with x, then returns the standardized
    // vector. Non-finite components are replaced by the running mean (and
    // counted), so they standardize to ~0.
    std::vector<double> standardize(std::span<const double> x);

    // Serialization access.
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& m2() const { return m2_; }
    void load(uint64_t count, std::vector<double> mean, std::vector<double> m2,
              uint64_t nonfinite) {
        count_ = count;
        mean_ = std::move(mean);
        m2_ = std::move(m2);
        nonfinite_ = nonfinite;
    }

private:
    uint64_t count_ = 0;
    uint64_t nonfinite_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;
};

}  // namespace zerops
