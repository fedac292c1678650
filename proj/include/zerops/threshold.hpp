#pragma once

// Dynamic threshold over reconstruction errors: exponential moving average of
// the error plus a variance band, theta = mu + c*sqrt(s). The decision is made
// against the threshold as it stood BEFORE the current error; anomalous errors
// are excluded from the baseline so the threshold does not chase a sustained
// fault. The first `warmup` samples always update and never flag.

#include <cmath>
#include <cstdint>

namespace zerops {

struct ThresholdModel {
    double alpha = 0.05;       // EMA smoothing in (0, 1]
    double sigma_mult = 3.0;   // c > 0
    uint64_t warmup = 50;      // W

    double mean = 0.0;     // mu: EMA of error
    double sq_dev = 0.0;   // s: EMA of squared deviation from mu
    uint64_t count = 0;    // samples seen
};

struct ThresholdDecision {
    bool is_anomaly = false;
    double threshold = 0.0;  // theta used for the decision
};

inline ThresholdDecision threshold_update(ThresholdModel& tm, double error) {
    const bool warmed = tm.count >= tm.warmup;
    const double theta = tm.mean + tm.sigma_mult * std::sqrt(tm.sq_dev);
    const bool anomaly = warmed && error > theta;
    if (!anomaly) {
        // mu first, then s against the updated mu.
        tm.mean = tm.alpha * error + (1.0 - tm.alpha) * tm.mean;
        const double dev = error - tm.mean;
        tm.sq_dev = tm.alpha * dev * dev + (1.0 - tm.alpha) * tm.sq_dev;
    }
    ++tm.count;
    return {anomaly, theta};
}

}  // namespace zerops
