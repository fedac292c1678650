#pragma once

// Online ARIMA identity function: one independent scalar ARIMA(p,d,q) model
// per metric, coefficients tracked by recursive least squares with a
// forgetting factor. Each step yields the one-step prediction made before the
// value arrived; the value is then folded into the lag buffers and the RLS
// estimate. MA terms regress on lagged one-step residuals inside the same RLS
// system.

#include <cstdint>
#include <span>
#include <vector>

namespace zerops {

struct ArimaParams {
    int p = 1;                 // AR order
    int d = 1;                 // differencing order
    int q = 0;                 // MA order
    double forgetting = 0.99;  // RLS forgetting factor in (0, 1]
    double init_cov = 100.0;   // initial covariance scale (P = init_cov * I)
    double cond_cap = 1e12;    // covariance recondition trigger
};

// Scalar ARIMA over one metric's series.
class ArimaModel {
public:
    explicit ArimaModel(const ArimaParams& params);

    // One-step-ahead prediction in raw units, from the current state.
    double predict() const;
    // Folds the realized value into differencing buffers and the RLS update.
    void update(double x);

    double step(double x) {
        const double pred = predict();
        update(x);
        return pred;
    }

    const std::vector<double>& coefficients() const { return coeff_; }
    uint64_t reconditions() const { return reconditions_; }

    // Serialization access (flat state, doubles round-trip as raw bits).
    struct Raw {
        uint64_t observed;
        std::vector<double> raw_lags;    // newest first, size d (once filled)
        std::vector<double> diff_lags;   // newest first, size p
        std::vector<double> resid_lags;  // newest first, size q
        std::vector<double> coeff;       // size p+q
        std::vector<double> cov;         // row-major (p+q)^2
        uint64_t reconditions;
    };
    Raw raw() const;
    void load(Raw raw);

private:
    std::vector<double> regressors() const;
    double difference(double x) const;  // d-th difference ending at x
    double undifference(double yhat) const;
    void recondition();

    ArimaParams params_;
    uint64_t observed_ = 0;
    std::vector<double> raw_lags_;
    std::vector<double> diff_lags_;
    std::vector<double> resid_lags_;
    std::vector<double> coeff_;
    std::vector<double> cov_;
    uint64_t reconditions_ = 0;
};

struct ArimaState {
    ArimaParams params;
    std::vector<ArimaModel> models;

    ArimaState(size_t dim, const ArimaParams& p) : params(p), models(dim, ArimaModel(p)) {}
};

struct ArimaStepResult {
    std::vector<double> prediction;
    double error = 0.0;  // L2 norm of (z - prediction)
};

ArimaStepResult arima_step(ArimaState& state, std::span<const double> z);

}  // namespace zerops
