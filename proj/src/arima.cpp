#include "zerops/arima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zerops/log.hpp"

namespace zerops {

namespace {

// Signed binomial weights of the d-th difference: x_t - C(d,1)x_{t-1} + ...
double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

void push_front_capped(std::vector<double>& buf, double v, size_t cap) {
    if (cap == 0) return;
    buf.insert(buf.begin(), v);
    if (buf.size() > cap) buf.resize(cap);
}

}  // namespace

ArimaModel::ArimaModel(const ArimaParams& params) : params_(params) {
    const size_t m = static_cast<size_t>(params_.p + params_.q);
    coeff_.assign(m, 0.0);
    cov_.assign(m * m, 0.0);
    for (size_t i = 0; i < m; ++i) cov_[i * m + i] = params_.init_cov;
}

std::vector<double> ArimaModel::regressors() const {
    std::vector<double> u;
    u.reserve(static_cast<size_t>(params_.p + params_.q));
    for (int i = 0; i < params_.p; ++i)
        u.push_back(static_cast<size_t>(i) < diff_lags_.size() ? diff_lags_[static_cast<size_t>(i)]
                                                               : 0.0);
    for (int i = 0; i < params_.q; ++i)
        u.push_back(static_cast<size_t>(i) < resid_lags_.size()
                        ? resid_lags_[static_cast<size_t>(i)]
                        : 0.0);
    return u;
}

double ArimaModel::difference(double x) const {
    double y = x;
    for (int k = 1; k <= params_.d; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        y += sign * binom(params_.d, k) * raw_lags_[static_cast<size_t>(k - 1)];
    }
    return y;
}

double ArimaModel::undifference(double yhat) const {
    double x = yhat;
    for (int k = 1; k <= params_.d; ++k) {
        const double sign = (k % 2 == 0) ? -1.0 : 1.0;
        x += sign * binom(params_.d, k) * raw_lags_[static_cast<size_t>(k - 1)];
    }
    return x;
}

double ArimaModel::predict() const {
    if (observed_ < static_cast<uint64_t>(params_.d))
        return raw_lags_.empty() ? 0.0 : raw_lags_[0];
    const auto u = regressors();
    double yhat = 0.0;
    for (size_t i = 0; i < u.size(); ++i) yhat += coeff_[i] * u[i];
    return undifference(yhat);
}

void ArimaModel::recondition() {
    const size_t m = coeff_.size();
    cov_.assign(m * m, 0.0);
    for (size_t i = 0; i < m; ++i) cov_[i * m + i] = params_.init_cov;
    ++reconditions_;
    log::debug("arima: covariance reconditioned (total %llu)",
               static_cast<unsigned long long>(reconditions_));
}

void ArimaModel::update(double x) {
    const size_t m = coeff_.size();
    if (observed_ >= static_cast<uint64_t>(params_.d)) {
        const double y = difference(x);
        const auto u = regressors();
        double yhat = 0.0;
        for (size_t i = 0; i < m; ++i) yhat += coeff_[i] * u[i];
        const double resid = y - yhat;

        if (m > 0) {
            const double rho = params_.forgetting;
            std::vector<double> pu(m, 0.0);
            for (size_t i = 0; i < m; ++i)
                for (size_t j = 0; j < m; ++j) pu[i] += cov_[i * m + j] * u[j];
            double denom = rho;
            for (size_t i = 0; i < m; ++i) denom += u[i] * pu[i];
            if (!std::isfinite(denom) || denom <= 0.0) {
                recondition();
            } else {
                for (size_t i = 0; i < m; ++i) {
                    const double gain = pu[i] / denom;
                    coeff_[i] += gain * resid;
                }
                for (size_t i = 0; i < m; ++i)
                    for (size_t j = 0; j < m; ++j)
                        cov_[i * m + j] = (cov_[i * m + j] - pu[i] * pu[j] / denom) / rho;
                // Keep the covariance symmetric against rounding drift.
                for (size_t i = 0; i < m; ++i)
                    for (size_t j = i + 1; j < m; ++j) {
                        const double avg = 0.5 * (cov_[i * m + j] + cov_[j * m + i]);
                        cov_[i * m + j] = avg;
                        cov_[j * m + i] = avg;
                    }
                double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
                bool finite = true;
                for (size_t i = 0; i < m; ++i) {
                    const double dv = cov_[i * m + i];
                    if (!std::isfinite(dv)) finite = false;
                    dmax = std::max(dmax, dv);
                    dmin = std::min(dmin, dv);
                }
                for (double c : coeff_)
                    if (!std::isfinite(c)) finite = false;
                if (!finite || dmin <= 0.0 || dmax / dmin > params_.cond_cap) {
                    recondition();
                    if (!finite) coeff_.assign(m, 0.0);
                }
            }
        }

        push_front_capped(diff_lags_, y, static_cast<size_t>(params_.p));
        push_front_capped(resid_lags_, resid, static_cast<size_t>(params_.q));
    }
    push_front_capped(raw_lags_, x, std::max<size_t>(static_cast<size_t>(params_.d), 1));
    ++observed_;
}

ArimaModel::Raw ArimaModel::raw() const {
    return {observed_, raw_lags_, diff_lags_, resid_lags_, coeff_, cov_, reconditions_};
}

void ArimaModel::load(Raw raw) {
    observed_ = raw.observed;
    raw_lags_ = std::move(raw.raw_lags);
    diff_lags_ = std::move(raw.diff_lags);
    resid_lags_ = std::move(raw.resid_lags);
    coeff_ = std::move(raw.coeff);
    cov_ = std::move(raw.cov);
    reconditions_ = raw.reconditions;
}

ArimaStepResult arima_step(ArimaState& state, std::span<const double> z) {
    ArimaStepResult result;
    result.prediction.resize(z.size());
    double sum2 = 0.0;
    for (size_t i = 0; i < z.size(); ++i) {
        const double pred = state.models[i].step(z[i]);
        result.prediction[i] = pred;
        const double d = z[i] - pred;
        sum2 += d * d;
    }
    result.error = std::sqrt(sum2);
    return result;
}

}  // namespace zerops
