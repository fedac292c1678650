#include "zerops/rnn.hpp"

#include <cmath>
#include <random>

#include "zerops/log.hpp"

namespace zerops {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
    for (size_t i = 0; i < y.size(); ++i) y[i] -= a * x[i];
}

}  // namespace

RnnState RnnState::init(const RnnParams& params) {
    RnnState net;
    net.params = params;
    const size_t d = params.input_dim;
    const size_t hd = params.hidden_dim;
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> dist(-params.init_scale, params.init_scale);
    auto fill = [&](std::vector<double>& w, size_t n) {
        w.resize(n);
        for (double& v : w) v = dist(rng);
    };
    fill(net.wx, 4 * hd * d);
    fill(net.wh, 4 * hd * hd);
    fill(net.b, 4 * hd);
    fill(net.wy, d * hd);
    fill(net.by, d);
    net.h.assign(hd, 0.0);
    net.c.assign(hd, 0.0);
    return net;
}

LstmActivations lstm_cell_forward(const RnnState& net, std::span<const double> x,
                                  std::span<const double> h_in, std::span<const double> c_in) {
    const size_t d = net.params.input_dim;
    const size_t hd = net.params.hidden_dim;
    LstmActivations act;
    act.i.resize(hd);
    act.f.resize(hd);
    act.g.resize(hd);
    act.o.resize(hd);
    act.c_new.resize(hd);
    act.h_new.resize(hd);

    for (size_t r = 0; r < hd; ++r) {
        double pre[4];
        for (int gate = 0; gate < 4; ++gate) {
            const size_t row = static_cast<size_t>(gate) * hd + r;
            double acc = net.b[row];
            const double* wx_row = net.wx.data() + row * d;
            for (size_t j = 0; j < d; ++j) acc += wx_row[j] * x[j];
            const double* wh_row = net.wh.data() + row * hd;
            for (size_t j = 0; j < hd; ++j) acc += wh_row[j] * h_in[j];
            pre[gate] = acc;
        }
        act.i[r] = sigmoid(pre[0]);
        act.f[r] = sigmoid(pre[1]);
        act.g[r] = std::tanh(pre[2]);
        act.o[r] = sigmoid(pre[3]);
        act.c_new[r] = act.f[r] * c_in[r] + act.i[r] * act.g[r];
        act.h_new[r] = act.o[r] * std::tanh(act.c_new[r]);
    }
    return act;
}

namespace {

std::vector<double> readout(const RnnState& net, const std::vector<double>& h) {
    const size_t d = net.params.input_dim;
    const size_t hd = net.params.hidden_dim;
    std::vector<double> y(d);
    for (size_t r = 0; r < d; ++r) {
        double acc = net.by[r];
        const double* row = net.wy.data() + r * hd;
        for (size_t j = 0; j < hd; ++j) acc += row[j] * h[j];
        y[r] = acc;
    }
    return y;
}

std::vector<double> current_hidden(const RnnState& net) {
    if (!net.has_cache) return net.h;
    return lstm_cell_forward(net, net.cache_x, net.cache_h_prev, net.cache_c_prev).h_new;
}

}  // namespace

double rnn_one_step_loss(const RnnState& net, std::span<const double> z) {
    const auto pred = readout(net, current_hidden(net));
    double loss = 0.0;
    for (size_t r = 0; r < pred.size(); ++r) {
        const double e = pred[r] - z[r];
        loss += 0.5 * e * e;
    }
    return loss;
}

RnnGradients rnn_gradients(const RnnState& net, std::span<const double> z) {
    const size_t d = net.params.input_dim;
    const size_t hd = net.params.hidden_dim;
    RnnGradients g;
    g.dwx.assign(net.wx.size(), 0.0);
    g.dwh.assign(net.wh.size(), 0.0);
    g.db.assign(net.b.size(), 0.0);
    g.dwy.assign(net.wy.size(), 0.0);
    g.dby.assign(net.by.size(), 0.0);

    const auto pred = readout(net, net.h);
    std::vector<double> e(d);
    for (size_t r = 0; r < d; ++r) e[r] = pred[r] - z[r];

    // Readout layer.
    std::vector<double> dh(hd, 0.0);
    for (size_t r = 0; r < d; ++r) {
        g.dby[r] = e[r];
        for (size_t j = 0; j < hd; ++j) {
            g.dwy[r * hd + j] = e[r] * net.h[j];
            dh[j] += net.wy[r * hd + j] * e[r];
        }
    }

    if (!net.has_cache) return g;

    // One cell step backward; truncation stops at cache_h_prev / cache_c_prev.
    for (size_t r = 0; r < hd; ++r) {
        const double tc = std::tanh(net.cache_c_new[r]);
        const double d_o = dh[r] * tc;
        const double dc = dh[r] * net.cache_o[r] * (1.0 - tc * tc);
        const double d_i = dc * net.cache_g[r];
        const double d_g = dc * net.cache_i[r];
        const double d_f = dc * net.cache_c_prev[r];

        const double da[4] = {
            d_i * net.cache_i[r] * (1.0 - net.cache_i[r]),
            d_f * net.cache_f[r] * (1.0 - net.cache_f[r]),
            d_g * (1.0 - net.cache_g[r] * net.cache_g[r]),
            d_o * net.cache_o[r] * (1.0 - net.cache_o[r]),
        };
        for (int gate = 0; gate < 4; ++gate) {
            const size_t row = static_cast<size_t>(gate) * hd + r;
            g.db[row] = da[gate];
            for (size_t j = 0; j < d; ++j) g.dwx[row * d + j] = da[gate] * net.cache_x[j];
            for (size_t j = 0; j < hd; ++j) g.dwh[row * hd + j] = da[gate] * net.cache_h_prev[j];
        }
    }
    return g;
}

RnnStepResult rnn_step(RnnState& net, std::span<const double> z) {
    RnnStepResult result;
    result.prediction = readout(net, net.h);
    double sum2 = 0.0;
    for (size_t r = 0; r < z.size(); ++r) {
        const double diff = z[r] - result.prediction[r];
        sum2 += diff * diff;
    }
    result.error = std::sqrt(sum2);

    const auto grads = rnn_gradients(net, z);
    const bool finite = all_finite(grads.dwx) && all_finite(grads.dwh) && all_finite(grads.db) &&
                        all_finite(grads.dwy) && all_finite(grads.dby);
    if (!finite) {
        ++net.skipped_updates;
        net.h.assign(net.params.hidden_dim, 0.0);
        net.c.assign(net.params.hidden_dim, 0.0);
        net.has_cache = false;
        log::warn("rnn: non-finite gradient, update skipped and activations reset (total %llu)",
                  static_cast<unsigned long long>(net.skipped_updates));
        return result;
    }
    const double lr = net.params.learning_rate;
    axpy(net.wx, lr, grads.dwx);
    axpy(net.wh, lr, grads.dwh);
    axpy(net.b, lr, grads.db);
    axpy(net.wy, lr, grads.dwy);
    axpy(net.by, lr, grads.dby);

    // Advance with z under the updated weights and cache the step.
    auto act = lstm_cell_forward(net, z, net.h, net.c);
    net.cache_x.assign(z.begin(), z.end());
    net.cache_h_prev = net.h;
    net.cache_c_prev = net.c;
    net.cache_i = std::move(act.i);
    net.cache_f = std::move(act.f);
    net.cache_g = std::move(act.g);
    net.cache_o = std::move(act.o);
    net.cache_c_new = act.c_new;
    net.has_cache = true;
    net.h = std::move(act.h_new);
    net.c = std::move(act.c_new);
    return result;
}

}  // namespace zerops
