#pragma once

// Recurrent identity function: one LSTM cell plus a linear readout, trained
// online with one truncated-backpropagation step per sample. The prediction
// for sample t is read out of the hidden state BEFORE t is consumed; the loss
// L = 1/2 |pred - z|^2 is then backpropagated through the readout and through
// the single cell step that produced the current hidden state (gradients stop
// at the previous hidden/cell state), followed by one SGD update. Weight
// layout is row-major with gate order [input, forget, candidate, output].

#include <cstdint>
#include <span>
#include <vector>

namespace zerops {

struct RnnParams {
    size_t input_dim = 28;
    size_t hidden_dim = 32;
    double learning_rate = 0.01;
    double init_scale = 0.08;  // weights drawn uniform in [-init_scale, init_scale]
    uint64_t seed = 1;
};

struct RnnState {
    RnnParams params;

    std::vector<double> wx;  // (4H x D) input weights
    std::vector<double> wh;  // (4H x H) recurrent weights
    std::vector<double> b;   // (4H) gate biases
    std::vector<double> wy;  // (D x H) readout weights
    std::vector<double> by;  // (D) readout bias

    std::vector<double> h;  // hidden state (H)
    std::vector<double> c;  // cell state (H)

    // Forward intermediates of the step that produced the current h/c; the
    // truncated backward pass replays exactly this step.
    bool has_cache = false;
    std::vector<double> cache_x;       // input of that step (D)
    std::vector<double> cache_h_prev;  // hidden before that step (H)
    std::vector<double> cache_c_prev;  // cell before that step (H)
    std::vector<double> cache_i, cache_f, cache_g, cache_o;  // gate activations (H each)
    std::vector<double> cache_c_new;                         // cell after that step (H)

    uint64_t skipped_updates = 0;  // non-finite gradients encountered

    static RnnState init(const RnnParams& params);
};

struct LstmActivations {
    std::vector<double> i, f, g, o, c_new, h_new;
};

// Pure single-cell forward pass with the given weights (also used by the
// finite-difference gradient oracle in tests).
LstmActivations lstm_cell_forward(const RnnState& net, std::span<const double> x,
                                  std::span<const double> h_in, std::span<const double> c_in);

// Loss of the cached one-step computation graph under the state's current
// weights: recompute h from the cached inputs, read out, compare to z.
double rnn_one_step_loss(const RnnState& net, std::span<const double> z);

struct RnnGradients {
    std::vector<double> dwx, dwh, db, dwy, dby;
};

// Analytic gradients of rnn_one_step_loss, truncated at the cached step's
// previous hidden/cell state. Pure; does not modify the state.
RnnGradients rnn_gradients(const RnnState& net, std::span<const double> z);

struct RnnStepResult {
    std::vector<double> prediction;
    double error = 0.0;  // L2 norm of (z - prediction)
};

// Predict, backpropagate, update, then advance the hidden state with z.
RnnStepResult rnn_step(RnnState& net, std::span<const double> z);

}  // namespace zerops
