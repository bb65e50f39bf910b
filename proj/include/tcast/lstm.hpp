#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "tcast/tensor.hpp"

namespace tcast {

/// Gate order used throughout: input, candidate, forget, output.
enum Gate : int { kGateInput = 0, kGateCandidate = 1, kGateForget = 2, kGateOutput = 3 };
inline constexpr int kNumGates = 4;

/// Single-layer cell weights plus a linear output head. The output gate has
/// no cell-state (peephole) term; that coupling is fixed at zero by design.
struct LstmParams {
    std::array<Matrix, kNumGates> w;  // hidden x input
    std::array<Matrix, kNumGates> u;  // hidden x hidden
    std::array<Vector, kNumGates> b;  // hidden
    Matrix w_y;                       // output x hidden
    Vector b_y;                       // output

    Index input_dim() const { return w[0].cols(); }
    Index hidden_dim() const { return w[0].rows(); }
    Index output_dim() const { return w_y.rows(); }
};

struct LstmState {
    Vector h;
    Vector c;
};

struct TrainConfig {
    double learning_rate = 0.05;
    int epochs = 500;
    Index window_length = 8;
    double grad_clip = 5.0;
    std::uint64_t seed = 0;
};

/// Per-step activations captured during a forward pass, for BPTT.
struct StepCache {
    Vector x, h_prev, c_prev;
    Vector gate_i, cand, gate_f, c, gate_o, h;
};

struct ForwardResult {
    std::vector<Vector> outputs;
    std::vector<StepCache> cache;
};

LstmParams init_params(Index input_dim, Index hidden_dim, Index output_dim, std::uint64_t seed);

LstmState zero_state(const LstmParams& p);

std::pair<LstmState, Vector> step(const LstmParams& p, const LstmState& s, const Vector& x);

/// Runs step over the whole sequence from a zero initial state.
ForwardResult forward_sequence(const LstmParams& p, const std::vector<Vector>& xs);

/// Mean over time steps and components of the squared output error.
double loss_mse(const std::vector<Vector>& ys, const std::vector<Vector>& targets);

inline constexpr double kNoClip = std::numeric_limits<double>::infinity();

/// Exact gradients of loss_mse over the cached sequence; if grad_clip is
/// finite the global gradient norm is clipped to it afterwards.
LstmParams backward(const LstmParams& p, const ForwardResult& fwd, const std::vector<Vector>& targets,
                    double grad_clip = kNoClip);

struct TrainSample {
    std::vector<Vector> window;
    Vector next;
};

/// Full-batch gradient descent on one-step-ahead prediction: each sample's
/// target sequence is its window shifted by one, ending in `next`.
/// Requires input_dim == output_dim. Returns the per-epoch mean loss history.
std::pair<LstmParams, std::vector<double>> train(LstmParams p, const std::vector<TrainSample>& samples,
                                                 const TrainConfig& config);

/// Feeds each prediction back as the next input; returns exactly `steps` outputs.
std::vector<Vector> predict_free_running(const LstmParams& p, const std::vector<Vector>& seed_window,
                                         Index steps);

}  // namespace tcast
