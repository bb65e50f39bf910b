#include "tcast/lstm.hpp"

#include <cmath>
#include <random>
#include <string>

namespace tcast {

namespace {

Vector sigmoid(const Vector& z) {
    return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Vector tanh_of(const Vector& z) {
    return z.unaryExpr([](double v) { return std::tanh(v); });
}

void check_params(const LstmParams& p) {
    const Index in = p.input_dim(), hid = p.hidden_dim(), out = p.output_dim();
    for (int g = 0; g < kNumGates; ++g) {
        if (p.w[g].rows() != hid || p.w[g].cols() != in || p.u[g].rows() != hid ||
            p.u[g].cols() != hid || p.b[g].size() != hid)
            throw DimensionMismatch("lstm: inconsistent gate parameter shapes");
    }
    if (p.w_y.cols() != hid || p.b_y.size() != out)
        throw DimensionMismatch("lstm: inconsistent output head shapes");
}

double global_norm(const LstmParams& g) {
    double acc = 0.0;
    for (int k = 0; k < kNumGates; ++k)
        acc += g.w[k].squaredNorm() + g.u[k].squaredNorm() + g.b[k].squaredNorm();
    acc += g.w_y.squaredNorm() + g.b_y.squaredNorm();
    return std::sqrt(acc);
}

void scale_params(LstmParams& g, double s) {
    for (int k = 0; k < kNumGates; ++k) {
        g.w[k] *= s;
        g.u[k] *= s;
        g.b[k] *= s;
    }
    g.w_y *= s;
    g.b_y *= s;
}

StepCache step_full(const LstmParams& p, const LstmState& s, const Vector& x) {
    StepCache sc;
    sc.x = x;
    sc.h_prev = s.h;
    sc.c_prev = s.c;
    sc.gate_i = sigmoid(p.w[kGateInput] * x + p.u[kGateInput] * s.h + p.b[kGateInput]);
    sc.cand = tanh_of(p.w[kGateCandidate] * x + p.u[kGateCandidate] * s.h + p.b[kGateCandidate]);
    sc.gate_f = sigmoid(p.w[kGateForget] * x + p.u[kGateForget] * s.h + p.b[kGateForget]);
    sc.c = sc.gate_i.cwiseProduct(sc.cand) + sc.gate_f.cwiseProduct(s.c);
    sc.gate_o = sigmoid(p.w[kGateOutput] * x + p.u[kGateOutput] * s.h + p.b[kGateOutput]);
    sc.h = sc.gate_o.cwiseProduct(tanh_of(sc.c));
    return sc;
}

LstmParams zeros_like(const LstmParams& p) {
    LstmParams g;
    for (int k = 0; k < kNumGates; ++k) {
        g.w[k] = Matrix::Zero(p.w[k].rows(), p.w[k].cols());
        g.u[k] = Matrix::Zero(p.u[k].rows(), p.u[k].cols());
        g.b[k] = Vector::Zero(p.b[k].size());
    }
    g.w_y = Matrix::Zero(p.w_y.rows(), p.w_y.cols());
    g.b_y = Vector::Zero(p.b_y.size());
    return g;
}

void accumulate(LstmParams& acc, const LstmParams& g, double weight) {
    for (int k = 0; k < kNumGates; ++k) {
        acc.w[k] += weight * g.w[k];
        acc.u[k] += weight * g.u[k];
        acc.b[k] += weight * g.b[k];
    }
    acc.w_y += weight * g.w_y;
    acc.b_y += weight * g.b_y;
}

}  // namespace

LstmParams init_params(Index input_dim, Index hidden_dim, Index output_dim, std::uint64_t seed) {
    if (input_dim <= 0 || hidden_dim <= 0 || output_dim <= 0)
        throw DimensionMismatch("init_params: dimensions must be positive");
    std::mt19937_64 rng(seed);
    const double r = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    std::uniform_real_distribution<double> unif(-r, r);
    auto fill = [&](Index rows, Index cols) {
        Matrix m(rows, cols);
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j)
                m(i, j) = unif(rng);
        return m;
    };
    LstmParams p;
    for (int g = 0; g < kNumGates; ++g) {
        p.w[g] = fill(hidden_dim, input_dim);
        p.u[g] = fill(hidden_dim, hidden_dim);
        p.b[g] = Vector::Zero(hidden_dim);
    }
    p.w_y = fill(output_dim, hidden_dim);
    p.b_y = Vector::Zero(output_dim);
    return p;
}

LstmState zero_state(const LstmParams& p) {
    return {Vector::Zero(p.hidden_dim()), Vector::Zero(p.hidden_dim())};
}

std::pair<LstmState, Vector> step(const LstmParams& p, const LstmState& s, const Vector& x) {
    check_params(p);
    if (x.size() != p.input_dim() || s.h.size() != p.hidden_dim() || s.c.size() != p.hidden_dim())
        throw DimensionMismatch("step: input or state size mismatch");
    StepCache sc = step_full(p, s, x);
    Vector y = p.w_y * sc.h + p.b_y;
    return {LstmState{std::move(sc.h), std::move(sc.c)}, std::move(y)};
}

ForwardResult forward_sequence(const LstmParams& p, const std::vector<Vector>& xs) {
    check_params(p);
    if (xs.empty()) throw DimensionMismatch("forward_sequence: empty input sequence");
    ForwardResult out;
    out.outputs.reserve(xs.size());
    out.cache.reserve(xs.size());
    LstmState s = zero_state(p);
    for (const Vector& x : xs) {
        if (x.size() != p.input_dim())
            throw DimensionMismatch("forward_sequence: input size mismatch");
        StepCache sc = step_full(p, s, x);
        s.h = sc.h;
        s.c = sc.c;
        out.outputs.push_back(p.w_y * sc.h + p.b_y);
        out.cache.push_back(std::move(sc));
    }
    return out;
}

double loss_mse(const std::vector<Vector>& ys, const std::vector<Vector>& targets) {
    if (ys.size() != targets.size() || ys.empty())
        throw DimensionMismatch("loss_mse: sequence lengths differ or are empty");
    double acc = 0.0;
    Index dim = ys[0].size();
    for (std::size_t t = 0; t < ys.size(); ++t) {
        if (ys[t].size() != dim || targets[t].size() != dim)
            throw DimensionMismatch("loss_mse: component dimensions differ");
        acc += (ys[t] - targets[t]).squaredNorm();
    }
    return acc / (static_cast<double>(ys.size()) * static_cast<double>(dim));
}

LstmParams backward(const LstmParams& p, const ForwardResult& fwd, const std::vector<Vector>& targets,
                    double grad_clip) {
    check_params(p);
    const std::size_t T = fwd.cache.size();
    if (T == 0 || fwd.outputs.size() != T || targets.size() != T)
        throw StaleCache("backward: cache and target lengths disagree");
    for (const auto& sc : fwd.cache)
        if (sc.x.size() != p.input_dim() || sc.h.size() != p.hidden_dim())
            throw StaleCache("backward: cache shapes do not match parameters");
    for (const auto& t : targets)
        if (t.size() != p.output_dim())
            throw StaleCache("backward: target dimension does not match output head");

    const double denom = static_cast<double>(T) * static_cast<double>(p.output_dim());
    LstmParams g = zeros_like(p);
    Vector dh_next = Vector::Zero(p.hidden_dim());
    Vector dc_next = Vector::Zero(p.hidden_dim());
    for (std::size_t t = T; t-- > 0;) {
        const StepCache& sc = fwd.cache[t];
        const Vector dy = 2.0 * (fwd.outputs[t] - targets[t]) / denom;
        g.w_y.noalias() += dy * sc.h.transpose();
        g.b_y += dy;
        const Vector dh = p.w_y.transpose() * dy + dh_next;
        const Vector tc = tanh_of(sc.c);
        const Vector dzo = dh.cwiseProduct(tc).cwiseProduct(sc.gate_o)
                               .cwiseProduct(Vector::Ones(sc.gate_o.size()) - sc.gate_o);
        const Vector dc = dh.cwiseProduct(sc.gate_o)
                              .cwiseProduct(Vector::Ones(tc.size()) - tc.cwiseProduct(tc)) + dc_next;
        const Vector dzi = dc.cwiseProduct(sc.cand).cwiseProduct(sc.gate_i)
                               .cwiseProduct(Vector::Ones(sc.gate_i.size()) - sc.gate_i);
        const Vector dzc = dc.cwiseProduct(sc.gate_i)
                               .cwiseProduct(Vector::Ones(sc.cand.size()) - sc.cand.cwiseProduct(sc.cand));
        const Vector dzf = dc.cwiseProduct(sc.c_prev).cwiseProduct(sc.gate_f)
                               .cwiseProduct(Vector::Ones(sc.gate_f.size()) - sc.gate_f);
        dc_next = dc.cwiseProduct(sc.gate_f);
        dh_next = p.u[kGateInput].transpose() * dzi + p.u[kGateCandidate].transpose() * dzc +
                  p.u[kGateForget].transpose() * dzf + p.u[kGateOutput].transpose() * dzo;
        const std::array<const Vector*, kNumGates> dz = {&dzi, &dzc, &dzf, &dzo};
        for (int k = 0; k < kNumGates; ++k) {
            g.w[k].noalias() += *dz[k] * sc.x.transpose();
            g.u[k].noalias() += *dz[k] * sc.h_prev.transpose();
            g.b[k] += *dz[k];
        }
    }
    if (std::isfinite(grad_clip)) {
        const double norm = global_norm(g);
        if (norm > grad_clip && norm > 0.0) scale_params(g, grad_clip / norm);
    }
    return g;
}

std::pair<LstmParams, std::vector<double>> train(LstmParams p, const std::vector<TrainSample>& samples,
                                                 const TrainConfig& config) {
    check_params(p);
    if (samples.empty()) throw DimensionMismatch("train: empty dataset");
    if (p.input_dim() != p.output_dim())
        throw DimensionMismatch("train: next-step training requires input_dim == output_dim");
    if (config.learning_rate < 0.0 || config.epochs <= 0 || config.grad_clip <= 0.0)
        throw DimensionMismatch("train: invalid config");

    // Target sequence of a sample is its window shifted one step, closed by `next`.
    std::vector<std::vector<Vector>> target_seqs;
    target_seqs.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.window.empty()) throw DimensionMismatch("train: empty window");
        std::vector<Vector> t(s.window.begin() + 1, s.window.end());
        t.push_back(s.next);
        target_seqs.push_back(std::move(t));
    }

    const double inv_n = 1.0 / static_cast<double>(samples.size());
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(config.epochs));
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        LstmParams grad = zeros_like(p);
        double loss = 0.0;
        for (std::size_t n = 0; n < samples.size(); ++n) {
            ForwardResult fwd = forward_sequence(p, samples[n].window);
            loss += loss_mse(fwd.outputs, target_seqs[n]);
            accumulate(grad, backward(p, fwd, target_seqs[n]), inv_n);
        }
        loss *= inv_n;
        if (!std::isfinite(loss))
            throw NonFiniteLoss("train: non-finite loss at epoch " + std::to_string(epoch));
        const double norm = global_norm(grad);
        if (norm > config.grad_clip && norm > 0.0) scale_params(grad, config.grad_clip / norm);
        accumulate(p, grad, -config.learning_rate);
        history.push_back(loss);
    }
    return {std::move(p), std::move(history)};
}

std::vector<Vector> predict_free_running(const LstmParams& p, const std::vector<Vector>& seed_window,
                                         Index steps) {
    check_params(p);
    if (seed_window.empty()) throw DimensionMismatch("predict_free_running: empty seed window");
    if (p.input_dim() != p.output_dim())
        throw DimensionMismatch("predict_free_running: requires input_dim == output_dim");
    std::vector<Vector> out;
    if (steps <= 0) return out;
    out.reserve(static_cast<std::size_t>(steps));
    LstmState s = zero_state(p);
    Vector y;
    for (const Vector& x : seed_window) {
        auto [next, yy] = step(p, s, x);
        s = next;
        y = yy;
    }
    out.push_back(y);
    for (Index t = 1; t < steps; ++t) {
        auto [next, yy] = step(p, s, out.back());
        s = next;
        out.push_back(yy);
    }
    return out;
}

}  // namespace tcast
