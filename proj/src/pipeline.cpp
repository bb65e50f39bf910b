#include "tcast/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tcast/common.hpp"

namespace tcast {

LatentSeries extract_latent_series(const Paratuck2Model& m, Side side) {
    const auto& d = side == Side::A ? m.da : m.db;
    const Index L = side == Side::A ? m.rank_p() : m.rank_q();
    Matrix e(L, m.n_slices());
    for (Index k = 0; k < m.n_slices(); ++k) e.col(k) = d[static_cast<std::size_t>(k)];
    return {std::move(e), side};
}

std::vector<Vector> rebuild_diagonals(const Matrix& e) {
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(e.cols()));
    for (Index k = 0; k < e.cols(); ++k) out.push_back(e.col(k));
    return out;
}

namespace {

struct RowScaler {
    Vector lo, range;  // per-factor min and (max - min) over the history
};

RowScaler fit_scaler(const Matrix& e) {
    RowScaler s;
    s.lo = e.rowwise().minCoeff();
    Vector hi = e.rowwise().maxCoeff();
    s.range = hi - s.lo;
    return s;
}

// constant rows map to 0.5
double scale_one(double v, double lo, double range) {
    return range > 0.0 ? (v - lo) / range : 0.5;
}

double unscale_one(double v, double lo, double range) { return lo + v * range; }

Matrix forecast_matrix(const Matrix& series, const TrainConfig& cfg, Index epsilon, Index hidden) {
    const Index L = series.rows();
    const Index K = series.cols();
    const Index W = cfg.window_length;

    std::vector<TrainSample> samples;
    for (Index t = 0; t + W < K; ++t) {
        TrainSample s;
        for (Index u = 0; u < W; ++u) s.window.push_back(series.col(t + u));
        s.next = series.col(t + W);
        samples.push_back(std::move(s));
    }
    LstmParams net = init_params(L, hidden, L, cfg.seed);
    auto [trained, history] = train(std::move(net), samples, cfg);

    std::vector<Vector> seed_window;
    for (Index t = K - W; t < K; ++t) seed_window.push_back(series.col(t));
    const std::vector<Vector> preds = predict_free_running(trained, seed_window, epsilon);

    Matrix out(L, epsilon);
    for (Index t = 0; t < epsilon; ++t) out.col(t) = preds[static_cast<std::size_t>(t)];
    return out;
}

}  // namespace

Matrix forecast_latents(const LatentSeries& series, const TrainConfig& cfg, Index epsilon,
                        bool per_factor, Index hidden) {
    const Index L = series.e.rows();
    const Index K = series.e.cols();
    if (epsilon < 0) throw DimensionMismatch("forecast_latents: negative epsilon");
    if (hidden <= 0) throw DimensionMismatch("forecast_latents: hidden size must be positive");
    if (K <= cfg.window_length)
        throw SeriesTooShort("forecast_latents: history length must exceed the window length");

    Matrix out(L, K + epsilon);
    out.leftCols(K) = series.e;
    if (epsilon == 0) return out;

    const RowScaler sc = fit_scaler(series.e);
    Matrix scaled(L, K);
    for (Index r = 0; r < L; ++r)
        for (Index k = 0; k < K; ++k)
            scaled(r, k) = scale_one(series.e(r, k), sc.lo(r), sc.range(r));

    Matrix predicted(L, epsilon);
    if (per_factor) {
        for (Index r = 0; r < L; ++r) {
            TrainConfig row_cfg = cfg;
            row_cfg.seed = derive_seed(cfg.seed, "factor" + std::to_string(r));
            predicted.row(r) = forecast_matrix(scaled.row(r), row_cfg, epsilon, hidden);
        }
    } else {
        predicted = forecast_matrix(scaled, cfg, epsilon, hidden);
    }

    for (Index r = 0; r < L; ++r)
        for (Index t = 0; t < epsilon; ++t)
            out(r, K + t) = std::max(0.0, unscale_one(predicted(r, t), sc.lo(r), sc.range(r)));
    return out;
}

ExtendedModel extend_model(const Paratuck2Model& m, const Matrix& da_ext, const Matrix& db_ext) {
    const Index K = m.n_slices();
    if (da_ext.rows() != m.rank_p() || db_ext.rows() != m.rank_q())
        throw DimensionMismatch("extend_model: extension row counts do not match ranks");
    if (da_ext.cols() < K || db_ext.cols() != da_ext.cols())
        throw DimensionMismatch("extend_model: extensions must share K + epsilon columns");
    for (Index k = 0; k < K; ++k) {
        if ((da_ext.col(k) - m.da[static_cast<std::size_t>(k)]).cwiseAbs().maxCoeff() != 0.0 ||
            (db_ext.col(k) - m.db[static_cast<std::size_t>(k)]).cwiseAbs().maxCoeff() != 0.0)
            throw HistoryMismatch("extend_model: first K steps differ from the base model");
    }
    ExtendedModel em;
    em.base = m;
    em.epsilon = da_ext.cols() - K;
    em.da_ext = rebuild_diagonals(da_ext);
    em.db_ext = rebuild_diagonals(db_ext);
    return em;
}

Matrix reconstruct_extended_slice(const ExtendedModel& em, Index k) {
    const Index total = em.base.n_slices() + em.epsilon;
    if (k < 0 || k >= total) throw IndexOutOfRange("reconstruct_extended_slice: index out of range");
    const auto& da = em.da_ext[static_cast<std::size_t>(k)];
    const auto& db = em.db_ext[static_cast<std::size_t>(k)];
    return em.base.a * da.asDiagonal() * em.base.h * db.asDiagonal() * em.base.b.transpose();
}

Tensor3 reconstruct_predicted_slices(const ExtendedModel& em) {
    if (em.epsilon <= 0) throw NoForecast("reconstruct_predicted_slices: model has no forecast steps");
    Tensor3 x(em.base.n_rows(), em.base.n_cols(), em.epsilon);
    for (Index t = 0; t < em.epsilon; ++t)
        x.set_slice(t, reconstruct_extended_slice(em, em.base.n_slices() + t));
    return x;
}

namespace {

double pearson(const Vector& a, const Vector& b) {
    const double ma = a.mean(), mb = b.mean();
    const Vector ca = a.array() - ma, cb = b.array() - mb;
    const double na = ca.norm(), nb = cb.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return ca.dot(cb) / (na * nb);
}

}  // namespace

FactorAlignment align_factors(const Matrix& reference_hist, const Matrix& candidate_hist) {
    if (reference_hist.rows() != candidate_hist.rows() ||
        reference_hist.cols() != candidate_hist.cols())
        throw ShapeMismatch("align_factors: history shapes differ");
    const Index L = reference_hist.rows();

    Matrix corr(L, L);
    for (Index r = 0; r < L; ++r)
        for (Index c = 0; c < L; ++c)
            corr(r, c) = pearson(reference_hist.row(r).transpose(), candidate_hist.row(c).transpose());

    FactorAlignment al;
    al.candidate_of.assign(static_cast<std::size_t>(L), -1);
    al.scale.assign(static_cast<std::size_t>(L), 1.0);
    std::vector<bool> ref_used(static_cast<std::size_t>(L), false);
    std::vector<bool> cand_used(static_cast<std::size_t>(L), false);
    for (Index n = 0; n < L; ++n) {
        double best = -std::numeric_limits<double>::infinity();
        Index br = -1, bc = -1;
        for (Index r = 0; r < L; ++r) {
            if (ref_used[static_cast<std::size_t>(r)]) continue;
            for (Index c = 0; c < L; ++c) {
                if (cand_used[static_cast<std::size_t>(c)]) continue;
                if (corr(r, c) > best) {
                    best = corr(r, c);
                    br = r;
                    bc = c;
                }
            }
        }
        ref_used[static_cast<std::size_t>(br)] = true;
        cand_used[static_cast<std::size_t>(bc)] = true;
        al.candidate_of[static_cast<std::size_t>(br)] = bc;
        const double denom = candidate_hist.row(bc).squaredNorm();
        al.scale[static_cast<std::size_t>(br)] =
            denom > 0.0 ? std::max(0.0, reference_hist.row(br).dot(candidate_hist.row(bc)) / denom)
                        : 0.0;
    }
    return al;
}

Matrix apply_alignment(const FactorAlignment& al, const Matrix& candidate) {
    const auto L = static_cast<Index>(al.candidate_of.size());
    if (candidate.rows() != L) throw ShapeMismatch("apply_alignment: row count mismatch");
    Matrix out(L, candidate.cols());
    for (Index r = 0; r < L; ++r)
        out.row(r) = al.scale[static_cast<std::size_t>(r)] *
                     candidate.row(al.candidate_of[static_cast<std::size_t>(r)]);
    return out;
}

}  // namespace tcast
