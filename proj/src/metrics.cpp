#include "tcast/metrics.hpp"

#include <cmath>

namespace tcast {

namespace {
constexpr double kZeroGuard = 1e-8;

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }
}  // namespace

double mae(std::span<const double> truth, std::span<const double> pred) {
    if (truth.size() != pred.size()) throw LengthMismatch("mae: series lengths differ");
    if (truth.empty()) throw EmptySeries("mae: empty series");
    double acc = 0.0;
    for (std::size_t t = 0; t < truth.size(); ++t)
        acc += std::abs(pred[t] - truth[t]) / (std::abs(truth[t]) + kZeroGuard);
    return acc / static_cast<double>(truth.size());
}

double mda(std::span<const double> truth, std::span<const double> pred) {
    if (truth.size() != pred.size()) throw LengthMismatch("mda: series lengths differ");
    if (truth.size() < 2) throw SeriesTooShort("mda: need at least two points");
    Index hits = 0;
    for (std::size_t t = 1; t < truth.size(); ++t)
        if (sign_of(truth[t] - truth[t - 1]) == sign_of(pred[t] - pred[t - 1])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(truth.size() - 1);
}

LatentScores score_latents(const Matrix& truth, const Matrix& pred) {
    if (truth.rows() != pred.rows() || truth.cols() != pred.cols())
        throw ShapeMismatch("score_latents: shapes differ");
    if (truth.rows() == 0 || truth.cols() == 0)
        throw ShapeMismatch("score_latents: empty input");
    LatentScores out;
    out.per_factor.reserve(static_cast<std::size_t>(truth.rows()));
    double mae_sum = 0.0, mda_sum = 0.0;
    std::vector<double> t_row(static_cast<std::size_t>(truth.cols()));
    std::vector<double> p_row(static_cast<std::size_t>(truth.cols()));
    for (Index r = 0; r < truth.rows(); ++r) {
        for (Index c = 0; c < truth.cols(); ++c) {
            t_row[static_cast<std::size_t>(c)] = truth(r, c);
            p_row[static_cast<std::size_t>(c)] = pred(r, c);
        }
        SeriesScore s;
        s.mae = mae(t_row, p_row);
        s.mda = mda(t_row, p_row);
        s.n_points = truth.cols();
        mae_sum += s.mae;
        mda_sum += s.mda;
        out.per_factor.push_back(s);
    }
    out.average.mae = mae_sum / static_cast<double>(truth.rows());
    out.average.mda = mda_sum / static_cast<double>(truth.rows());
    out.average.n_points = truth.cols();
    return out;
}

}  // namespace tcast
