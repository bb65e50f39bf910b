#include "tcast/paratuck2.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <string>

namespace tcast {

namespace {

void check_ranks(Index rows, Index cols, Index slices, const FitConfig& cfg) {
    if (rows <= 0 || cols <= 0 || slices <= 0)
        throw DimensionMismatch("paratuck2: tensor dimensions must be positive");
    if (cfg.p <= 0 || cfg.q <= 0)
        throw DimensionMismatch("paratuck2: ranks must be positive");
    if (cfg.tol <= 0.0 || cfg.epsilon_guard <= 0.0 || cfg.max_iters <= 0)
        throw DimensionMismatch("paratuck2: tol, epsilon_guard and max_iters must be positive");
}

void check_finite(const Paratuck2Model& m, int iter, const char* factor_hint) {
    bool ok = m.a.allFinite() && m.h.allFinite() && m.b.allFinite();
    for (const auto& d : m.da) ok = ok && d.allFinite();
    for (const auto& d : m.db) ok = ok && d.allFinite();
    if (!ok)
        throw NonFiniteEncountered("paratuck2 fit: non-finite value after updating " +
                                   std::string(factor_hint) + " at iteration " + std::to_string(iter));
}

double relative_change(double current, double previous) {
    if (previous == 0.0) return current == 0.0 ? 0.0 : 1.0;
    return std::abs(current - previous) / previous;
}

std::vector<Matrix> slices_of(const Tensor3& x) {
    std::vector<Matrix> s;
    s.reserve(static_cast<std::size_t>(x.depth()));
    for (Index k = 0; k < x.depth(); ++k) s.push_back(x.slice(k));
    return s;
}

double residual_against(const std::vector<Matrix>& xs, const Paratuck2Model& m, double x_norm) {
    double acc = 0.0;
    for (Index k = 0; k < m.n_slices(); ++k)
        acc += (xs[static_cast<std::size_t>(k)] - reconstruct_slice(m, k)).squaredNorm();
    const double diff = std::sqrt(acc);
    return x_norm == 0.0 ? diff : diff / x_norm;
}

}  // namespace

Paratuck2Model init_model(Index rows, Index cols, Index slices, const FitConfig& config) {
    check_ranks(rows, cols, slices, config);
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unif(0.01, 1.0);
    auto fill = [&](Index r, Index c) {
        Matrix m(r, c);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j)
                m(i, j) = unif(rng);
        return m;
    };
    Paratuck2Model m;
    m.a = fill(rows, config.p);
    m.h = fill(config.p, config.q);
    m.b = fill(cols, config.q);
    m.da.reserve(static_cast<std::size_t>(slices));
    m.db.reserve(static_cast<std::size_t>(slices));
    for (Index k = 0; k < slices; ++k) m.da.push_back(fill(config.p, 1).col(0));
    for (Index k = 0; k < slices; ++k) m.db.push_back(fill(config.q, 1).col(0));
    return m;
}

Matrix reconstruct_slice(const Paratuck2Model& m, Index k) {
    if (k < 0 || k >= m.n_slices())
        throw IndexOutOfRange("reconstruct_slice: slice index out of range");
    const auto& da = m.da[static_cast<std::size_t>(k)];
    const auto& db = m.db[static_cast<std::size_t>(k)];
    return m.a * da.asDiagonal() * m.h * db.asDiagonal() * m.b.transpose();
}

Tensor3 reconstruct(const Paratuck2Model& m) {
    Tensor3 x(m.n_rows(), m.n_cols(), m.n_slices());
    for (Index k = 0; k < m.n_slices(); ++k) x.set_slice(k, reconstruct_slice(m, k));
    return x;
}

double relative_residual(const Paratuck2Model& m, const Tensor3& x) {
    if (m.n_rows() != x.rows() || m.n_cols() != x.cols() || m.n_slices() != x.depth())
        throw DimensionMismatch("relative_residual: model and tensor dimensions disagree");
    return residual_against(slices_of(x), m, frobenius_norm(x));
}

std::pair<Paratuck2Model, FitReport> fit_nonnegative(const Tensor3& x, const FitConfig& config,
                                                     const FitObserver& observer) {
    if (!x.all_nonnegative())
        throw NegativeInput("fit_nonnegative: tensor has negative entries");
    check_ranks(x.rows(), x.cols(), x.depth(), config);

    const auto t0 = std::chrono::steady_clock::now();
    const Index K = x.depth();
    const double eps = config.epsilon_guard;
    const double x_norm = frobenius_norm(x);
    const std::vector<Matrix> xs = slices_of(x);

    Paratuck2Model m = init_model(x.rows(), x.cols(), K, config);
    m.nonnegative = true;

    FitReport report;
    report.residual_history.push_back(residual_against(xs, m, x_norm));

    for (int iter = 0; iter < config.max_iters; ++iter) {
        // A:  min sum_k ||X_k - A F_k||  with F_k = diag(da_k) H diag(db_k) B^T
        {
            Matrix num = Matrix::Zero(m.a.rows(), m.a.cols());
            Matrix gram = Matrix::Zero(m.a.cols(), m.a.cols());
            for (Index k = 0; k < K; ++k) {
                const auto& da = m.da[static_cast<std::size_t>(k)];
                const auto& db = m.db[static_cast<std::size_t>(k)];
                const Matrix f = da.asDiagonal() * m.h * db.asDiagonal() * m.b.transpose();
                num.noalias() += xs[static_cast<std::size_t>(k)] * f.transpose();
                gram.noalias() += f * f.transpose();
            }
            const Matrix den = m.a * gram;
            m.a = m.a.cwiseProduct(num.cwiseQuotient((den.array() + eps).matrix()));
            check_finite(m, iter, "A");
        }
        // D^A per slice:  vec(X_k) = (F_k (.) A) da_k  with F_k = B diag(db_k) H^T
        for (Index k = 0; k < K; ++k) {
            auto& da = m.da[static_cast<std::size_t>(k)];
            const auto& db = m.db[static_cast<std::size_t>(k)];
            const Matrix f = m.b * db.asDiagonal() * m.h.transpose();
            const Matrix gram = (f.transpose() * f).cwiseProduct(m.a.transpose() * m.a);
            const Vector rhs = (m.a.transpose() * xs[static_cast<std::size_t>(k)] * f).diagonal();
            const Vector den = gram * da;
            da = da.cwiseProduct(rhs.cwiseQuotient((den.array() + eps).matrix()));
        }
        check_finite(m, iter, "D^A");
        // H:  vec(X_k) = (B diag(db_k) (x) A diag(da_k)) vec(H), all slices jointly
        {
            Matrix num = Matrix::Zero(m.h.rows(), m.h.cols());
            Matrix den = Matrix::Zero(m.h.rows(), m.h.cols());
            for (Index k = 0; k < K; ++k) {
                const Matrix ga = m.a * m.da[static_cast<std::size_t>(k)].asDiagonal();
                const Matrix gb = m.b * m.db[static_cast<std::size_t>(k)].asDiagonal();
                num.noalias() += ga.transpose() * xs[static_cast<std::size_t>(k)] * gb;
                den.noalias() += (ga.transpose() * ga) * m.h * (gb.transpose() * gb);
            }
            m.h = m.h.cwiseProduct(num.cwiseQuotient((den.array() + eps).matrix()));
            check_finite(m, iter, "H");
        }
        // D^B per slice:  vec(X_k) = (B (.) G_k) db_k  with G_k = A diag(da_k) H
        for (Index k = 0; k < K; ++k) {
            const auto& da = m.da[static_cast<std::size_t>(k)];
            auto& db = m.db[static_cast<std::size_t>(k)];
            const Matrix g = m.a * da.asDiagonal() * m.h;
            const Matrix gram = (g.transpose() * g).cwiseProduct(m.b.transpose() * m.b);
            const Vector rhs = (g.transpose() * xs[static_cast<std::size_t>(k)] * m.b).diagonal();
            const Vector den = gram * db;
            db = db.cwiseProduct(rhs.cwiseQuotient((den.array() + eps).matrix()));
        }
        check_finite(m, iter, "D^B");
        // B:  min sum_k ||X_k^T - B G_k^T||  with G_k = A diag(da_k) H diag(db_k)
        {
            Matrix num = Matrix::Zero(m.b.rows(), m.b.cols());
            Matrix gram = Matrix::Zero(m.b.cols(), m.b.cols());
            for (Index k = 0; k < K; ++k) {
                const auto& da = m.da[static_cast<std::size_t>(k)];
                const auto& db = m.db[static_cast<std::size_t>(k)];
                const Matrix g = m.a * da.asDiagonal() * m.h * db.asDiagonal();
                num.noalias() += xs[static_cast<std::size_t>(k)].transpose() * g;
                gram.noalias() += g.transpose() * g;
            }
            const Matrix den = m.b * gram;
            m.b = m.b.cwiseProduct(num.cwiseQuotient((den.array() + eps).matrix()));
            check_finite(m, iter, "B");
        }

        const double residual = residual_against(xs, m, x_norm);
        if (!std::isfinite(residual))
            throw NonFiniteEncountered("fit_nonnegative: non-finite residual at iteration " +
                                       std::to_string(iter));
        report.residual_history.push_back(residual);
        report.iterations_run = iter + 1;
        if (observer) observer(iter, m, residual);
        const double prev = report.residual_history[static_cast<std::size_t>(iter)];
        if (relative_change(residual, prev) < config.tol) {
            report.converged = true;
            break;
        }
    }

    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(m), std::move(report)};
}

std::pair<Paratuck2Model, FitReport> fit_als_unconstrained(const Tensor3& x, const FitConfig& config,
                                                           const FitObserver& observer) {
    check_ranks(x.rows(), x.cols(), x.depth(), config);

    const auto t0 = std::chrono::steady_clock::now();
    const Index K = x.depth();
    const Index P = config.p, Q = config.q;
    const double x_norm = frobenius_norm(x);
    const std::vector<Matrix> xs = slices_of(x);

    Paratuck2Model m = init_model(x.rows(), x.cols(), K, config);

    FitReport report;
    report.residual_history.push_back(residual_against(xs, m, x_norm));

    for (int iter = 0; iter < config.max_iters; ++iter) {
        // A = X F^+ over the concatenated slices, via the gram identity
        // F^+ = F^T (F F^T)^+.
        {
            Matrix num = Matrix::Zero(m.a.rows(), P);
            Matrix gram = Matrix::Zero(P, P);
            for (Index k = 0; k < K; ++k) {
                const auto& da = m.da[static_cast<std::size_t>(k)];
                const auto& db = m.db[static_cast<std::size_t>(k)];
                const Matrix f = da.asDiagonal() * m.h * db.asDiagonal() * m.b.transpose();
                num.noalias() += xs[static_cast<std::size_t>(k)] * f.transpose();
                gram.noalias() += f * f.transpose();
            }
            m.a = num * pseudoinverse(gram);
            check_finite(m, iter, "A");
        }
        // D^A rows: least-squares solve of vec(X_k) against F_k (.) A.
        for (Index k = 0; k < K; ++k) {
            const auto& db = m.db[static_cast<std::size_t>(k)];
            const Matrix f = m.b * db.asDiagonal() * m.h.transpose();
            const Matrix gram = (f.transpose() * f).cwiseProduct(m.a.transpose() * m.a);
            const Vector rhs = (m.a.transpose() * xs[static_cast<std::size_t>(k)] * f).diagonal();
            m.da[static_cast<std::size_t>(k)] = pseudoinverse(gram) * rhs;
        }
        check_finite(m, iter, "D^A");
        // vec(H) from the normal equations of the stacked Kronecker system.
        {
            Matrix gram = Matrix::Zero(P * Q, P * Q);
            Matrix rhs = Matrix::Zero(P, Q);
            for (Index k = 0; k < K; ++k) {
                const Matrix ga = m.a * m.da[static_cast<std::size_t>(k)].asDiagonal();
                const Matrix gb = m.b * m.db[static_cast<std::size_t>(k)].asDiagonal();
                gram.noalias() += kronecker(gb.transpose() * gb, ga.transpose() * ga);
                rhs.noalias() += ga.transpose() * xs[static_cast<std::size_t>(k)] * gb;
            }
            const Vector h = pseudoinverse(gram) * vectorize_slice(rhs);
            m.h = devectorize(h, P, Q);
            check_finite(m, iter, "H");
        }
        // D^B rows, symmetric to D^A.
        for (Index k = 0; k < K; ++k) {
            const auto& da = m.da[static_cast<std::size_t>(k)];
            const Matrix g = m.a * da.asDiagonal() * m.h;
            const Matrix gram = (g.transpose() * g).cwiseProduct(m.b.transpose() * m.b);
            const Vector rhs = (g.transpose() * xs[static_cast<std::size_t>(k)] * m.b).diagonal();
            m.db[static_cast<std::size_t>(k)] = pseudoinverse(gram) * rhs;
        }
        check_finite(m, iter, "D^B");
        // B, symmetric to A on the transposed slices.
        {
            Matrix num = Matrix::Zero(m.b.rows(), Q);
            Matrix gram = Matrix::Zero(Q, Q);
            for (Index k = 0; k < K; ++k) {
                const auto& da = m.da[static_cast<std::size_t>(k)];
                const auto& db = m.db[static_cast<std::size_t>(k)];
                const Matrix g = m.a * da.asDiagonal() * m.h * db.asDiagonal();
                num.noalias() += xs[static_cast<std::size_t>(k)].transpose() * g;
                gram.noalias() += g.transpose() * g;
            }
            m.b = num * pseudoinverse(gram);
            check_finite(m, iter, "B");
        }

        const double residual = residual_against(xs, m, x_norm);
        if (!std::isfinite(residual))
            throw NonFiniteEncountered("fit_als_unconstrained: non-finite residual at iteration " +
                                       std::to_string(iter));
        report.residual_history.push_back(residual);
        report.iterations_run = iter + 1;
        if (observer) observer(iter, m, residual);
        const double prev = report.residual_history[static_cast<std::size_t>(iter)];
        if (relative_change(residual, prev) < config.tol) {
            report.converged = true;
            break;
        }
    }

    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(m), std::move(report)};
}

}  // namespace tcast
