#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "tcast/tensor.hpp"

namespace tcast {

/// Factor set of the decomposition X_k = A * diag(da_k) * H * diag(db_k) * B^T.
/// A couples rows to the p latent factors, B couples columns to the q latent
/// factors, H carries the asymmetry between the two factor sets, and the
/// diagonal vectors da/db carry the per-slice activity of each factor.
struct Paratuck2Model {
    Matrix a;                 // rows x p
    Matrix h;                 // p x q
    Matrix b;                 // cols x q
    std::vector<Vector> da;   // depth vectors of length p
    std::vector<Vector> db;   // depth vectors of length q
    bool nonnegative = false;

    Index n_rows() const { return a.rows(); }
    Index n_cols() const { return b.rows(); }
    Index n_slices() const { return static_cast<Index>(da.size()); }
    Index rank_p() const { return a.cols(); }
    Index rank_q() const { return b.cols(); }
};

struct FitConfig {
    Index p = 20;
    Index q = 30;
    int max_iters = 1000;
    double tol = 1e-6;             // relative change of the relative residual
    std::uint64_t seed = 0;
    double epsilon_guard = 1e-12;  // added to multiplicative-update denominators
};

struct FitReport {
    int iterations_run = 0;
    std::vector<double> residual_history;  // length iterations_run + 1
    bool converged = false;
    double wall_time_s = 0.0;
};

/// Called after every completed iteration; used by tests to observe
/// per-iteration state. Throwing from the observer aborts the fit.
using FitObserver = std::function<void(int iter, const Paratuck2Model&, double residual)>;

/// All factors filled with uniform random values in (0.01, 1.0] from a
/// generator seeded by config.seed; identical seeds give identical models.
Paratuck2Model init_model(Index rows, Index cols, Index slices, const FitConfig& config);

Matrix reconstruct_slice(const Paratuck2Model& m, Index k);
Tensor3 reconstruct(const Paratuck2Model& m);

/// ||x - reconstruct(m)|| / ||x||; if ||x|| == 0 returns ||reconstruct(m)||.
double relative_residual(const Paratuck2Model& m, const Tensor3& x);

/// Non-negative fit via multiplicative updates, factor order A, D^A, H, D^B, B,
/// each update using the freshest values of the other factors. Requires an
/// entrywise non-negative tensor; every factor stays non-negative throughout.
std::pair<Paratuck2Model, FitReport> fit_nonnegative(const Tensor3& x, const FitConfig& config,
                                                     const FitObserver& observer = {});

/// Classical alternating least squares baseline via pseudoinverse solves.
/// May produce negative factor entries.
std::pair<Paratuck2Model, FitReport> fit_als_unconstrained(const Tensor3& x, const FitConfig& config,
                                                           const FitObserver& observer = {});

}  // namespace tcast
