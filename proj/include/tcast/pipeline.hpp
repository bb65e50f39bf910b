#pragma once

#include <vector>

#include "tcast/lstm.hpp"
#include "tcast/paratuck2.hpp"

namespace tcast {

enum class Side { A, B };

/// The diagonals of one D tensor laid out as a factors x slices matrix.
struct LatentSeries {
    Matrix e;  // L x K
    Side side = Side::A;
};

/// A fitted model whose diagonal tensors have been extended epsilon steps
/// past the observed range; the static factors A, H, B are unchanged.
struct ExtendedModel {
    Paratuck2Model base;
    Index epsilon = 0;
    std::vector<Vector> da_ext;  // K + epsilon vectors of length P
    std::vector<Vector> db_ext;  // K + epsilon vectors of length Q
};

LatentSeries extract_latent_series(const Paratuck2Model& m, Side side);

/// Inverse of extract: writes the columns of e back into diagonal vectors.
std::vector<Vector> rebuild_diagonals(const Matrix& e);

/// Trains an LSTM on the series (min-max scaled per factor over the history)
/// and returns the series extended by epsilon free-running predictions,
/// inverse-scaled and clamped at zero. With per_factor each row gets its own
/// independent net instead of one joint net over all rows.
Matrix forecast_latents(const LatentSeries& series, const TrainConfig& cfg, Index epsilon,
                        bool per_factor = false, Index hidden = 16);

/// Packages extended diagonals around a base model; the first K columns of
/// each extension must reproduce the base diagonals exactly.
ExtendedModel extend_model(const Paratuck2Model& m, const Matrix& da_ext, const Matrix& db_ext);

/// Slice k of the extended decomposition, k in [0, K + epsilon).
Matrix reconstruct_extended_slice(const ExtendedModel& em, Index k);

/// The epsilon forecast slices as a rows x cols x epsilon tensor.
Tensor3 reconstruct_predicted_slices(const ExtendedModel& em);

/// Greedy 1:1 factor matching between two independently fitted latent series,
/// driven by Pearson correlation over the shared history, plus a per-pair
/// least-squares scale fitted on that history.
struct FactorAlignment {
    std::vector<Index> candidate_of;  // reference row r is matched by candidate row candidate_of[r]
    std::vector<double> scale;        // multiplier applied to the candidate row
};

FactorAlignment align_factors(const Matrix& reference_hist, const Matrix& candidate_hist);

/// Reorders and rescales candidate rows onto the reference's factor order.
Matrix apply_alignment(const FactorAlignment& al, const Matrix& candidate);

}  // namespace tcast
