#pragma once

#include <span>
#include <vector>

#include "tcast/tensor.hpp"

namespace tcast {

struct SeriesScore {
    double mae = 0.0;
    double mda = 0.0;
    Index n_points = 0;
};

/// Mean over t of |pred_t - truth_t| / (|truth_t| + 1e-8).
double mae(std::span<const double> truth, std::span<const double> pred);

/// Fraction of steps where the two series move in the same direction;
/// flat steps (zero difference) match only flat steps.
double mda(std::span<const double> truth, std::span<const double> pred);

struct LatentScores {
    std::vector<SeriesScore> per_factor;
    SeriesScore average;
};

/// Row-wise scores of pred against truth plus their unweighted mean.
LatentScores score_latents(const Matrix& truth, const Matrix& pred);

}  // namespace tcast
