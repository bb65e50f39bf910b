#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tcast/common.hpp"

namespace tcast {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense 3-way array with frontal slices of shape rows x cols and
/// depth slices along the third dimension. Entries are stored flat in
/// row-major slice order: index (i, j, k) lives at (k*rows + i)*cols + j.
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(Index rows, Index cols, Index depth)
        : rows_(rows), cols_(cols), depth_(depth),
          data_(static_cast<std::size_t>(rows * cols * depth), 0.0) {
        if (rows <= 0 || cols <= 0 || depth <= 0)
            throw DimensionMismatch("Tensor3: dimensions must be positive");
    }

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    Index depth() const { return depth_; }
    Index size() const { return rows_ * cols_ * depth_; }

    double operator()(Index i, Index j, Index k) const { return data_[flat(i, j, k)]; }
    double& operator()(Index i, Index j, Index k) { return data_[flat(i, j, k)]; }

    /// Frontal slice k as a rows x cols matrix.
    Matrix slice(Index k) const;
    void set_slice(Index k, const Matrix& m);

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool all_nonnegative() const;
    bool all_finite() const;

private:
    std::size_t flat(Index i, Index j, Index k) const {
        return static_cast<std::size_t>((k * rows_ + i) * cols_ + j);
    }

    Index rows_ = 0, cols_ = 0, depth_ = 0;
    std::vector<double> data_;
};

/// sqrt of the sum of squared entries.
double frobenius_norm(const Tensor3& x);

Matrix kronecker(const Matrix& a, const Matrix& b);

/// Column-wise Kronecker product; requires equal column counts.
Matrix khatri_rao(const Matrix& a, const Matrix& b);

/// Horizontal concatenation of the frontal slices: rows x (cols*depth).
Matrix unfold_slices(const Tensor3& x);

/// Inverse of unfold_slices.
Tensor3 fold_slices(const Matrix& m, Index depth);

/// Column-major stacking of a matrix into a vector.
Vector vectorize_slice(const Matrix& m);

Matrix devectorize(const Vector& v, Index rows, Index cols);

/// Moore-Penrose inverse via SVD; singular values below
/// 1e-12 * sigma_max are truncated to zero.
Matrix pseudoinverse(const Matrix& a);

}  // namespace tcast
