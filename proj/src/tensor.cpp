#include "tcast/tensor.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace tcast {

Matrix Tensor3::slice(Index k) const {
    if (k < 0 || k >= depth_) throw IndexOutOfRange("Tensor3::slice: slice index out of range");
    Matrix m(rows_, cols_);
    for (Index i = 0; i < rows_; ++i)
        for (Index j = 0; j < cols_; ++j)
            m(i, j) = data_[flat(i, j, k)];
    return m;
}

void Tensor3::set_slice(Index k, const Matrix& m) {
    if (k < 0 || k >= depth_) throw IndexOutOfRange("Tensor3::set_slice: slice index out of range");
    if (m.rows() != rows_ || m.cols() != cols_)
        throw DimensionMismatch("Tensor3::set_slice: slice shape mismatch");
    for (Index i = 0; i < rows_; ++i)
        for (Index j = 0; j < cols_; ++j)
            data_[flat(i, j, k)] = m(i, j);
}

bool Tensor3::all_nonnegative() const {
    for (double v : data_)
        if (!(v >= 0.0)) return false;
    return true;
}

bool Tensor3::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

double frobenius_norm(const Tensor3& x) {
    double acc = 0.0;
    for (double v : x.data()) acc += v * v;
    return std::sqrt(acc);
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            c.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return c;
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw ColumnMismatch("khatri_rao: column counts differ");
    Matrix c(a.rows() * b.rows(), a.cols());
    for (Index r = 0; r < a.cols(); ++r)
        for (Index i = 0; i < a.rows(); ++i)
            c.col(r).segment(i * b.rows(), b.rows()) = a(i, r) * b.col(r);
    return c;
}

Matrix unfold_slices(const Tensor3& x) {
    Matrix m(x.rows(), x.cols() * x.depth());
    for (Index k = 0; k < x.depth(); ++k)
        for (Index i = 0; i < x.rows(); ++i)
            for (Index j = 0; j < x.cols(); ++j)
                m(i, k * x.cols() + j) = x(i, j, k);
    return m;
}

Tensor3 fold_slices(const Matrix& m, Index depth) {
    if (depth <= 0 || m.cols() % depth != 0)
        throw DimensionMismatch("fold_slices: column count not divisible by depth");
    const Index cols = m.cols() / depth;
    Tensor3 x(m.rows(), cols, depth);
    for (Index k = 0; k < depth; ++k)
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < cols; ++j)
                x(i, j, k) = m(i, k * cols + j);
    return x;
}

Vector vectorize_slice(const Matrix& m) {
    Vector v(m.size());
    Index n = 0;
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            v(n++) = m(i, j);
    return v;
}

Matrix devectorize(const Vector& v, Index rows, Index cols) {
    if (v.size() != rows * cols)
        throw DimensionMismatch("devectorize: length does not match shape");
    Matrix m(rows, cols);
    Index n = 0;
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            m(i, j) = v(n++);
    return m;
}

Matrix pseudoinverse(const Matrix& a) {
    if (!a.allFinite())
        throw NonFiniteEncountered("pseudoinverse: input has non-finite entries");
    // BDCSVD is faster on larger problems, JacobiSVD more accurate on tiny ones.
    const bool small = a.rows() <= 32 && a.cols() <= 32;
    Eigen::VectorXd sv;
    Matrix u, v;
    if (small) {
        Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.info() != Eigen::Success)
            throw ConvergenceFailure("pseudoinverse: SVD did not converge");
        sv = svd.singularValues();
        u = svd.matrixU();
        v = svd.matrixV();
    } else {
        Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.info() != Eigen::Success)
            throw ConvergenceFailure("pseudoinverse: SVD did not converge");
        sv = svd.singularValues();
        u = svd.matrixU();
        v = svd.matrixV();
    }
    const double cutoff = sv.size() > 0 ? 1e-12 * sv(0) : 0.0;
    Eigen::VectorXd inv = sv;
    for (Index i = 0; i < inv.size(); ++i)
        inv(i) = sv(i) > cutoff ? 1.0 / sv(i) : 0.0;
    return v * inv.asDiagonal() * u.transpose();
}

}  // namespace tcast
