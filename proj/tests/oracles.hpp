#pragma once

// Definitional scalar-loop reference implementations used as independent
// oracles by the test suites. These deliberately avoid the library's
// linear-algebra paths.

#include <cmath>
#include <random>
#include <vector>

#include "tcast/paratuck2.hpp"
#include "tcast/tensor.hpp"

namespace oracle {

inline double frobenius_norm(const tcast::Tensor3& x) {
    double acc = 0.0;
    for (tcast::Index k = 0; k < x.depth(); ++k)
        for (tcast::Index i = 0; i < x.rows(); ++i)
            for (tcast::Index j = 0; j < x.cols(); ++j)
                acc += x(i, j, k) * x(i, j, k);
    return std::sqrt(acc);
}

inline tcast::Matrix kronecker(const tcast::Matrix& a, const tcast::Matrix& b) {
    tcast::Matrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (tcast::Index i = 0; i < a.rows(); ++i)
        for (tcast::Index j = 0; j < a.cols(); ++j)
            for (tcast::Index k = 0; k < b.rows(); ++k)
                for (tcast::Index l = 0; l < b.cols(); ++l)
                    c(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return c;
}

inline tcast::Matrix khatri_rao(const tcast::Matrix& a, const tcast::Matrix& b) {
    tcast::Matrix c(a.rows() * b.rows(), a.cols());
    for (tcast::Index r = 0; r < a.cols(); ++r) {
        const tcast::Matrix col = kronecker(a.col(r), b.col(r));
        c.col(r) = col.col(0);
    }
    return c;
}

/// Five-factor product by scalar loops: A diag(da) H diag(db) B^T.
inline tcast::Matrix reconstruct_slice(const tcast::Paratuck2Model& m, tcast::Index k) {
    const auto& da = m.da[static_cast<std::size_t>(k)];
    const auto& db = m.db[static_cast<std::size_t>(k)];
    tcast::Matrix out = tcast::Matrix::Zero(m.n_rows(), m.n_cols());
    for (tcast::Index i = 0; i < m.n_rows(); ++i)
        for (tcast::Index j = 0; j < m.n_cols(); ++j)
            for (tcast::Index p = 0; p < m.rank_p(); ++p)
                for (tcast::Index q = 0; q < m.rank_q(); ++q)
                    out(i, j) += m.a(i, p) * da(p) * m.h(p, q) * db(q) * m.b(j, q);
    return out;
}

inline tcast::Matrix random_matrix(tcast::Index rows, tcast::Index cols, std::mt19937_64& rng,
                                   double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> unif(lo, hi);
    tcast::Matrix m(rows, cols);
    for (tcast::Index i = 0; i < rows; ++i)
        for (tcast::Index j = 0; j < cols; ++j)
            m(i, j) = unif(rng);
    return m;
}

inline tcast::Tensor3 random_tensor(tcast::Index rows, tcast::Index cols, tcast::Index depth,
                                    std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> unif(lo, hi);
    tcast::Tensor3 x(rows, cols, depth);
    for (double& v : x.data()) v = unif(rng);
    return x;
}

/// Exact-rank planted model used by the recovery tests.
inline tcast::Paratuck2Model planted_model(tcast::Index rows, tcast::Index cols, tcast::Index slices,
                                           tcast::Index p, tcast::Index q, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    tcast::Paratuck2Model m;
    m.a = random_matrix(rows, p, rng, 0.01, 1.0);
    m.h = random_matrix(p, q, rng, 0.01, 1.0);
    m.b = random_matrix(cols, q, rng, 0.01, 1.0);
    for (tcast::Index k = 0; k < slices; ++k)
        m.da.push_back(random_matrix(p, 1, rng, 0.01, 1.0).col(0));
    for (tcast::Index k = 0; k < slices; ++k)
        m.db.push_back(random_matrix(q, 1, rng, 0.01, 1.0).col(0));
    m.nonnegative = true;
    return m;
}

}  // namespace oracle
