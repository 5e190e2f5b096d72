#pragma once

#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "sketchbench/random.hpp"

namespace sketchbench {

template <typename Scalar>
using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

template <typename Scalar>
using Column = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Column-major dense matrix. Vectors are n x 1 instances.
using DenseMatrix = Dense<double>;
using Vector = Column<double>;

/// Compressed sparse row matrix. Eigen's row-major compressed storage is the CSR
/// layout: outerIndexPtr() is row_offsets, innerIndexPtr() is col_indices.
using SparseMatrixCSR = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t>;

/// Throws ParameterError unless the matrix is compressed, row offsets are monotone
/// from 0 to nnz, column indices are sorted and unique per row, and every stored
/// value is finite and nonzero.
void validate(const SparseMatrixCSR& a);

/// Throws ParameterError if any entry is not finite.
void validate(const DenseMatrix& a);

DenseMatrix gen_gaussian(Eigen::Index n, Eigen::Index d, PrngState& rng);

/// G1 * G2 + noise_sigma * E with G1 (n x k), G2 (k x d) and E standard normal.
DenseMatrix gen_low_rank_plus_noise(Eigen::Index n, Eigen::Index d, Eigen::Index k, double noise_sigma,
                                    PrngState& rng);

/// Product with a shape check that throws ShapeError instead of asserting.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

inline DenseMatrix transpose(const DenseMatrix& a) { return a.transpose(); }

template <typename Derived>
typename Derived::RealScalar frobenius_norm(const Eigen::MatrixBase<Derived>& a) {
    return a.norm();
}

inline double frobenius_norm(const SparseMatrixCSR& a) { return a.norm(); }

inline DenseMatrix densify(const SparseMatrixCSR& a) { return DenseMatrix(a); }

}  // namespace sketchbench
