#pragma once

#include <optional>

#include "sketchbench/matrix.hpp"
#include "sketchbench/sketch.hpp"

namespace sketchbench {

/// Residuals at or below this fraction of the reference norm count as exactly zero
/// when forming quality ratios.
inline constexpr double kZeroResidualTol = 1e-10;

/// numerator / denominator with both sides floored to zero below `zero_floor`:
/// 1 when both vanish, +inf when only the denominator does.
double quality_ratio(double numerator, double denominator, double zero_floor);

struct LsqResult {
    DenseMatrix x_tilde;  // d x 1
    DenseMatrix x_star;   // d x 1
    double sketched_residual = 0.0;
    double optimal_residual = 0.0;
    double ratio = 1.0;
};

/// Solves min ||S A x - S b|| and compares against the exact min ||A x - b||.
/// Throws RankError when A or S A lacks full column rank.
LsqResult sketch_and_solve_lsq(const DenseMatrix& a, const DenseMatrix& b, const SketchOperator& s);
LsqResult sketch_and_solve_lsq(const SparseMatrixCSR& a, const DenseMatrix& b, const SketchOperator& s);

struct LowRankResult {
    DenseMatrix v_k;  // d x k, orthonormal columns
    double sketch_error = 0.0;   // ||A - A V_k V_k^T||_F
    double optimal_error = 0.0;  // ||A - A_k||_F
    double ratio = 1.0;
    Eigen::Index sketch_rank = 0;  // numerical rank of Y = S A
    bool rank_deficient = false;   // sketch_rank < k; V_k is then padded from Q
};

/// ||A - A_k||_F = sqrt(sum_{i>k} sigma_i^2). Throws ParameterError unless
/// 1 <= k <= min(n, d).
double best_rank_k_error(const DenseMatrix& a, Eigen::Index k);
double best_rank_k_error(const SparseMatrixCSR& a, Eigen::Index k);

/// Row-space sketch: Y = S A, (Q, R) = qr(Y^T), B = A Q, W_k = top-k right singular
/// vectors of B, V_k = Q W_k. When m > d, Q is the d x d right singular basis of Y.
/// `optimal_error` may be supplied to skip the full SVD of A. Throws ParameterError
/// when m < k or k is outside [1, min(n, d)].
LowRankResult lowrank_approx(const DenseMatrix& a, Eigen::Index k, const SketchOperator& s,
                             std::optional<double> optimal_error = std::nullopt);
LowRankResult lowrank_approx(const SparseMatrixCSR& a, Eigen::Index k, const SketchOperator& s,
                             std::optional<double> optimal_error = std::nullopt);

}  // namespace sketchbench
