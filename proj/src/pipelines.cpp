#include "sketchbench/pipelines.hpp"

#include <cmath>
#include <limits>

#include "sketchbench/errors.hpp"
#include "sketchbench/linalg.hpp"

namespace sketchbench {

double quality_ratio(double numerator, double denominator, double zero_floor) {
    const bool num_zero = numerator <= zero_floor;
    const bool den_zero = denominator <= zero_floor;
    if (den_zero) return num_zero ? 1.0 : std::numeric_limits<double>::infinity();
    return (num_zero ? 0.0 : numerator) / denominator;
}

namespace {

LsqResult finish_lsq(const DenseMatrix& a_dense, const DenseMatrix& b, const DenseMatrix& sa, const DenseMatrix& sb) {
    LsqResult out;
    out.x_star = lstsq_exact(a_dense, b);
    try {
        out.x_tilde = lstsq_exact(sa, sb);
    } catch (const RankError&) {
        throw RankError("sketch_and_solve_lsq: sketched matrix S A is rank deficient");
    }
    out.sketched_residual = (a_dense * out.x_tilde - b).norm();
    out.optimal_residual = (a_dense * out.x_star - b).norm();
    out.ratio = quality_ratio(out.sketched_residual, out.optimal_residual, kZeroResidualTol * b.norm());
    return out;
}

void check_lsq_shapes(Eigen::Index n, Eigen::Index d, const DenseMatrix& b, const SketchOperator& s) {
    if (b.rows() != n || b.cols() != 1) throw ShapeError("sketch_and_solve_lsq: b must be n x 1");
    if (s.cols() != n) throw ShapeError("sketch_and_solve_lsq: sketch column count must equal n");
    if (n < d) throw ParameterError("sketch_and_solve_lsq: requires n >= d");
}

template <typename Input>
LowRankResult lowrank_impl(const Input& a, const DenseMatrix& a_dense, Eigen::Index k, const SketchOperator& s,
                           std::optional<double> optimal_error) {
    const Eigen::Index d = a_dense.cols();
    const Eigen::Index m = s.rows();
    if (k < 1 || k > std::min(a_dense.rows(), d)) throw ParameterError("lowrank_approx: k outside [1, min(n, d)]");
    if (m < k) {
        throw ParameterError("lowrank_approx: sketch size m=" + std::to_string(m) + " is below k=" + std::to_string(k));
    }
    if (s.cols() != a_dense.rows()) throw ShapeError("lowrank_approx: sketch column count must equal n");

    const DenseMatrix y = sketch_apply(s, a);  // m x d
    LowRankResult out;
    DenseMatrix q;
    if (m <= d) {
        auto qr = thin_qr(DenseMatrix(y.transpose()));
        const Vector diag = qr.r.diagonal().cwiseAbs();
        const double top = diag.maxCoeff();
        out.sketch_rank = top > 0.0 ? (diag.array() > kZeroResidualTol * top).count() : 0;
        q = std::move(qr.q);
    } else {
        // Row space of Y lives in R^d; cap the subspace at d.
        auto res = svd(y);
        const double top = res.singular_values(0);
        out.sketch_rank = top > 0.0 ? (res.singular_values.array() > kZeroResidualTol * top).count() : 0;
        q = std::move(res.v);
    }
    out.rank_deficient = out.sketch_rank < k;

    const DenseMatrix b = a_dense * q;
    const auto w = svd(b);
    out.v_k = q * w.v.leftCols(k);
    out.sketch_error = (a_dense - (a_dense * out.v_k) * out.v_k.transpose()).norm();
    out.optimal_error = optimal_error ? *optimal_error : best_rank_k_error(a_dense, k);
    out.ratio = quality_ratio(out.sketch_error, out.optimal_error, kZeroResidualTol * a_dense.norm());
    return out;
}

}  // namespace

LsqResult sketch_and_solve_lsq(const DenseMatrix& a, const DenseMatrix& b, const SketchOperator& s) {
    check_lsq_shapes(a.rows(), a.cols(), b, s);
    return finish_lsq(a, b, sketch_apply(s, a), sketch_apply(s, b));
}

LsqResult sketch_and_solve_lsq(const SparseMatrixCSR& a, const DenseMatrix& b, const SketchOperator& s) {
    check_lsq_shapes(a.rows(), a.cols(), b, s);
    return finish_lsq(densify(a), b, sketch_apply(s, a), sketch_apply(s, b));
}

double best_rank_k_error(const DenseMatrix& a, Eigen::Index k) {
    if (k < 1 || k > std::min(a.rows(), a.cols())) throw ParameterError("best_rank_k_error: k outside [1, min(n, d)]");
    const auto sigma = svd(a).singular_values;
    return std::sqrt(sigma.tail(sigma.size() - k).squaredNorm());
}

double best_rank_k_error(const SparseMatrixCSR& a, Eigen::Index k) { return best_rank_k_error(densify(a), k); }

LowRankResult lowrank_approx(const DenseMatrix& a, Eigen::Index k, const SketchOperator& s,
                             std::optional<double> optimal_error) {
    return lowrank_impl(a, a, k, s, optimal_error);
}

LowRankResult lowrank_approx(const SparseMatrixCSR& a, Eigen::Index k, const SketchOperator& s,
                             std::optional<double> optimal_error) {
    return lowrank_impl(a, densify(a), k, s, optimal_error);
}

}  // namespace sketchbench
