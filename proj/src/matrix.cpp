#include "sketchbench/matrix.hpp"

#include <cmath>
#include <string>

#include "sketchbench/errors.hpp"

namespace sketchbench {

void validate(const SparseMatrixCSR& a) {
    if (!a.isCompressed()) throw ParameterError("CSR matrix is not in compressed form");
    const auto* offsets = a.outerIndexPtr();
    const auto* cols = a.innerIndexPtr();
    const auto* values = a.valuePtr();
    if (offsets[0] != 0) throw ParameterError("CSR row_offsets[0] != 0");
    if (offsets[a.rows()] != a.nonZeros()) throw ParameterError("CSR row_offsets[n] != nnz");
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        if (offsets[r + 1] < offsets[r]) throw ParameterError("CSR row_offsets not monotone at row " + std::to_string(r));
        for (auto p = offsets[r]; p < offsets[r + 1]; ++p) {
            if (cols[p] < 0 || cols[p] >= a.cols()) throw ParameterError("CSR column index out of range in row " + std::to_string(r));
            if (p > offsets[r] && cols[p] <= cols[p - 1]) {
                throw ParameterError("CSR column indices not strictly increasing in row " + std::to_string(r));
            }
            if (!std::isfinite(values[p]) || values[p] == 0.0) {
                throw ParameterError("CSR stored value is zero or non-finite in row " + std::to_string(r));
            }
        }
    }
}

void validate(const DenseMatrix& a) {
    if (!a.allFinite()) throw ParameterError("dense matrix has non-finite entries");
}

DenseMatrix gen_gaussian(Eigen::Index n, Eigen::Index d, PrngState& rng) {
    if (n < 1 || d < 1) throw ParameterError("gen_gaussian: n and d must be >= 1");
    DenseMatrix a(n, d);
    // Column-major fill order is part of the reproducibility contract.
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < n; ++i) a(i, j) = rng.next_normal();
    return a;
}

DenseMatrix gen_low_rank_plus_noise(Eigen::Index n, Eigen::Index d, Eigen::Index k, double noise_sigma,
                                    PrngState& rng) {
    if (n < 1 || d < 1) throw ParameterError("gen_low_rank_plus_noise: n and d must be >= 1");
    if (k < 1 || k > std::min(n, d)) throw ParameterError("gen_low_rank_plus_noise: need 1 <= k <= min(n, d)");
    if (!(noise_sigma >= 0.0)) throw ParameterError("gen_low_rank_plus_noise: noise_sigma must be >= 0");
    const DenseMatrix left = gen_gaussian(n, k, rng);
    const DenseMatrix right = gen_gaussian(k, d, rng);
    DenseMatrix a = left * right;
    if (noise_sigma > 0.0) a += noise_sigma * gen_gaussian(n, d, rng);
    return a;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    return a * b;
}

}  // namespace sketchbench
