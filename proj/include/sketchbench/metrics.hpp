#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "sketchbench/matrix.hpp"
#include "sketchbench/random.hpp"
#include "sketchbench/sketch.hpp"

namespace sketchbench {

enum class DistortionMethod { definition, basis };

std::string_view to_string(DistortionMethod m);

struct DistortionResult {
    double eta = 0.0;
    double sigma_min = 0.0;  // extreme singular values of S U
    double sigma_max = 0.0;
    DistortionMethod method = DistortionMethod::definition;
};

struct EmbeddingCheck {
    double eps = 0.0;
    bool holds_squared = true;  // |1 - sigma_i^2| <= eps for all i
    bool holds_linear = true;   // |1 - sigma_i|   <= eps for all i
    Vector singular_values;     // all k singular values of S U, descending
};

/// eta = || I - (A^T A)^{-1/2} At^T At (A^T A)^{-1/2} ||_2 evaluated literally, with At
/// the sketched matrix. Throws RankError unless sigma_min(A) > 1e-10 sigma_max(A) and
/// ShapeError if the column counts differ.
DistortionResult distortion(const DenseMatrix& a, const DenseMatrix& a_sketched);

/// eta = max_i |1 - sigma_i(S U)^2| for U with orthonormal columns (not re-checked).
/// When S U has fewer rows than columns the missing singular values count as 0.
DistortionResult distortion_via_basis(const DenseMatrix& u, const SketchOperator& s);

/// distortion_via_basis when S U has already been formed.
DistortionResult distortion_of_sketched_basis(const DenseMatrix& su);

/// Both conventions of the (1 +- eps) subspace-embedding test on sigma_i(S U).
/// Throws ParameterError if eps <= 0.
EmbeddingCheck check_subspace_embedding(const SketchOperator& s, const DenseMatrix& u, double eps);

/// Draws an operator from a stream; trial t of an estimator receives prng_split(rng, t).
using SketchFactory = std::function<SketchOperator(const PrngState&)>;

/// Factory for a method spec at size n x m.
SketchFactory make_factory(const MethodSpec& spec, Eigen::Index n, Eigen::Index m);

/// ||S_t x||^2 for t = 0..trials-1, evaluated sequentially. Throws ParameterError if
/// x is not a unit vector (within 1e-10) or trials < 1.
std::vector<double> sample_squared_norms(const SketchFactory& factory, const Vector& x, std::size_t trials,
                                         const PrngState& rng);

/// Monte Carlo estimate of E| ||S x||^2 - 1 |^rho; rho must be a positive even integer.
double jl_moment_estimate(const SketchFactory& factory, const Vector& x, int rho, std::size_t trials,
                          const PrngState& rng);

/// Fraction of trials with | ||S x||^2 - 1 | > eps.
double jlt_failure_rate(const SketchFactory& factory, const Vector& x, double eps, std::size_t trials,
                        const PrngState& rng);

}  // namespace sketchbench
