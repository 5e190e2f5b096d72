#include "sketchbench/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "sketchbench/errors.hpp"
#include "sketchbench/linalg.hpp"

namespace sketchbench {

std::string_view to_string(DistortionMethod m) {
    return m == DistortionMethod::definition ? "definition" : "basis";
}

namespace {

inline constexpr double kRankTol = 1e-10;

// Singular values of S U padded with zeros up to k entries.
Vector padded_singular_values(const DenseMatrix& su) {
    const Eigen::Index k = su.cols();
    Vector sigma = Vector::Zero(k);
    if (k == 0 || su.rows() == 0) return sigma;
    const auto res = svd(su);
    sigma.head(res.singular_values.size()) = res.singular_values;
    return sigma;
}

}  // namespace

DistortionResult distortion(const DenseMatrix& a, const DenseMatrix& a_sketched) {
    if (a.cols() != a_sketched.cols()) throw ShapeError("distortion: A and its sketch have different column counts");
    const Eigen::Index d = a.cols();
    if (a.rows() < d) throw RankError("distortion: A has fewer rows than columns");
    const auto qr = thin_qr(a);
    const auto sv = svd(qr.r).singular_values;
    if (d > 0 && !(sv(d - 1) > kRankTol * sv(0))) {
        throw RankError("distortion: A is not of full column rank (sigma_min / sigma_max = " +
                        std::to_string(sv(0) > 0 ? sv(d - 1) / sv(0) : 0.0) + ")");
    }

    const DenseMatrix gram = a.transpose() * a;
    // The singular-value check above already bounds cond(A); the Gram eigenvalue
    // ratio is its square.
    const DenseMatrix whiten = spd_inv_sqrt(gram, kRankTol * kRankTol);
    const DenseMatrix sketched_gram = a_sketched.transpose() * a_sketched;
    DenseMatrix core = whiten * sketched_gram * whiten;
    core = (core + core.transpose()) / 2.0;
    const DenseMatrix deviation = DenseMatrix::Identity(d, d) - core;

    DistortionResult out;
    out.method = DistortionMethod::definition;
    out.eta = spectral_norm(deviation, 1e-14);
    if (d > 0) {
        const auto eig = symmetric_eigen(core);
        out.sigma_max = std::sqrt(std::max(0.0, eig.values(0)));
        out.sigma_min = std::sqrt(std::max(0.0, eig.values(d - 1)));
    }
    return out;
}

DistortionResult distortion_of_sketched_basis(const DenseMatrix& su) {
    const Vector sigma = padded_singular_values(su);
    DistortionResult out;
    out.method = DistortionMethod::basis;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) out.eta = std::max(out.eta, std::abs(1.0 - sigma(i) * sigma(i)));
    if (sigma.size() > 0) {
        out.sigma_max = sigma(0);
        out.sigma_min = sigma(sigma.size() - 1);
    }
    return out;
}

DistortionResult distortion_via_basis(const DenseMatrix& u, const SketchOperator& s) {
    return distortion_of_sketched_basis(sketch_apply(s, u));
}

EmbeddingCheck check_subspace_embedding(const SketchOperator& s, const DenseMatrix& u, double eps) {
    if (!(eps > 0.0)) throw ParameterError("check_subspace_embedding: eps must be > 0");
    EmbeddingCheck out;
    out.eps = eps;
    out.singular_values = padded_singular_values(sketch_apply(s, u));
    for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
        const double sigma = out.singular_values(i);
        if (std::abs(1.0 - sigma * sigma) > eps) out.holds_squared = false;
        if (std::abs(1.0 - sigma) > eps) out.holds_linear = false;
    }
    return out;
}

SketchFactory make_factory(const MethodSpec& spec, Eigen::Index n, Eigen::Index m) {
    return [spec, n, m](const PrngState& rng) { return spec.build(n, m, rng); };
}

std::vector<double> sample_squared_norms(const SketchFactory& factory, const Vector& x, std::size_t trials,
                                         const PrngState& rng) {
    if (trials < 1) throw ParameterError("trials must be >= 1");
    if (std::abs(x.norm() - 1.0) > 1e-10) throw ParameterError("x must be a unit vector");
    std::vector<double> out(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        const auto s = factory(prng_split(rng, t));
        out[t] = sketch_apply(s, x).squaredNorm();
    }
    return out;
}

double jl_moment_estimate(const SketchFactory& factory, const Vector& x, int rho, std::size_t trials,
                          const PrngState& rng) {
    if (rho < 2 || rho % 2 != 0) throw ParameterError("jl_moment_estimate: rho must be a positive even integer");
    const auto norms = sample_squared_norms(factory, x, trials, rng);
    double sum = 0.0;
    for (double y : norms) sum += std::pow(std::abs(y - 1.0), rho);
    return sum / static_cast<double>(trials);
}

double jlt_failure_rate(const SketchFactory& factory, const Vector& x, double eps, std::size_t trials,
                        const PrngState& rng) {
    if (!(eps > 0.0)) throw ParameterError("jlt_failure_rate: eps must be > 0");
    const auto norms = sample_squared_norms(factory, x, trials, rng);
    const auto failures = std::count_if(norms.begin(), norms.end(), [eps](double y) { return std::abs(y - 1.0) > eps; });
    return static_cast<double>(failures) / static_cast<double>(trials);
}

}  // namespace sketchbench
