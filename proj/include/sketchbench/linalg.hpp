#pragma once

// Dense factorization kernels: Householder thin QR, one-sided Jacobi SVD,
// cyclic Jacobi symmetric eigensolver, and what the diagnostics build on them.
// Templated on the Eigen scalar; the library instantiates them with double.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sketchbench/errors.hpp"
#include "sketchbench/matrix.hpp"
#include "sketchbench/random.hpp"

namespace sketchbench {

inline constexpr int kJacobiMaxSweeps = 60;
inline constexpr int kPowerMaxIterations = 10000;
inline constexpr Eigen::Index kSpectralSvdCutoff = 64;

template <typename Scalar>
struct QrResult {
    Dense<Scalar> q;  // n x d, orthonormal columns
    Dense<Scalar> r;  // d x d, upper triangular, nonnegative diagonal
};

template <typename Scalar>
struct SvdResult {
    Dense<Scalar> u;
    Column<Scalar> singular_values;  // descending, >= 0
    Dense<Scalar> v;

    Eigen::Index rank_bound() const { return singular_values.size(); }
};

template <typename Scalar>
struct SymmetricEigenResult {
    Column<Scalar> values;  // descending
    Dense<Scalar> vectors;  // orthonormal columns matching `values`
};

/// Householder thin QR of an n x d matrix with n >= d. Rank deficiency is allowed;
/// the corresponding R diagonal entries are then zero (up to rounding) and Q keeps
/// orthonormal columns.
template <typename Derived>
QrResult<typename Derived::Scalar> thin_qr(const Eigen::MatrixBase<Derived>& a_in) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = a_in.rows();
    const Eigen::Index d = a_in.cols();
    if (n < d) throw ParameterError("thin_qr: requires rows >= cols, got " + std::to_string(n) + "x" + std::to_string(d));

    Dense<Scalar> work = a_in;
    Dense<Scalar> reflectors = Dense<Scalar>::Zero(n, d);
    std::vector<bool> active(static_cast<std::size_t>(d), false);

    for (Eigen::Index j = 0; j < d; ++j) {
        const Eigen::Index len = n - j;
        auto x = work.col(j).tail(len);
        const Scalar norm_x = x.norm();
        if (norm_x == Scalar(0)) continue;
        const Scalar alpha = x(0) >= Scalar(0) ? -norm_x : norm_x;
        Column<Scalar> v = x;
        v(0) -= alpha;
        const Scalar norm_v = v.norm();
        if (norm_v == Scalar(0)) continue;
        v /= norm_v;
        auto trailing = work.bottomRightCorner(len, d - j);
        trailing.noalias() -= (Scalar(2) * v) * (v.transpose() * trailing);
        reflectors.col(j).tail(len) = v;
        active[static_cast<std::size_t>(j)] = true;
    }

    QrResult<Scalar> out;
    out.r = work.topRows(d).template triangularView<Eigen::Upper>();
    out.q = Dense<Scalar>::Identity(n, d);
    for (Eigen::Index j = d - 1; j >= 0; --j) {
        if (!active[static_cast<std::size_t>(j)]) continue;
        const Eigen::Index len = n - j;
        const auto v = reflectors.col(j).tail(len);
        auto block = out.q.bottomRows(len);
        block.noalias() -= (Scalar(2) * v) * (v.transpose() * block);
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        if (out.r(j, j) < Scalar(0)) {
            out.r.row(j) *= Scalar(-1);
            out.q.col(j) *= Scalar(-1);
        }
    }
    return out;
}

namespace detail {

/// Extends the orthonormal columns [0, filled) of `u` to a full orthonormal set by
/// Gram-Schmidt on the coordinate vectors.
template <typename Scalar>
void complete_orthonormal(Dense<Scalar>& u, Eigen::Index filled) {
    const Eigen::Index n = u.rows();
    for (Eigen::Index j = filled; j < u.cols(); ++j) {
        Column<Scalar> best;
        Scalar best_norm = Scalar(-1);
        for (Eigen::Index e = 0; e < n; ++e) {
            Column<Scalar> c = Column<Scalar>::Unit(n, e);
            for (int pass = 0; pass < 2; ++pass) c -= u.leftCols(j) * (u.leftCols(j).transpose() * c);
            const Scalar nc = c.norm();
            if (nc > best_norm) {
                best_norm = nc;
                best = c;
            }
            if (best_norm > Scalar(0.5)) break;
        }
        u.col(j) = best / best_norm;
    }
}

/// One-sided (Hestenes) Jacobi on a matrix with rows >= cols. On return the columns
/// of `w` are mutually orthogonal and `v` holds the accumulated rotations.
template <typename Scalar>
void hestenes_jacobi(Dense<Scalar>& w, Dense<Scalar>& v) {
    const Eigen::Index d = w.cols();
    v = Dense<Scalar>::Identity(d, d);
    const Scalar tol = std::numeric_limits<Scalar>::epsilon() * Scalar(std::max<Eigen::Index>(w.rows(), 1));
    Scalar worst = Scalar(0);
    for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
        bool rotated = false;
        worst = Scalar(0);
        for (Eigen::Index p = 0; p + 1 < d; ++p) {
            for (Eigen::Index q = p + 1; q < d; ++q) {
                const Scalar a = w.col(p).squaredNorm();
                const Scalar b = w.col(q).squaredNorm();
                const Scalar c = w.col(p).dot(w.col(q));
                if (c == Scalar(0)) continue;
                const Scalar scale = std::sqrt(a * b);
                const Scalar rel = std::abs(c) / scale;
                worst = std::max(worst, rel);
                if (rel <= tol) continue;
                rotated = true;
                const Scalar zeta = (b - a) / (Scalar(2) * c);
                const Scalar t = (zeta >= Scalar(0) ? Scalar(1) : Scalar(-1)) /
                                 (std::abs(zeta) + std::sqrt(Scalar(1) + zeta * zeta));
                const Scalar cs = Scalar(1) / std::sqrt(Scalar(1) + t * t);
                const Scalar sn = cs * t;
                const Column<Scalar> wp = w.col(p);
                w.col(p) = cs * wp - sn * w.col(q);
                w.col(q) = sn * wp + cs * w.col(q);
                const Column<Scalar> vp = v.col(p);
                v.col(p) = cs * vp - sn * v.col(q);
                v.col(q) = sn * vp + cs * v.col(q);
            }
        }
        if (!rotated) return;
    }
    throw NumericalError("svd: one-sided Jacobi did not converge in " + std::to_string(kJacobiMaxSweeps) +
                         " sweeps; largest relative off-diagonal residual " + std::to_string(worst));
}

template <typename Scalar>
SvdResult<Scalar> svd_tall(const Dense<Scalar>& a) {
    const Eigen::Index n = a.rows();
    const Eigen::Index d = a.cols();
    SvdResult<Scalar> out;
    Dense<Scalar> w;
    Dense<Scalar> q;
    const bool preconditioned = n > d;
    if (preconditioned) {
        auto qr = thin_qr(a);
        q = std::move(qr.q);
        w = std::move(qr.r);
    } else {
        w = a;
    }
    Dense<Scalar> v;
    hestenes_jacobi(w, v);

    Column<Scalar> sigma(d);
    for (Eigen::Index j = 0; j < d; ++j) sigma(j) = w.col(j).norm();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return sigma(x) > sigma(y); });

    const Scalar sigma_max = d > 0 ? sigma(order.front()) : Scalar(0);
    const Scalar negligible = sigma_max * std::numeric_limits<Scalar>::epsilon() * Scalar(std::max<Eigen::Index>(n, 1));
    Dense<Scalar> u_small = Dense<Scalar>::Zero(w.rows(), d);
    out.v.resize(d, d);
    out.singular_values.resize(d);
    Eigen::Index filled = 0;
    for (Eigen::Index j = 0; j < d; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(j)];
        out.singular_values(j) = sigma(src);
        out.v.col(j) = v.col(src);
        if (sigma(src) > negligible && sigma(src) > Scalar(0) && filled == j) {
            u_small.col(j) = w.col(src) / sigma(src);
            ++filled;
        }
    }
    complete_orthonormal(u_small, filled);
    out.u = preconditioned ? Dense<Scalar>(q * u_small) : u_small;

    for (Eigen::Index j = 0; j < d; ++j) {
        Eigen::Index arg = 0;
        out.u.col(j).cwiseAbs().maxCoeff(&arg);
        if (out.u(arg, j) < Scalar(0)) {
            out.u.col(j) *= Scalar(-1);
            out.v.col(j) *= Scalar(-1);
        }
    }
    return out;
}

}  // namespace detail

/// Thin SVD with r = min(n, d) triples, singular values descending. Columns of U
/// are sign-fixed so each column's largest-magnitude entry is positive. Throws
/// NumericalError if Jacobi fails to converge within kJacobiMaxSweeps sweeps.
template <typename Derived>
SvdResult<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    if (a.rows() >= a.cols()) return detail::svd_tall<Scalar>(a);
    // Wide input: factor the transpose and swap the singular vectors.
    auto t = detail::svd_tall<Scalar>(Dense<Scalar>(a.transpose()));
    SvdResult<Scalar> out{std::move(t.v), std::move(t.singular_values), std::move(t.u)};
    for (Eigen::Index j = 0; j < out.u.cols(); ++j) {
        Eigen::Index arg = 0;
        out.u.col(j).cwiseAbs().maxCoeff(&arg);
        if (out.u(arg, j) < Scalar(0)) {
            out.u.col(j) *= Scalar(-1);
            out.v.col(j) *= Scalar(-1);
        }
    }
    return out;
}

template <typename Scalar>
SvdResult<Scalar> truncate_svd(const SvdResult<Scalar>& res, Eigen::Index k) {
    if (k < 1 || k > res.singular_values.size()) {
        throw ParameterError("truncate_svd: k = " + std::to_string(k) + " outside [1, " +
                             std::to_string(res.singular_values.size()) + "]");
    }
    return {res.u.leftCols(k), res.singular_values.head(k), res.v.leftCols(k)};
}

/// Cyclic Jacobi eigensolver for a symmetric matrix (only symmetric input is
/// meaningful; the strict upper triangle drives the rotations).
template <typename Derived>
SymmetricEigenResult<typename Derived::Scalar> symmetric_eigen(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index d = m.rows();
    if (m.cols() != d) throw ShapeError("symmetric_eigen: matrix must be square");
    Dense<Scalar> a = (m + m.transpose()) / Scalar(2);
    Dense<Scalar> v = Dense<Scalar>::Identity(d, d);
    const Scalar total = a.norm();
    const Scalar tol = Scalar(4) * std::numeric_limits<Scalar>::epsilon() * total;

    auto off_norm = [&]() {
        Scalar s = Scalar(0);
        for (Eigen::Index q = 1; q < d; ++q) s += a.col(q).head(q).squaredNorm();
        return std::sqrt(Scalar(2) * s);
    };

    bool converged = d <= 1 || total == Scalar(0);
    for (int sweep = 0; sweep < kJacobiMaxSweeps && !converged; ++sweep) {
        for (Eigen::Index p = 0; p + 1 < d; ++p) {
            for (Eigen::Index q = p + 1; q < d; ++q) {
                const Scalar apq = a(p, q);
                if (std::abs(apq) <= tol * std::numeric_limits<Scalar>::epsilon()) continue;
                const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
                const Scalar t = (theta >= Scalar(0) ? Scalar(1) : Scalar(-1)) /
                                 (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
                const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
                const Scalar s = t * c;
                const Column<Scalar> ap = a.col(p);
                a.col(p) = c * ap - s * a.col(q);
                a.col(q) = s * ap + c * a.col(q);
                const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> rp = a.row(p);
                a.row(p) = c * rp - s * a.row(q);
                a.row(q) = s * rp + c * a.row(q);
                a(p, q) = a(q, p) = Scalar(0);
                const Column<Scalar> vp = v.col(p);
                v.col(p) = c * vp - s * v.col(q);
                v.col(q) = s * vp + c * v.col(q);
            }
        }
        converged = off_norm() <= tol;
    }
    if (!converged) {
        throw NumericalError("symmetric_eigen: Jacobi did not converge in " + std::to_string(kJacobiMaxSweeps) +
                             " sweeps; off-diagonal norm " + std::to_string(off_norm()));
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });
    SymmetricEigenResult<Scalar> out{Column<Scalar>(d), Dense<Scalar>(d, d)};
    for (Eigen::Index j = 0; j < d; ++j) {
        out.values(j) = a(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(j)]);
        out.vectors.col(j) = v.col(order[static_cast<std::size_t>(j)]);
    }
    return out;
}

/// Largest singular value. Below kSpectralSvdCutoff in both dimensions the full SVD
/// is used; otherwise power iteration on A^T A from a fixed-seed Gaussian start,
/// stopping when the estimate changes by at most tol (relative) or after
/// kPowerMaxIterations steps.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& a, typename Derived::Scalar tol = 1e-12) {
    using Scalar = typename Derived::Scalar;
    if (!(tol > Scalar(0))) throw ParameterError("spectral_norm: tol must be > 0");
    if (a.size() == 0) return Scalar(0);
    if (a.rows() < kSpectralSvdCutoff && a.cols() < kSpectralSvdCutoff) return svd(a).singular_values(0);

    PrngState rng(0x5eedULL, 0x5bec7a1ULL);
    Column<Scalar> v(a.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Scalar(rng.next_normal());
    v.normalize();
    // sqrt(||A^T A v||) for unit v is a lower bound on sigma_1 that converges to it.
    Scalar estimate = Scalar(0);
    for (int it = 0; it < kPowerMaxIterations; ++it) {
        const Column<Scalar> z = a.transpose() * (a * v);
        const Scalar nz = z.norm();
        if (nz == Scalar(0)) return Scalar(0);
        const Scalar next = std::sqrt(nz);
        v = z / nz;
        if (std::abs(next - estimate) <= tol * next) return next;
        estimate = next;
    }
    return estimate;
}

/// Symmetric W with W M W = I for symmetric positive definite M. Throws RankError
/// when the smallest eigenvalue is at most rank_tol times the largest.
template <typename Derived>
Dense<typename Derived::Scalar> spd_inv_sqrt(const Eigen::MatrixBase<Derived>& m,
                                             typename Derived::Scalar rank_tol = 1e-10) {
    using Scalar = typename Derived::Scalar;
    if (m.rows() != m.cols()) throw ShapeError("spd_inv_sqrt: matrix must be square");
    if ((m - m.transpose()).norm() > Scalar(1e-10) * m.norm()) {
        throw ParameterError("spd_inv_sqrt: matrix is not symmetric");
    }
    const auto eig = symmetric_eigen(m);
    const Eigen::Index d = m.rows();
    if (d == 0) return Dense<Scalar>(0, 0);
    const Scalar top = eig.values(0);
    const Scalar bottom = eig.values(d - 1);
    if (!(top > Scalar(0)) || !(bottom > rank_tol * top)) {
        throw RankError("spd_inv_sqrt: smallest eigenvalue " + std::to_string(bottom) + " is not above " +
                        std::to_string(rank_tol) + " x largest " + std::to_string(top));
    }
    const Column<Scalar> scale = eig.values.cwiseSqrt().cwiseInverse();
    Dense<Scalar> w = eig.vectors * scale.asDiagonal() * eig.vectors.transpose();
    return (w + w.transpose()) / Scalar(2);
}

/// min_x ||A x - b||_2 through Householder QR. Throws RankError if A is not of full
/// column rank (smallest |R_ii| at most 1e-10 times the largest).
template <typename DerivedA, typename DerivedB>
Dense<typename DerivedA::Scalar> lstsq_exact(const Eigen::MatrixBase<DerivedA>& a,
                                             const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    if (a.rows() != b.rows()) throw ShapeError("lstsq_exact: A and b row counts differ");
    if (a.rows() < a.cols()) throw RankError("lstsq_exact: underdetermined system has no unique solution");
    const auto qr = thin_qr(a);
    const Column<Scalar> diag = qr.r.diagonal().cwiseAbs();
    if (diag.size() > 0 && !(diag.minCoeff() > Scalar(1e-10) * diag.maxCoeff())) {
        throw RankError("lstsq_exact: matrix is rank deficient");
    }
    const Dense<Scalar> rhs = qr.q.transpose() * b;
    return qr.r.template triangularView<Eigen::Upper>().solve(rhs);
}

}  // namespace sketchbench
