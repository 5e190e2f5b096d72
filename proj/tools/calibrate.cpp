// Generates the frozen thresholds used by tests/acceptance.cpp. Every run uses the
// calibration master seed below; the acceptance suite draws from other seeds.
//
//   calibrate            # prints every calibrated constant

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "sketchbench/graph.hpp"
#include "sketchbench/linalg.hpp"
#include "sketchbench/metrics.hpp"
#include "sketchbench/pipelines.hpp"
#include "sketchbench/sketch.hpp"

namespace sb = sketchbench;

namespace {

constexpr std::uint64_t kCalibrationSeed = 0xca11b7a7e;

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

void magical_threshold() {
    // n=1000, s=2, k=10, m=110; 20 repetitions of 1000 trials.
    const sb::PrngState master(kCalibrationSeed, 6);
    std::vector<double> rates;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        rates.push_back(sb::estimate_magical_delta(1000, 110, 2, 10, 1000, sb::prng_split(master, rep)));
    }
    const double mean = std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
    std::printf("magical: mean failure rate %.5f, max %.5f over 20 x 1000 trials\n", mean,
                *std::max_element(rates.begin(), rates.end()));
}

void embedding_epsilon() {
    // n=1000, k=5, s=2, m=1000; fixed orthonormal U, 1000 operator draws.
    sb::PrngState urng(kCalibrationSeed, 7);
    const sb::DenseMatrix u = sb::thin_qr(sb::gen_gaussian(1000, 5, urng)).q;
    const sb::PrngState master(kCalibrationSeed, 70);
    for (const Eigen::Index m : {1000, 4000}) {
        std::vector<double> eta;
        for (std::uint64_t t = 0; t < 1000; ++t) {
            const auto s = sb::graph_sketch_new(1000, m, 2, sb::prng_split(master, t + 1000 * m));
            eta.push_back(sb::distortion_of_sketched_basis(sb::sketch_apply(s, u)).eta);
        }
        std::printf("embedding m=%ld: median %.5f, p90 %.5f\n", static_cast<long>(m), quantile(eta, 0.5),
                    quantile(eta, 0.9));
    }
}

void jlt_constant() {
    // k=1, eps=0.5, delta=0.1; x uniform on n=1000 coordinates.
    const Eigen::Index n = 1000;
    const sb::Vector x = sb::Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    for (double c_m : {1.0, 2.0, 3.0, 4.0, 6.0}) {
        const auto p = sb::expander_sketch_params(1, 0.5, 0.1, 1.0, c_m);
        sb::MethodSpec spec;
        spec.s = p.s;
        const double rate = sb::jlt_failure_rate(sb::make_factory(spec, n, p.m), x, 0.5, 20000,
                                                 sb::PrngState(kCalibrationSeed, 8));
        std::printf("jlt c_m=%.1f: s=%ld m=%ld failure rate %.5f\n", c_m, static_cast<long>(p.s),
                    static_cast<long>(p.m), rate);
    }
}

void pipeline_observations() {
    sb::PrngState arng(kCalibrationSeed, 9);
    const sb::DenseMatrix a = sb::gen_gaussian(2000, 10, arng);
    const sb::DenseMatrix x0 = sb::gen_gaussian(10, 1, arng);
    const sb::DenseMatrix b = a * x0 + 0.1 * sb::gen_gaussian(2000, 1, arng);
    std::vector<double> ratios;
    for (std::uint64_t t = 0; t < 100; ++t) {
        const auto op = sb::make_operator(sb::graph_sketch_new(2000, 400, 2, sb::PrngState(kCalibrationSeed, 900 + t)),
                                          sb::PrngState(kCalibrationSeed, 900 + t));
        ratios.push_back(sb::sketch_and_solve_lsq(a, b, op).ratio);
    }
    std::printf("lsq n=2000 d=10 s=2 m=400: median ratio %.4f, p90 %.4f, max %.4f\n", quantile(ratios, 0.5),
                quantile(ratios, 0.9), *std::max_element(ratios.begin(), ratios.end()));

    sb::PrngState lrng(kCalibrationSeed, 10);
    const sb::DenseMatrix lr = sb::gen_low_rank_plus_noise(1024, 100, 10, 0.01, lrng);
    const double optimal = sb::best_rank_k_error(lr, 10);
    for (const Eigen::Index m : {20, 40, 80}) {
        std::vector<double> lr_ratios;
        for (std::uint64_t t = 0; t < 10; ++t) {
            const sb::PrngState st(kCalibrationSeed, 1000 + 100 * static_cast<std::uint64_t>(m) + t);
            const auto op = sb::make_operator(sb::graph_sketch_new(1024, m, 2, st), st);
            lr_ratios.push_back(sb::lowrank_approx(lr, 10, op, optimal).ratio);
        }
        std::printf("lowrank 1024x100 k=10 sigma=0.01 s=2 m=%ld: median ratio %.4f\n", static_cast<long>(m),
                    quantile(lr_ratios, 0.5));
    }
}

// Median distortion of CountSketch (s=1) on the 1024x100 desk fixture for several
// hash degrees, relative to fully random construction.
void gamma_diagnostic() {
    sb::PrngState data(kCalibrationSeed, 11);
    const sb::DenseMatrix u = sb::thin_qr(sb::gen_gaussian(1024, 100, data)).q;
    for (const Eigen::Index m : {200, 800, 1600}) {
        std::printf("countsketch m=%ld median distortion:", static_cast<long>(m));
        for (const std::uint64_t gamma : {0, 2, 3, 4, 8}) {
            std::vector<double> eta;
            for (std::uint64_t t = 0; t < 30; ++t) {
                const sb::PrngState st(kCalibrationSeed, 2000 + 100 * static_cast<std::uint64_t>(m) + t);
                const auto op = sb::make_operator(sb::graph_sketch_new(1024, m, 1, st, sb::Independence{gamma}), st);
                eta.push_back(sb::distortion_via_basis(u, op).eta);
            }
            std::printf(" %s=%.4f", gamma == 0 ? "full" : ("gamma" + std::to_string(gamma)).c_str(), quantile(eta, 0.5));
        }
        std::printf("\n");
    }
}

}  // namespace

int main() {
    magical_threshold();
    embedding_epsilon();
    jlt_constant();
    pipeline_observations();
    gamma_diagnostic();
    return 0;
}
