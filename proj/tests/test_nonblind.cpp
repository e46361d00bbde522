#include "lrdeblur/convops.hpp"
#include "lrdeblur/metrics.hpp"
#include "lrdeblur/nonblind.hpp"
#include "lrdeblur/synth.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace lrd;

namespace {

double w_cost(double w, double v, double beta, double alpha) {
    return std::pow(std::abs(w), alpha) + 0.5 * beta * (w - v) * (w - v);
}

Matrix shift_cols(const Matrix& a, int d) {
    Matrix out(a.rows(), a.cols());
    const int W = static_cast<int>(a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < W; ++j) out(i, j) = a(i, ((j + d) % W + W) % W);
    return out;
}

Matrix shift_rows(const Matrix& a, int d) {
    Matrix out(a.rows(), a.cols());
    const int H = static_cast<int>(a.rows());
    for (int i = 0; i < H; ++i) out.row(i) = a.row(((i + d) % H + H) % H);
    return out;
}

}  // namespace

TEST_CASE("default schedule") {
    const HQParams p = default_hq_params();
    CHECK(p.alpha == doctest::Approx(2.0 / 3.0));
    CHECK(p.lambda_nb == 2000.0);
    REQUIRE(!p.beta_schedule.empty());
    CHECK(p.beta_schedule.front() == 1.0);
    CHECK(p.beta_schedule.back() < 256.0);
    CHECK(p.beta_schedule.back() * 2.0 * std::sqrt(2.0) >= 256.0);
    for (std::size_t i = 1; i < p.beta_schedule.size(); ++i)
        CHECK(p.beta_schedule[i] == doctest::Approx(p.beta_schedule[i - 1] * 2.0 * std::sqrt(2.0)));
}

TEST_CASE("closed-form w matches a grid search") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uv(-2.0, 2.0), ub(0.0, 8.0);
    for (double alpha : {0.5, 2.0 / 3.0}) {
        for (int t = 0; t < 1000; ++t) {
            const double v = uv(rng), beta = std::exp2(ub(rng));
            double best = w_cost(0.0, v, beta, alpha);
            for (int g = -20000; g <= 20000; ++g) best = std::min(best, w_cost(g * 1e-4, v, beta, alpha));
            const double w = solve_w(v, beta, alpha);
            CHECK(w_cost(w, v, beta, alpha) <= best + 1e-6);
            CHECK(std::abs(w) <= std::abs(v) + 1e-12);
        }
    }
}

TEST_CASE("w is odd in v and zero at zero") {
    for (double alpha : {0.5, 2.0 / 3.0}) {
        CHECK(solve_w(0.0, 4.0, alpha) == 0.0);
        for (double v : {0.05, 0.3, 1.1, 1.9}) CHECK(solve_w(-v, 8.0, alpha) == -solve_w(v, 8.0, alpha));
    }
    CHECK_THROWS(solve_w(1.0, 0.0, 0.5));
    CHECK_THROWS(solve_w(1.0, 1.0, 0.8));
    Matrix v(1, 3);
    v << -1.0, 0.0, 0.7;
    const Matrix w = solve_w_subproblem(v, 2.0, 0.5);
    for (int j = 0; j < 3; ++j) CHECK(w(0, j) == solve_w(v(0, j), 2.0, 0.5));
}

TEST_CASE("circular gradients are periodic forward differences") {
    Matrix a(2, 3);
    a << 1, 2, 4, 0, 5, 5;
    const GradientPair g = circular_gradients(Image(a));
    Matrix h(2, 3), v(2, 3);
    h << 1, 2, -3, 5, 0, -5;
    v << -1, 3, 1, 1, -3, -1;
    CHECK(g.horiz.pixels() == h);
    CHECK(g.vert.pixels() == v);
}

TEST_CASE("x subproblem solution zeroes the gradient of its objective") {
    std::mt19937_64 rng(5);
    const int H = 20, W = 17;
    const Kernel k = motion_kernel(5, 2);
    const Matrix y = oracle::random_matrix(H, W, rng);
    const Matrix wh = oracle::random_matrix(H, W, rng), wv = oracle::random_matrix(H, W, rng);
    const double lambda = 2000.0, beta = 5.6;
    const Matrix x = solve_x_subproblem(y, k, wh, wv, lambda, beta);
    const Matrix r = conv2(x, k.weights(), BoundaryMode::Circular) - y;
    const Matrix gh = (shift_cols(x, 1) - x) - wh;
    const Matrix gv = (shift_rows(x, 1) - x) - wv;
    const Matrix grad = lambda * conv2_adjoint(r, k.weights(), BoundaryMode::Circular) +
                        beta * ((shift_cols(gh, -1) - gh) + (shift_rows(gv, -1) - gv));
    CHECK(grad.norm() <= 1e-8 * (lambda * y.norm()));
}

TEST_CASE("delta kernel with a heavy data weight returns the input") {
    const BlurredPair p = make_blurred_pair(32, 32, Kernel::delta({1, 1}), 0.0, 3);
    HQParams hp = default_hq_params();
    hp.lambda_nb = 1e7;
    const Image x = deconv_hyper_laplacian(p.blurry, Kernel::delta({3, 3}), hp);
    CHECK(oracle::max_abs_diff(x.pixels(), p.blurry.pixels()) < 1e-3);
}

TEST_CASE("known-kernel deconvolution improves on the blurry input") {
    for (const Kernel& k : {gaussian_kernel(9, 1.5), motion_kernel(11, 4)}) {
        const BlurredPair p = make_blurred_pair(64, 64, k, 0.002, 3);
        std::vector<double> trace;
        const Image x = deconv_hyper_laplacian(p.blurry, k, default_hq_params(), &trace);
        CHECK(psnr(x, p.sharp) > psnr(p.blurry, p.sharp));
        const int b = k.rows() / 2;
        CHECK(ssd_interior(x, p.sharp, b) < 0.6 * ssd_interior(p.blurry, p.sharp, b));
        REQUIRE(trace.size() == default_hq_params().beta_schedule.size() + 1);
        CHECK(trace.back() < trace.front());
        for (double v : x.data()) CHECK(std::isfinite(v));
    }
}

TEST_CASE("edge taper keeps the interior and smooths the border toward a periodic image") {
    const BlurredPair p = make_blurred_pair(48, 48, Kernel::delta({1, 1}), 0.0, 9);
    const Kernel k = gaussian_kernel(7, 1.0);
    const Image t = edge_taper(p.blurry, k);
    CHECK(std::abs(t(24, 24) - p.blurry(24, 24)) < 1e-12);
    double jump_before = 0.0, jump_after = 0.0;
    for (int i = 0; i < 48; ++i) {
        jump_before += std::abs(p.blurry(i, 0) - p.blurry(i, 47));
        jump_after += std::abs(t(i, 0) - t(i, 47));
    }
    CHECK(jump_after < jump_before);
}

TEST_CASE("nonblind parameter validation") {
    const Image y(16, 16, 0.5);
    HQParams hp = default_hq_params();
    hp.beta_schedule = {4.0, 2.0};
    CHECK_THROWS(deconv_hyper_laplacian(y, Kernel::delta({3, 3}), hp));
    hp = default_hq_params();
    hp.lambda_nb = 0.0;
    CHECK_THROWS(deconv_hyper_laplacian(y, Kernel::delta({3, 3}), hp));
    CHECK_THROWS(deconv_hyper_laplacian(Image(3, 3, 0.5), Kernel::delta({5, 5}), default_hq_params()));
}
