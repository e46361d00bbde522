#include "lrdeblur/metrics.hpp"
#include "lrdeblur/pipeline.hpp"
#include "lrdeblur/synth.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace lrd;

TEST_CASE("round to nearest odd") {
    CHECK(round_to_odd(23.0) == 23);
    CHECK(round_to_odd(16.26) == 17);
    CHECK(round_to_odd(11.5) == 11);
    CHECK(round_to_odd(8.13) == 9);
    CHECK(round_to_odd(5.75) == 5);
    CHECK(round_to_odd(4.07) == 5);
    CHECK(round_to_odd(2.87) == 3);
    CHECK(round_to_odd(0.2) == 3);
}

TEST_CASE("pyramid is coarsest first with shrinking kernels") {
    const Image y = synthetic_image(255, 255, 1);
    const double f = 1.0 / std::sqrt(2.0);
    const auto levels = build_pyramid(y, {23, 23}, 7, f);
    REQUIRE(levels.size() == 7);
    const int expect[7] = {3, 5, 5, 9, 11, 17, 23};
    for (int i = 0; i < 7; ++i) {
        const PyramidLevel& l = levels[i];
        CHECK(l.scale_index == 6 - i);
        CHECK(l.kernel_dims == KernelDims{expect[i], expect[i]});
        CHECK(std::abs(l.image.height() - 255 * std::pow(f, l.scale_index)) <= 0.5 + 1e-9);
        CHECK(std::abs(l.image.width() - 255 * std::pow(f, l.scale_index)) <= 0.5 + 1e-9);
    }
    CHECK(levels.back().image.pixels() == y.pixels());
    CHECK_THROWS(build_pyramid(y, {4, 5}, 7, f));
    CHECK_THROWS(build_pyramid(y, {23, 23}, 0, f));
    CHECK_THROWS(build_pyramid(Image(24, 24, 0.5), {23, 23}, 7, f));
}

TEST_CASE("bilinear resize preserves constants and corners") {
    std::mt19937_64 rng(4);
    const Matrix c = Matrix::Constant(9, 13, 0.37);
    CHECK(oracle::max_abs_diff(resize_bilinear(c, 5, 7), Matrix::Constant(5, 7, 0.37)) < 1e-15);
    const Matrix a = oracle::random_matrix(6, 6, rng);
    CHECK(oracle::max_abs_diff(resize_bilinear(a, 6, 6), a) < 1e-15);
}

TEST_CASE("initial kernel is two central taps") {
    const Kernel k = initial_kernel({5, 5});
    CHECK(k(2, 2) == 0.5);
    CHECK(k(2, 3) == 0.5);
    CHECK(k.weights().sum() == 1.0);
    const Kernel big = initial_kernel({23, 23});
    CHECK(big(11, 11) == 0.5);
    CHECK(big(11, 12) == 0.5);
}

TEST_CASE("kernel upsampling scales about the central tap") {
    const Kernel d = Kernel::delta({5, 5});
    CHECK(upsample_kernel(d, {9, 9}, 1.0, 1.0).weights() == Kernel::delta({9, 9}).weights());
    Matrix line = Matrix::Zero(5, 5);
    line(2, 1) = line(2, 2) = line(2, 3) = 1.0 / 3.0;
    const Kernel up = upsample_kernel(Kernel{line}, {9, 9}, 2.0, 2.0);
    // Hand-computed bilinear samples of the 3-tap segment at twice the scale, then normalized.
    const double row4[9] = {0, 1.0 / 24, 1.0 / 12, 1.0 / 12, 1.0 / 12, 1.0 / 12, 1.0 / 12, 1.0 / 24, 0};
    for (int j = 0; j < 9; ++j) {
        CHECK(up(4, j) == doctest::Approx(row4[j]));
        CHECK(up(3, j) == doctest::Approx(row4[j] / 2));
        CHECK(up(5, j) == doctest::Approx(row4[j] / 2));
    }
    CHECK(up.weights().topRows(3).sum() == 0.0);
    CHECK(up.weights().bottomRows(3).sum() == 0.0);
    CHECK_THROWS(upsample_kernel(d, {4, 5}, 2.0, 2.0));
}

TEST_CASE("threshold kernel examples") {
    // Max 0.2, so the cut is at 0.01.
    Matrix m = Matrix::Constant(5, 5, 0.78 / 22.0);
    m(2, 2) = 0.2;
    m(0, 0) = 0.009;
    m(4, 4) = 0.011;
    const Kernel k{m};
    const Kernel t = threshold_kernel(k, 0.05);
    CHECK(t(0, 0) == 0.0);
    CHECK(t(4, 4) == doctest::Approx(0.011 / 0.991));
    CHECK(t(2, 2) == doctest::Approx(0.2 / 0.991));
    CHECK(t.weights().sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(threshold_kernel(k, 0.0).weights() == k.weights());
    Matrix two = Matrix::Zero(1, 3);
    two(0, 0) = 0.9;
    two(0, 1) = 0.1;
    CHECK(threshold_kernel(Kernel{two}, 0.05).weights() == two);
    CHECK_THROWS(threshold_kernel(k, 1.0));
}

TEST_CASE("recentering moves the centroid to the central tap") {
    Matrix m = Matrix::Zero(7, 7);
    m(0, 0) = 0.5;
    m(1, 1) = 0.5;
    const Kernel r = recenter_kernel(Kernel{m});
    double cr = 0.0, cc = 0.0;
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) {
            cr += i * r(i, j);
            cc += j * r(i, j);
        }
    CHECK(std::abs(cr - 3.0) <= 0.5);
    CHECK(std::abs(cc - 3.0) <= 0.5);
    CHECK(r.weights().sum() == doctest::Approx(1.0));
    CHECK(recenter_kernel(Kernel::delta({5, 5})).weights() == Kernel::delta({5, 5}).weights());
}

TEST_CASE("blind gradients clear the border band") {
    const Image y = synthetic_image(30, 30, 2);
    const GradientPair g = blind_gradients(y, {5, 5});
    const int band = 3;
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j) {
            const bool edge = i < band || j < band || i >= 30 - band || j >= 30 - band;
            if (edge) {
                CHECK(g.horiz(i, j) == 0.0);
                CHECK(g.vert(i, j) == 0.0);
            } else {
                CHECK(g.horiz(i, j) == y(i, j + 1) - y(i, j));
                CHECK(g.vert(i, j) == y(i + 1, j) - y(i, j));
            }
        }
}

TEST_CASE("one pyramid level equals the single-scale run and runs are deterministic") {
    const BlurredPair p = make_blurred_pair(48, 48, motion_kernel(7, 2), 0.005, 6);
    DeblurConfig c = default_config();
    c.kernel_size = {7, 7};
    c.iter_max = 4;
    c.pyramid_levels = 1;
    const DeblurResult a = deblur_blind(p.blurry, c);
    const DeblurResult b = deblur_single_scale(p.blurry, c);
    CHECK(a.kernel.weights() == b.kernel.weights());
    CHECK(a.image.pixels() == b.image.pixels());
    c.pyramid_levels = 3;
    const DeblurResult m1 = deblur_blind(p.blurry, c), m2 = deblur_blind(p.blurry, c);
    CHECK(m1.kernel.weights() == m2.kernel.weights());
    CHECK(m1.image.pixels() == m2.image.pixels());
    CHECK(m1.objective_trace == m2.objective_trace);
    REQUIRE(m1.per_level_kernels.size() == 3);
    for (const Kernel& k : m1.per_level_kernels) {
        CHECK(k.weights().minCoeff() >= 0.0);
        CHECK(k.weights().sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("invalid configs are rejected before any work") {
    DeblurConfig c = default_config();
    c.kernel_size = {4, 4};
    CHECK_THROWS(deblur_blind(Image(32, 32, 0.5), c));
    c = default_config();
    c.tau = 0.0;
    CHECK_THROWS(deblur_single_scale(Image(32, 32, 0.5), c));
}

TEST_CASE("64x64 blind deblur at the truth size succeeds on a typical instance") {
    std::vector<double> errs;
    for (std::uint64_t ks = 1; ks <= 3; ++ks)
        for (std::uint64_t im = 20; im < 24; ++im) {
            const Kernel k = motion_kernel(9, ks);
            const BlurredPair p = make_blurred_pair(64, 64, k, 0.005, im);
            DeblurConfig c = default_config();
            c.kernel_size = {9, 9};
            const DeblurResult r = deblur_blind(p.blurry, c);
            errs.push_back(error_ratio(r.image, p.sharp, p.blurry, k, hq_params(c)));
        }
    std::vector<double> sorted = errs;
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[5] + sorted[6]);
    MESSAGE("median err ", median, ", success rate ", success_rate(errs));
    CHECK(median <= 3.0);
    CHECK(success_rate(errs) >= 0.5);
}
