#include "lrdeblur/analysis.hpp"
#include "lrdeblur/kstep.hpp"
#include "lrdeblur/synth.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace lrd;

namespace {

// E|x| under exp(-gamma |x|^alpha) on [-1,1], by composite Simpson.
double mean_abs(double gamma, double alpha) {
    const int n = 200000;
    const double h = 1.0 / n;
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = i * h, w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        const double p = std::exp(-gamma * std::pow(x, alpha));
        num += w * x * p;
        den += w * p;
    }
    return num / den;
}

}  // namespace

TEST_CASE("hyper-Laplacian sampler: bounds, symmetry, first absolute moment") {
    HyperLaplacianSampler s;
    s.seed = 5;
    const auto v = sample_hyper_laplacian(100000, s);
    REQUIRE(v.size() == 100000);
    double m = 0.0, a = 0.0;
    for (double x : v) {
        CHECK(std::abs(x) <= 1.0);
        m += x;
        a += std::abs(x);
    }
    m /= v.size();
    a /= v.size();
    CHECK(std::abs(m) < 0.005);
    CHECK(a == doctest::Approx(mean_abs(10.0, 0.5)).epsilon(0.02));
    CHECK(sample_hyper_laplacian(50, s) == sample_hyper_laplacian(50, s));
    s.seed = 6;
    CHECK(sample_hyper_laplacian(50, s) != std::vector<double>(v.begin(), v.begin() + 50));
}

TEST_CASE("singular summary and spearman") {
    Matrix d = Matrix::Zero(3, 4);
    d(0, 0) = 1.0;
    d(1, 1) = 3.0;
    d(2, 2) = 2.0;
    const SingularSummary s = singular_summary(d);
    CHECK(s.s_min == doctest::Approx(1.0));
    CHECK(s.s_max == doctest::Approx(3.0));
    CHECK(s.s_mean == doctest::Approx(2.0));
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 400}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    // Average ranks {1.5, 1.5, 3} against {1, 2, 3}.
    CHECK(spearman({1, 1, 2}, {1, 2, 3}) == doctest::Approx(0.8660254037844386));
}

TEST_CASE("noise amplification stays inside the singular value sandwich") {
    const Vector x = default_signal_row();
    const ExperimentReport r = experiment_noise_amplification(x, {3, 7, 15, 31}, 20, 9);
    CHECK(r.rows() == 4);
    for (std::size_t i = 0; i < r.rows(); ++i) {
        CHECK(r.column("within_bounds")[i] == 1.0);
        CHECK(r.column("min_norm")[i] >= r.column("s_min")[i] - 1e-12);
        CHECK(r.column("max_norm")[i] <= r.column("s_max")[i] + 1e-12);
        CHECK(r.column("s_min_nonzero")[i] <= r.column("s_max")[i]);
    }
    const auto& mean = r.column("mean_norm");
    CHECK(spearman(r.column("L"), mean) >= 0.9);
}

TEST_CASE("gf2 rank") {
    using Rows = std::vector<std::vector<std::uint8_t>>;
    CHECK(gf2_rank(Rows{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}) == 3);
    CHECK(gf2_rank(Rows{{1, 1}, {1, 1}}) == 1);
    // Rows sum to zero mod 2.
    CHECK(gf2_rank(Rows{{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}) == 2);
    CHECK(gf2_rank(Rows{{0, 0}, {0, 0}}) == 0);
}

TEST_CASE("toeplitz rank report") {
    HyperLaplacianSampler s;
    s.seed = 3;
    const ExperimentReport r = experiment_toeplitz_rank(9, 200, s);
    CHECK(r.column("full_rank_fraction")[0] == 1.0);
    const double g = r.column("gf2_full_rank_fraction")[0];
    CHECK(g > 0.35);
    CHECK(g < 0.65);
}

TEST_CASE("perturbed pseudo-inverse report shape") {
    HyperLaplacianSampler s;
    s.seed = 2;
    const ExperimentReport r = experiment_perturbed_pseudoinverse(32, {5, 9, 13}, 5, s, 0.01);
    CHECK(r.rows() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(r.column("s_max_mean")[i] >= r.column("s_min_mean")[i]);
}

TEST_CASE("regularizer costs: closed forms and permutation behaviour") {
    Matrix k(2, 2);
    k << 0.1, 0.4, 0.3, 0.2;
    CHECK(regularizer_cost({Regularizer::L1, 0.0}, k) == doctest::Approx(1.0));
    CHECK(regularizer_cost({Regularizer::L2Squared, 0.0}, k) == doctest::Approx(0.3));
    const double la = std::sqrt(0.1) + std::sqrt(0.4) + std::sqrt(0.3) + std::sqrt(0.2);
    CHECK(regularizer_cost({Regularizer::LAlpha, 0.5}, k) == doctest::Approx(la));
    CHECK(regularizer_cost({Regularizer::LogDet, 1e-3}, k) == doctest::Approx(logdet_cost(k, 1e-3)));

    const Kernel t = motion_kernel(11, 4);
    std::vector<double> vals(t.weights().data(), t.weights().data() + t.weights().size());
    std::mt19937_64 rng(8);
    std::shuffle(vals.begin(), vals.end(), rng);
    const Matrix p = Eigen::Map<const Matrix>(vals.data(), 11, 11);
    for (RegularizerSpec r : {RegularizerSpec{Regularizer::L1, 0.0}, RegularizerSpec{Regularizer::L2Squared, 0.0},
                              RegularizerSpec{Regularizer::LAlpha, 0.5}})
        CHECK(regularizer_cost(r, p) == regularizer_cost(r, t.weights()));
    CHECK(regularizer_cost({Regularizer::LogDet, 1e-3}, p) != regularizer_cost({Regularizer::LogDet, 1e-3}, t.weights()));
}

TEST_CASE("cost ratio is one at zero noise") {
    const ExperimentReport r = cost_ratio_curve(
        motion_kernel(11, 1),
        {{Regularizer::L2Squared, 0.0}, {Regularizer::L1, 0.0}, {Regularizer::LAlpha, 0.5}, {Regularizer::LogDet, 1e-3}},
        {0.0, 0.1}, 5, 4);
    for (const auto& [name, col] : r.columns())
        if (name != "epsilon") CHECK(col[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.column("ratio_l1")[1] == doctest::Approx(1.0).epsilon(1e-12));
    std::mt19937_64 rng(1);
    const Matrix n = positive_noise_kernel(5, 5, rng);
    CHECK(n.minCoeff() >= 0.0);
    CHECK(n.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero padding adds log(delta) per extra singular value") {
    const Kernel t = motion_kernel(11, 2);
    const double delta = 1e-3;
    const ExperimentReport r = logdet_vs_size_curve(t, {11, 15, 23}, 3, delta);
    const double base = logdet_cost(t, delta);
    const auto& padded = r.column("logdet_padded_truth");
    const auto& size = r.column("size");
    for (std::size_t i = 0; i < r.rows(); ++i)
        CHECK(padded[i] == doctest::Approx(base + (size[i] - 11) * std::log(delta)).epsilon(1e-10));
}

TEST_CASE("marginalized kernel sums columns") {
    Matrix m(3, 3);
    m << 0.1, 0.0, 0.2, 0.0, 0.3, 0.1, 0.1, 0.1, 0.1;
    const Vector v = marginalize_kernel(Kernel{m});
    REQUIRE(v.size() == 3);
    CHECK(v(0) == doctest::Approx(0.2));
    CHECK(v(1) == doctest::Approx(0.4));
    CHECK(v(2) == doctest::Approx(0.4));
}

TEST_CASE("1-D blind estimate spreads side-lobe mass as the declared size grows") {
    const Vector k = marginalize_kernel(motion_kernel(23, 0));
    DeblurConfig c = default_config();
    c.lambda = kBlind1DLambda;
    const Blind1DResult r = experiment_1d_blind(default_signal_row(), k, {23, 47, 69}, 30, c);
    const auto& side = r.summary.column("side_lobe_mass");
    REQUIRE(side.size() == 3);
    CHECK(side[0] <= side[1]);
    CHECK(side[1] < side[2]);
    DeblurConfig strong = default_config();
    strong.lambda = 10.0;
    CHECK_THROWS(experiment_1d_blind(default_signal_row(), k, {23}, 5, strong));
}
