#include "lrdeblur/kstep.hpp"
#include "lrdeblur/nonblind.hpp"
#include "lrdeblur/synth.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

using namespace lrd;

namespace {

/// Singular values after one generic prox per inner iteration, starting from U I V^T.
Matrix reference_prox_loop(const Matrix& psi, double tau, double delta, int inner) {
    const SvdTriple d = svd(psi);
    Matrix z = d.u * d.v.transpose();
    Matrix k = z;
    for (int t = 0; t < inner; ++t) {
        k = prox_logdet(psi, z, tau, delta);
        z = k;
    }
    return k;
}

GradientPair gradients_of(const Image& x) { return circular_gradients(x); }

}  // namespace

TEST_CASE("logdet cost closed forms") {
    const double d = 0.01;
    CHECK(logdet_cost(Matrix(Matrix::Identity(2, 2)), d) == doctest::Approx(2 * std::log(1 + d)).epsilon(1e-14));
    CHECK(logdet_cost(Matrix(Matrix::Zero(4, 4)), d) == doctest::Approx(4 * std::log(d)).epsilon(1e-14));
    CHECK_THROWS(logdet_cost(Matrix(Matrix::Identity(2, 2)), 0.0));
}

TEST_CASE("logdet ranks noise above the padded truth kernel") {
    const Kernel truth = motion_kernel(23, 1);
    Matrix padded = Matrix::Zero(47, 47);
    padded.block(12, 12, 23, 23) = truth.weights();
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix noise(47, 47);
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = std::abs(nd(rng));
    noise /= noise.sum();
    const double delta = default_config().delta;
    CHECK(logdet_cost(noise, delta) > logdet_cost(padded, delta));
}

TEST_CASE("prox example with diag(1, 0.1)") {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 0.1;
    const Vector s = singular_values(prox_logdet(d, d, 0.05, 0.01));
    CHECK(s(0) == doctest::Approx(1.0 - 0.05 / 1.01).epsilon(1e-14));
    CHECK(s(1) == 0.0);
    CHECK(singular_values(prox_logdet(d, d, 1.0 * 1.01, 0.01)).isZero(1e-15));
    CHECK(oracle::max_abs_diff(prox_logdet(d, d, 1e-14, 0.01), d) < 1e-10);
    CHECK_THROWS(prox_logdet(d, Matrix::Zero(3, 2), 0.1, 0.01));
}

TEST_CASE("prox keeps the singular subspaces of psi") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        const Matrix psi = oracle::random_matrix(7, 7, rng);
        const Matrix z = oracle::random_matrix(7, 7, rng);
        const double tau = 0.3;
        const Matrix out = prox_logdet(psi, z, tau, 0.01);
        const SvdTriple a = svd(psi);
        const Vector expect = shrink_singular_values(a.s, singular_values(z), tau, 0.01);
        // Output equals U diag(expect) V^T with psi's own factors.
        CHECK(oracle::max_abs_diff(out, a.u * expect.asDiagonal() * a.v.transpose()) < 1e-10);
        // Each surviving left singular vector of psi is mapped onto itself.
        for (int i = 0; i < 7; ++i) {
            if (expect(i) <= 0.0) continue;
            const Vector img = out * a.v.col(i);
            CHECK((img - expect(i) * a.u.col(i)).norm() < 1e-8);
        }
    }
}

TEST_CASE("prox lowers the linearized objective whenever it shrinks") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 30; ++t) {
        const Matrix psi = oracle::random_matrix(7, 7, rng);
        const Matrix z = oracle::random_matrix(7, 7, rng);
        const double tau = 0.05 + 0.1 * t, delta = 0.01;
        const Vector s_hat = singular_values(z);
        auto objective = [&](const Matrix& k) {
            const Vector s = singular_values(k);
            double v = (k - psi).squaredNorm() / (2 * tau);
            for (int i = 0; i < s.size(); ++i) v += s(i) / (s_hat(i) + delta);
            return v;
        };
        const Matrix out = prox_logdet(psi, z, tau, delta);
        CHECK(objective(out) < objective(psi));
    }
}

TEST_CASE("project_kernel clips and normalizes") {
    Matrix m(3, 1);
    m << -0.2, 0.4, 0.6;
    const Kernel k = project_kernel(m);
    CHECK(k(0, 0) == 0.0);
    CHECK(k(1, 0) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(k(2, 0) == doctest::Approx(0.6).epsilon(1e-15));

    Matrix e(3, 3);
    e << -0.2, 0.4, 0.0, 0.6, 0.2, 0.0, 0.0, 0.0, 0.0;
    const Kernel p = project_kernel(e);
    CHECK(p(0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(p(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p(1, 1) == doctest::Approx(1.0 / 6).epsilon(1e-14));

    const Kernel mk = motion_kernel(9, 2);
    CHECK(oracle::max_abs_diff(project_kernel(mk.weights()).weights(), mk.weights()) < 1e-15);
    CHECK_THROWS_WITH(project_kernel(Matrix::Constant(3, 3, -1.0)), "kernel annihilated");
}

TEST_CASE("cg matches a dense solve of the normal equations") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const Matrix x = oracle::random_matrix(1, 32, rng);
        const Matrix y = oracle::random_matrix(1, 32, rng);
        const Matrix anchor = oracle::random_matrix(1, 7, rng);
        const double mu = t % 2 ? 0.5 : 0.0;
        const KernelNormalEquations eq({Image(x)}, {Image(y)}, {1, 7}, BoundaryMode::ZeroPad);
        const Matrix A = oracle::kernel_matrix(x, 1, 7, BoundaryMode::ZeroPad);
        const Eigen::MatrixXd N = A.transpose() * A + mu * Eigen::MatrixXd::Identity(7, 7);
        const Eigen::VectorXd b = A.transpose() * Eigen::Map<const Eigen::VectorXd>(y.data(), 32) +
                                  mu * Eigen::Map<const Eigen::VectorXd>(anchor.data(), 7);
        const Eigen::VectorXd direct = N.ldlt().solve(b);
        const Matrix got = cg_solve_psi(eq, anchor, Matrix::Zero(1, 7), mu, 200);
        const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(got.data(), 7);
        CHECK((g - direct).norm() <= 1e-6 * direct.norm());
    }
}

TEST_CASE("cg objective is non-increasing and sums both channels") {
    std::mt19937_64 rng(6);
    const Matrix xh = oracle::random_matrix(16, 16, rng), xv = oracle::random_matrix(16, 16, rng);
    const Matrix yh = oracle::random_matrix(16, 16, rng), yv = oracle::random_matrix(16, 16, rng);
    const KernelNormalEquations eq(GradientPair(Image(xh), Image(xv)), GradientPair(Image(yh), Image(yv)), {5, 5},
                                   BoundaryMode::Circular);
    const Matrix p = oracle::random_matrix(5, 5, rng);
    const KernelOperator oh(Image(xh), {5, 5}, BoundaryMode::Circular), ov(Image(xv), {5, 5}, BoundaryMode::Circular);
    CHECK(oracle::max_abs_diff(eq.normal(p), oh.adjoint(oh.apply(p)) + ov.adjoint(ov.apply(p))) < 1e-10);
    CHECK(oracle::max_abs_diff(eq.rhs(), oh.adjoint(yh) + ov.adjoint(yv)) < 1e-10);

    CgTrace tr;
    const Matrix anchor = Matrix::Constant(5, 5, 0.04);
    cg_solve_psi(eq, anchor, anchor, 0.3, 12, &tr);
    REQUIRE(tr.objective.size() == 13);
    for (std::size_t i = 1; i < tr.objective.size(); ++i) CHECK(tr.objective[i] <= tr.objective[i - 1] * (1 + 1e-12));
}

TEST_CASE("cg limit cases") {
    std::mt19937_64 rng(7);
    const Image x(oracle::random_matrix(20, 20, rng));
    const Kernel k_true = motion_kernel(5, 4);
    const Image y(conv2(x.pixels(), k_true.weights(), BoundaryMode::Circular));
    const GradientPair gx(x, x), gy(y, y);

    const Kernel anchor = Kernel::delta({5, 5});
    const Matrix held = cg_solve_psi(gx, gy, anchor, 1e9, 3, {5, 5});
    CHECK(oracle::max_abs_diff(held, anchor.weights()) < 1e-6);

    const Matrix fit = cg_solve_psi(gx, gy, anchor, 0.0, 100, {5, 5});
    const Matrix resid = conv2(x.pixels(), fit, BoundaryMode::Circular) - y.pixels();
    CHECK(resid.norm() <= 1e-6 * y.pixels().norm());
    CHECK(oracle::max_abs_diff(fit, k_true.weights()) < 1e-8);
    CHECK_THROWS(cg_solve_psi(gx, gy, anchor, -1.0, 3, {5, 5}));
    CHECK_THROWS(cg_solve_psi(gx, gy, anchor, 0.0, 0, {5, 5}));
}

TEST_CASE("update_kernel matches the generic prox loop and returns valid kernels") {
    std::mt19937_64 rng(8);
    const Image x(oracle::random_matrix(24, 24, rng));
    const Kernel k_true = motion_kernel(7, 6);
    Matrix yn = conv2(x.pixels(), k_true.weights(), BoundaryMode::Circular) + 0.01 * oracle::random_matrix(24, 24, rng);
    const GradientPair gx = gradients_of(x), gy = gradients_of(Image(yn));
    const KernelNormalEquations eq(gx, gy, {7, 7}, BoundaryMode::Circular);

    KStepParams p;
    p.tau = 2e-3;
    p.outer_iter_max = 4;
    KStepTrace tr;
    const Kernel out = update_kernel(eq, Kernel::delta({7, 7}), p, &tr);
    CHECK((out.weights().array() >= 0.0).all());
    CHECK(out.weights().sum() == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(tr.psi.size() == 4);
    for (std::size_t j = 0; j < tr.psi.size(); ++j) {
        const Kernel ref = project_kernel(reference_prox_loop(tr.psi[j], p.sigma * p.tau, p.delta, p.inner_iter_max));
        CHECK(oracle::max_abs_diff(ref.weights(), tr.kernels[j].weights()) < 1e-10);
    }
}

TEST_CASE("sigma zero is bare least squares plus projection") {
    std::mt19937_64 rng(9);
    const Image x(oracle::random_matrix(20, 20, rng));
    const Image y(conv2(x.pixels(), motion_kernel(5, 1).weights(), BoundaryMode::Circular));
    const KernelNormalEquations eq(gradients_of(x), gradients_of(y), {5, 5}, BoundaryMode::Circular);
    KStepParams p;
    p.sigma = 0.0;
    p.outer_iter_max = 5;
    const Kernel out = update_kernel(eq, Kernel::delta({5, 5}), p);

    Kernel k = Kernel::delta({5, 5});
    for (int j = 0; j < 5; ++j) {
        const double mu_j = j == 0 ? 0.0 : p.mu * std::exp(static_cast<double>(j - 5));
        k = project_kernel(cg_solve_psi(eq, k.weights(), k.weights(), mu_j, p.cg_iter_max));
    }
    CHECK(out.weights() == k.weights());
}

TEST_CASE("identity data yields a near-delta kernel") {
    std::mt19937_64 rng(10);
    const Image x(oracle::random_matrix(32, 32, rng));
    const GradientPair g = gradients_of(x);
    Matrix init = Matrix::Zero(5, 5);
    init(2, 2) = init(2, 3) = 0.5;
    const Kernel out = update_kernel(g, g, Kernel(init), KStepParams{});
    CHECK((out.weights() - Kernel::delta({5, 5}).weights()).squaredNorm() <= 1e-3);
}
