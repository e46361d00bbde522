#include "lrdeblur/fft.hpp"
#include "lrdeblur/linalg.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>

using namespace lrd;

TEST_CASE("svd reconstructs and sorts singular values") {
    std::mt19937_64 rng(1);
    for (auto [r, c] : {std::pair{7, 7}, {10, 6}, {4, 9}, {1, 5}}) {
        const Matrix a = oracle::random_matrix(r, c, rng);
        const SvdTriple t = svd(a);
        CHECK((t.reconstruct() - a).norm() <= 1e-10 * a.norm());
        for (Eigen::Index i = 1; i < t.s.size(); ++i) CHECK(t.s(i - 1) >= t.s(i));
        CHECK((t.u.transpose() * t.u - Matrix::Identity(t.u.cols(), t.u.cols())).norm() < 1e-10);
        CHECK((t.v.transpose() * t.v - Matrix::Identity(t.v.cols(), t.v.cols())).norm() < 1e-10);
    }
}

TEST_CASE("singular values equal square roots of Gram eigenvalues") {
    std::mt19937_64 rng(2);
    const Matrix a = oracle::random_matrix(10, 6, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(a.transpose() * a));
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
    CHECK((singular_values(a) - ev).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pseudo-inverse satisfies the Moore-Penrose conditions") {
    std::mt19937_64 rng(3);
    Matrix a = oracle::random_matrix(8, 5, rng);
    a.col(4) = a.col(0) + a.col(1);  // rank 4
    const Matrix p = pseudo_inverse(a);
    CHECK((a * p * a - a).norm() < 1e-10);
    CHECK((p * a * p - p).norm() < 1e-10);
    CHECK((Matrix(a * p).transpose() - a * p).norm() < 1e-10);
    CHECK((Matrix(p * a).transpose() - p * a).norm() < 1e-10);
    CHECK(numerical_rank(a, 1e-10) == 4);
    CHECK(numerical_rank(Matrix::Zero(3, 3), 1e-10) == 0);
}

TEST_CASE("fft round-trips and embed/gather are adjoint") {
    std::mt19937_64 rng(4);
    for (auto [r, c] : {std::pair{8, 8}, {7, 12}, {1, 5}, {13, 1}}) {
        const Fft2 f(r, c);
        const Matrix x = oracle::random_matrix(r, c, rng);
        CHECK(oracle::max_abs_diff(f.inverse(f.forward(x)), x) < 1e-12);
    }
    const Matrix k = oracle::random_matrix(5, 3, rng);
    const Matrix g = oracle::random_matrix(9, 7, rng);
    const double lhs = oracle::frob_inner(embed_centered(k, 9, 7), g);
    const double rhs = oracle::frob_inner(k, gather_centered(g, {5, 3}));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    const Matrix e = embed_centered(k, 9, 7);
    CHECK(e(0, 0) == k(2, 1));
    CHECK(e(8, 6) == k(1, 0));
}
