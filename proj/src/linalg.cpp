#include "lrdeblur/linalg.hpp"

#include <Eigen/SVD>

#include <stdexcept>

namespace lrd {

namespace {

void require_finite(const Matrix& a) {
    if (!a.allFinite()) throw std::invalid_argument("matrix contains non-finite values");
}

}  // namespace

Matrix SvdTriple::reconstruct() const { return u * s.asDiagonal() * v.transpose(); }

SvdTriple svd(const Matrix& a) {
    require_finite(a);
    Eigen::BDCSVD<Eigen::MatrixXd> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

Vector singular_values(const Matrix& a) {
    require_finite(a);
    Eigen::BDCSVD<Eigen::MatrixXd> dec(a);
    return dec.singularValues();
}

Matrix pseudo_inverse(const Matrix& a, double rel_tol) {
    const SvdTriple d = svd(a);
    const double cutoff = d.s.size() > 0 ? rel_tol * d.s(0) : 0.0;
    Vector inv = Vector::Zero(d.s.size());
    for (Eigen::Index i = 0; i < d.s.size(); ++i)
        if (d.s(i) > cutoff) inv(i) = 1.0 / d.s(i);
    return d.v * inv.asDiagonal() * d.u.transpose();
}

int numerical_rank(const Matrix& a, double rel_tol) {
    const Vector s = singular_values(a);
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0)) ++r;
    return r;
}

double inner(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("inner: shape mismatch");
    return a.cwiseProduct(b).sum();
}

}  // namespace lrd
