#pragma once

#include "lrdeblur/types.hpp"

namespace lrd {

/// Thin SVD, singular values non-increasing.
struct SvdTriple {
    Matrix u;
    Vector s;
    Matrix v;

    Matrix reconstruct() const;
};

SvdTriple svd(const Matrix& a);
Vector singular_values(const Matrix& a);

/// Relative cutoff under which singular values count as zero in pseudo-inverses.
inline constexpr double kPinvRelTol = 1e-12;

/// Moore-Penrose pseudo-inverse via SVD.
Matrix pseudo_inverse(const Matrix& a, double rel_tol = kPinvRelTol);

/// Count of singular values above rel_tol * s_max.
int numerical_rank(const Matrix& a, double rel_tol);

double inner(const Matrix& a, const Matrix& b);

}  // namespace lrd
