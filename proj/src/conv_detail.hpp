#pragma once

#include "lrdeblur/convops.hpp"

namespace lrd::detail {

/// Source index for a (possibly out-of-range) coordinate, or -1 for a zero pixel.
inline int map_index(int u, int n, BoundaryMode mode) {
    if (u >= 0 && u < n) return u;
    switch (mode) {
        case BoundaryMode::ZeroPad: return -1;
        case BoundaryMode::Replicate: return u < 0 ? 0 : n - 1;
        case BoundaryMode::Circular: return ((u % n) + n) % n;
    }
    return -1;
}

void check_conv_args(const Matrix& x, const Matrix& k);

/// Sums an extended-domain array (offset by hr, hc) back onto the image grid.
Matrix fold_extended(const Matrix& ext, int rows, int cols, int hr, int hc, BoundaryMode mode);

Matrix kernel_adjoint_direct(const Matrix& x, const Matrix& r, KernelDims dims, BoundaryMode mode);

}  // namespace lrd::detail
