#include "lrdeblur/serial.hpp"

#include "conv_detail.hpp"
#include "lrdeblur/nonblind.hpp"
#include "lrdeblur/xstep.hpp"

namespace lrd::serial {

using detail::map_index;

Matrix conv2_direct(const Matrix& x, const Matrix& k, BoundaryMode mode) {
    detail::check_conv_args(x, k);
    const int H = static_cast<int>(x.rows()), W = static_cast<int>(x.cols());
    const int L = static_cast<int>(k.rows()), K = static_cast<int>(k.cols());
    const int hr = (L - 1) / 2, hc = (K - 1) / 2;
    Matrix y = Matrix::Zero(H, W);
    for (int i = 0; i < H; ++i)
        for (int j = 0; j < W; ++j)
            for (int a = 0; a < L; ++a) {
                const int u = map_index(i + hr - a, H, mode);
                if (u < 0) continue;
                for (int b = 0; b < K; ++b) {
                    const int v = map_index(j + hc - b, W, mode);
                    if (v >= 0) y(i, j) += k(a, b) * x(u, v);
                }
            }
    return y;
}

Matrix conv2_adjoint_direct(const Matrix& r, const Matrix& k, BoundaryMode mode) {
    detail::check_conv_args(r, k);
    const int H = static_cast<int>(r.rows()), W = static_cast<int>(r.cols());
    const int L = static_cast<int>(k.rows()), K = static_cast<int>(k.cols());
    const int hr = (L - 1) / 2, hc = (K - 1) / 2;
    // Scatter form: each output sample pushes its weight back to every source pixel.
    Matrix g = Matrix::Zero(H, W);
    for (int i = 0; i < H; ++i)
        for (int j = 0; j < W; ++j)
            for (int a = 0; a < L; ++a) {
                const int u = map_index(i + hr - a, H, mode);
                if (u < 0) continue;
                for (int b = 0; b < K; ++b) {
                    const int v = map_index(j + hc - b, W, mode);
                    if (v >= 0) g(u, v) += k(a, b) * r(i, j);
                }
            }
    return g;
}

Matrix kernel_adjoint_direct(const Matrix& x, const Matrix& r, KernelDims dims, BoundaryMode mode) {
    const int H = static_cast<int>(x.rows()), W = static_cast<int>(x.cols());
    const int hr = dims.half_rows(), hc = dims.half_cols();
    Matrix g = Matrix::Zero(dims.rows, dims.cols);
    for (int i = 0; i < H; ++i)
        for (int j = 0; j < W; ++j)
            for (int a = 0; a < dims.rows; ++a) {
                const int u = map_index(i + hr - a, H, mode);
                if (u < 0) continue;
                for (int b = 0; b < dims.cols; ++b) {
                    const int v = map_index(j + hc - b, W, mode);
                    if (v >= 0) g(a, b) += r(i, j) * x(u, v);
                }
            }
    return g;
}

Matrix solve_w_subproblem(const Matrix& v, double beta, double alpha) {
    Matrix out(v.rows(), v.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) out.data()[i] = solve_w(v.data()[i], beta, alpha);
    return out;
}

Matrix soft_threshold(const Matrix& v, double t) {
    Matrix out(v.rows(), v.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) out.data()[i] = lrd::soft_threshold(v.data()[i], t);
    return out;
}

}  // namespace lrd::serial
