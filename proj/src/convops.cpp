#include "lrdeblur/convops.hpp"

#include "conv_detail.hpp"

#include <cmath>
#include <stdexcept>

namespace lrd {

using detail::map_index;

const char* to_string(BoundaryMode m) {
    switch (m) {
        case BoundaryMode::ZeroPad: return "zero";
        case BoundaryMode::Replicate: return "replicate";
        case BoundaryMode::Circular: return "circular";
    }
    return "?";
}

namespace detail {

void check_conv_args(const Matrix& x, const Matrix& k) {
    if (x.rows() < 1 || x.cols() < 1) throw std::invalid_argument("convolution: empty image");
    if (!KernelDims{static_cast<int>(k.rows()), static_cast<int>(k.cols())}.is_odd())
        throw std::invalid_argument("convolution: kernel dims must be odd");
    if (k.rows() > 2 * x.rows() - 1 || k.cols() > 2 * x.cols() - 1)
        throw std::invalid_argument("convolution: kernel larger than image");
    if (!x.allFinite() || !k.allFinite()) throw std::invalid_argument("convolution: non-finite input");
}

Matrix fold_extended(const Matrix& ext, int rows, int cols, int hr, int hc, BoundaryMode mode) {
    Matrix out = Matrix::Zero(rows, cols);
    for (int u = 0; u < ext.rows(); ++u) {
        const int p = map_index(u - hr, rows, mode);
        if (p < 0) continue;
        for (int v = 0; v < ext.cols(); ++v) {
            const int q = map_index(v - hc, cols, mode);
            if (q < 0) continue;
            out(p, q) += ext(u, v);
        }
    }
    return out;
}

}  // namespace detail

Matrix conv2_direct(const Matrix& x, const Matrix& k, BoundaryMode mode) {
    detail::check_conv_args(x, k);
    const int H = static_cast<int>(x.rows()), W = static_cast<int>(x.cols());
    const int L = static_cast<int>(k.rows()), K = static_cast<int>(k.cols());
    const int hr = (L - 1) / 2, hc = (K - 1) / 2;
    Matrix y(H, W);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < H; ++i) {
        for (int j = 0; j < W; ++j) {
            double s = 0.0;
            for (int a = 0; a < L; ++a) {
                const int u = map_index(i + hr - a, H, mode);
                if (u < 0) continue;
                for (int b = 0; b < K; ++b) {
                    const int v = map_index(j + hc - b, W, mode);
                    if (v < 0) continue;
                    s += k(a, b) * x(u, v);
                }
            }
            y(i, j) = s;
        }
    }
    return y;
}

Matrix conv2_adjoint_direct(const Matrix& r, const Matrix& k, BoundaryMode mode) {
    detail::check_conv_args(r, k);
    const int H = static_cast<int>(r.rows()), W = static_cast<int>(r.cols());
    const int L = static_cast<int>(k.rows()), K = static_cast<int>(k.cols());
    const int hr = (L - 1) / 2, hc = (K - 1) / 2;
    // Correlate onto the extended support, then fold back through the boundary map.
    Matrix ext(H + 2 * hr, W + 2 * hc);
#pragma omp parallel for schedule(static)
    for (int u = 0; u < H + 2 * hr; ++u) {
        for (int v = 0; v < W + 2 * hc; ++v) {
            double s = 0.0;
            for (int a = 0; a < L; ++a) {
                const int i = u - 2 * hr + a;
                if (i < 0 || i >= H) continue;
                for (int b = 0; b < K; ++b) {
                    const int j = v - 2 * hc + b;
                    if (j < 0 || j >= W) continue;
                    s += k(a, b) * r(i, j);
                }
            }
            ext(u, v) = s;
        }
    }
    return detail::fold_extended(ext, H, W, hr, hc, mode);
}

namespace {

Matrix extend(const Matrix& x, int hr, int hc, BoundaryMode mode) {
    const int H = static_cast<int>(x.rows()), W = static_cast<int>(x.cols());
    Matrix e(H + 2 * hr, W + 2 * hc);
    for (int u = 0; u < e.rows(); ++u) {
        const int p = map_index(u - hr, H, mode);
        for (int v = 0; v < e.cols(); ++v) {
            const int q = map_index(v - hc, W, mode);
            e(u, v) = (p < 0 || q < 0) ? 0.0 : x(p, q);
        }
    }
    return e;
}

Matrix pad_top_left(const Matrix& k, int rows, int cols) {
    Matrix p = Matrix::Zero(rows, cols);
    p.topLeftCorner(k.rows(), k.cols()) = k;
    return p;
}

}  // namespace

Matrix conv2_fft(const Matrix& x, const Matrix& k, BoundaryMode mode) {
    detail::check_conv_args(x, k);
    const int H = static_cast<int>(x.rows()), W = static_cast<int>(x.cols());
    const int hr = static_cast<int>(k.rows() - 1) / 2, hc = static_cast<int>(k.cols() - 1) / 2;
    const Matrix e = extend(x, hr, hc, mode);
    const Fft2 fft(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
    const ComplexMatrix prod = fft.forward(e).cwiseProduct(fft.forward(pad_top_left(k, fft.rows(), fft.cols())));
    // Linear convolution on the extended grid never wraps inside this window.
    return fft.inverse(prod).block(2 * hr, 2 * hc, H, W);
}

Matrix conv2_adjoint_fft(const Matrix& r, const Matrix& k, BoundaryMode mode) {
    detail::check_conv_args(r, k);
    const int H = static_cast<int>(r.rows()), W = static_cast<int>(r.cols());
    const int hr = static_cast<int>(k.rows() - 1) / 2, hc = static_cast<int>(k.cols() - 1) / 2;
    const int P = H + 2 * hr, Q = W + 2 * hc;
    const Fft2 fft(P, Q);
    const ComplexMatrix R = fft.forward(pad_top_left(r, P, Q));
    const ComplexMatrix Kf = fft.forward(pad_top_left(k, P, Q));
    const Matrix corr = fft.inverse(Kf.conjugate().cwiseProduct(R));
    Matrix ext(P, Q);
    for (int u = 0; u < P; ++u) {
        const int su = ((u - 2 * hr) % P + P) % P;
        for (int v = 0; v < Q; ++v) ext(u, v) = corr(su, ((v - 2 * hc) % Q + Q) % Q);
    }
    return detail::fold_extended(ext, H, W, hr, hc, mode);
}

Matrix conv2(const Matrix& x, const Matrix& k, BoundaryMode mode) {
    return k.size() > kDirectConvMaxArea ? conv2_fft(x, k, mode) : conv2_direct(x, k, mode);
}

Matrix conv2_adjoint(const Matrix& r, const Matrix& k, BoundaryMode mode) {
    return k.size() > kDirectConvMaxArea ? conv2_adjoint_fft(r, k, mode) : conv2_adjoint_direct(r, k, mode);
}

Image convolve2d(const Image& x, const Kernel& k, BoundaryMode mode) {
    return Image(conv2(x.pixels(), k.weights(), mode));
}

Image correlate2d_adjoint(const Image& r, const Kernel& k, BoundaryMode mode) {
    return Image(conv2_adjoint(r.pixels(), k.weights(), mode));
}

BlurOperator::BlurOperator(const Matrix& kernel, int rows, int cols, BoundaryMode mode)
    : kernel_(kernel), rows_(rows), cols_(cols), mode_(mode) {
    detail::check_conv_args(Matrix::Zero(rows, cols), kernel);
    if (mode == BoundaryMode::Circular) {
        fft_.emplace(rows, cols);
        spectrum_ = fft_->forward(embed_centered(kernel, rows, cols));
    }
}

Matrix BlurOperator::apply(const Matrix& x) const {
    if (x.rows() != rows_ || x.cols() != cols_) throw std::invalid_argument("BlurOperator: shape mismatch");
    if (!fft_) return conv2(x, kernel_, mode_);
    return fft_->inverse(fft_->forward(x).cwiseProduct(spectrum_));
}

Matrix BlurOperator::adjoint(const Matrix& r) const {
    if (r.rows() != rows_ || r.cols() != cols_) throw std::invalid_argument("BlurOperator: shape mismatch");
    if (!fft_) return conv2_adjoint(r, kernel_, mode_);
    return fft_->inverse(fft_->forward(r).cwiseProduct(spectrum_.conjugate()));
}

KernelOperator::KernelOperator(const Image& x, KernelDims dims, BoundaryMode mode)
    : x_(x.pixels()), dims_(dims), mode_(mode) {
    if (!dims.is_odd()) throw std::invalid_argument("kernel dims must be odd");
    if (dims.rows > 2 * x.height() - 1 || dims.cols > 2 * x.width() - 1)
        throw std::invalid_argument("kernel larger than image");
    if (mode == BoundaryMode::Circular) {
        fft_.emplace(x.height(), x.width());
        spectrum_ = fft_->forward(x_);
    }
}

Matrix KernelOperator::apply(const Matrix& k) const {
    if (k.rows() != dims_.rows || k.cols() != dims_.cols) throw std::invalid_argument("KernelOperator: kernel shape");
    if (!fft_) return conv2(x_, k, mode_);
    return fft_->inverse(spectrum_.cwiseProduct(fft_->forward(embed_centered(k, rows(), cols()))));
}

Matrix KernelOperator::adjoint(const Matrix& r) const {
    if (r.rows() != x_.rows() || r.cols() != x_.cols()) throw std::invalid_argument("KernelOperator: image shape");
    if (!fft_) return detail::kernel_adjoint_direct(x_, r, dims_, mode_);
    return gather_centered(fft_->inverse(fft_->forward(r).cwiseProduct(spectrum_.conjugate())), dims_);
}

namespace detail {

Matrix kernel_adjoint_direct(const Matrix& x, const Matrix& r, KernelDims dims, BoundaryMode mode) {
    const int H = static_cast<int>(x.rows()), W = static_cast<int>(x.cols());
    const int hr = dims.half_rows(), hc = dims.half_cols();
    Matrix g(dims.rows, dims.cols);
#pragma omp parallel for collapse(2) schedule(static)
    for (int a = 0; a < dims.rows; ++a) {
        for (int b = 0; b < dims.cols; ++b) {
            double s = 0.0;
            for (int i = 0; i < H; ++i) {
                const int u = map_index(i + hr - a, H, mode);
                if (u < 0) continue;
                for (int j = 0; j < W; ++j) {
                    const int v = map_index(j + hc - b, W, mode);
                    if (v < 0) continue;
                    s += r(i, j) * x(u, v);
                }
            }
            g(a, b) = s;
        }
    }
    return g;
}

}  // namespace detail

KernelOperator conv_image_as_operator_on_kernel(const Image& x, KernelDims dims, BoundaryMode mode) {
    return KernelOperator(x, dims, mode);
}

Toeplitz1D build_toeplitz_1d(std::span<const double> x, int L) {
    const int M = static_cast<int>(x.size());
    if (M < 1) throw std::invalid_argument("toeplitz: empty signal");
    if (L < 1 || L % 2 == 0) throw std::invalid_argument("toeplitz: L must be odd");
    if (L > 2 * M - 1) throw std::invalid_argument("toeplitz: L exceeds 2M-1");
    const int l = (L - 1) / 2;
    Toeplitz1D t{Matrix::Zero(M, L)};
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < L; ++j) {
            const int p = i + l - j;
            if (p >= 0 && p < M) t.entries(i, j) = x[static_cast<size_t>(p)];
        }
    return t;
}

Vector conv1d_zeropad(std::span<const double> x, std::span<const double> k) {
    const int M = static_cast<int>(x.size());
    const int L = static_cast<int>(k.size());
    if (L % 2 == 0) throw std::invalid_argument("conv1d: kernel length must be odd");
    const int l = (L - 1) / 2;
    Vector y = Vector::Zero(M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < L; ++j) {
            const int p = i + l - j;
            if (p >= 0 && p < M) y(i) += k[static_cast<size_t>(j)] * x[static_cast<size_t>(p)];
        }
    return y;
}

Vector pseudo_inverse_apply(const Toeplitz1D& t, const Vector& b) {
    if (b.size() != t.rows()) throw std::invalid_argument("pseudo_inverse_apply: length mismatch");
    return pseudo_inverse(t.entries) * b;
}

}  // namespace lrd
