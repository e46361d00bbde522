#pragma once

#include "lrdeblur/fft.hpp"
#include "lrdeblur/linalg.hpp"
#include "lrdeblur/types.hpp"

#include <memory>
#include <optional>

namespace lrd {

/// How pixels outside the image are synthesized.
enum class BoundaryMode { ZeroPad, Replicate, Circular };

const char* to_string(BoundaryMode m);

/// Kernels with more taps than this take the transform-domain path.
inline constexpr int kDirectConvMaxArea = 81;

// Same-size 2-D convolution, y(i,j) = sum_ab k(a,b) x(i+l-a, j+c-b) with (l,c) the
// kernel center and out-of-range x supplied by `mode`. Kernel dims must be odd and
// at most 2*dim-1 along each axis. These accept arbitrary real kernel arrays.
Matrix conv2(const Matrix& x, const Matrix& k, BoundaryMode mode);
/// Exact adjoint of conv2 in x: <conv2(x,k), r> == <x, conv2_adjoint(r,k)>.
Matrix conv2_adjoint(const Matrix& r, const Matrix& k, BoundaryMode mode);

/// Direct (spatial) and transform-domain paths, exposed for testing.
Matrix conv2_direct(const Matrix& x, const Matrix& k, BoundaryMode mode);
Matrix conv2_fft(const Matrix& x, const Matrix& k, BoundaryMode mode);
Matrix conv2_adjoint_direct(const Matrix& r, const Matrix& k, BoundaryMode mode);
Matrix conv2_adjoint_fft(const Matrix& r, const Matrix& k, BoundaryMode mode);

Image convolve2d(const Image& x, const Kernel& k, BoundaryMode mode);
Image correlate2d_adjoint(const Image& r, const Kernel& k, BoundaryMode mode);

/// T_k: x -> k (x) x for a fixed kernel on a fixed grid. Circular mode keeps the
/// kernel spectrum; other modes fall back to conv2.
class BlurOperator {
public:
    BlurOperator(const Matrix& kernel, int rows, int cols, BoundaryMode mode);

    Matrix apply(const Matrix& x) const;
    Matrix adjoint(const Matrix& r) const;
    int rows() const { return rows_; }
    int cols() const { return cols_; }

private:
    Matrix kernel_;
    int rows_;
    int cols_;
    BoundaryMode mode_;
    std::optional<Fft2> fft_;
    ComplexMatrix spectrum_;
};

/// T_x: the image x acting linearly on kernel-shaped arrays.
class KernelOperator {
public:
    KernelOperator(const Image& x, KernelDims dims, BoundaryMode mode);

    KernelDims dims() const { return dims_; }
    BoundaryMode mode() const { return mode_; }
    int rows() const { return static_cast<int>(x_.rows()); }
    int cols() const { return static_cast<int>(x_.cols()); }

    /// Kernel-shaped -> image-shaped. Agrees with conv2(x, k, mode).
    Matrix apply(const Matrix& k) const;
    /// Image-shaped -> kernel-shaped.
    Matrix adjoint(const Matrix& r) const;

    /// Spectrum of x on the image grid (Circular mode only).
    const ComplexMatrix& spectrum() const { return spectrum_; }
    const Fft2* fft() const { return fft_ ? &*fft_ : nullptr; }

private:
    Matrix x_;
    KernelDims dims_;
    BoundaryMode mode_;
    std::optional<Fft2> fft_;
    ComplexMatrix spectrum_;
};

KernelOperator conv_image_as_operator_on_kernel(const Image& x, KernelDims dims, BoundaryMode mode);

/// Explicit 1-D convolution matrix T_x(L), rows = length(x), cols = L.
/// entries(i,j) = x[i + l - j] (0-based, l = (L-1)/2), zero outside x.
struct Toeplitz1D {
    Matrix entries;

    int rows() const { return static_cast<int>(entries.rows()); }
    int cols() const { return static_cast<int>(entries.cols()); }
};

Toeplitz1D build_toeplitz_1d(std::span<const double> x, int L);

/// Same-size zero-padded 1-D convolution, odd-length k centered.
Vector conv1d_zeropad(std::span<const double> x, std::span<const double> k);

/// T^+ b with singular values below 1e-12 * s_max treated as zero.
Vector pseudo_inverse_apply(const Toeplitz1D& t, const Vector& b);

inline std::span<const double> as_span(const Vector& v) { return {v.data(), static_cast<size_t>(v.size())}; }

}  // namespace lrd
