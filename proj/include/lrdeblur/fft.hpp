#pragma once

#include "lrdeblur/types.hpp"

#include <complex>

namespace lrd {

using ComplexMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Real 2-D DFT of a fixed grid size. Spectra are the rows x (cols/2+1) half-plane.
/// Plans are shared across instances and built with FFTW_ESTIMATE so results are
/// reproducible run to run.
class Fft2 {
public:
    Fft2(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int spectrum_cols() const { return cols_ / 2 + 1; }

    ComplexMatrix forward(const Matrix& x) const;
    /// Normalized inverse, so inverse(forward(x)) == x.
    Matrix inverse(const ComplexMatrix& X) const;

private:
    int rows_;
    int cols_;
    void* r2c_;
    void* c2r_;
};

/// Places a kernel-shaped array on a rows x cols periodic grid with its center at
/// the origin; taps that land on the same cell accumulate.
Matrix embed_centered(const Matrix& k, int rows, int cols);

/// Adjoint of embed_centered: gathers a kernel-shaped window around the origin.
Matrix gather_centered(const Matrix& g, KernelDims dims);

}  // namespace lrd
