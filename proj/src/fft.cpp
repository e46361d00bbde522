#include "lrdeblur/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace lrd {

namespace {

struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

// The FFTW planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

PlanPair plans_for(int rows, int cols) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard lock(planner_mutex());
    auto it = cache.find({rows, cols});
    if (it != cache.end()) return it->second;

    const int hc = cols / 2 + 1;
    double* in = fftw_alloc_real(static_cast<size_t>(rows) * cols);
    fftw_complex* out = fftw_alloc_complex(static_cast<size_t>(rows) * hc);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    p.r2c = fftw_plan_dft_r2c_2d(rows, cols, in, out, flags);
    p.c2r = fftw_plan_dft_c2r_2d(rows, cols, out, in, flags);
    fftw_free(in);
    fftw_free(out);
    if (!p.r2c || !p.c2r) throw std::runtime_error("fftw plan creation failed");
    cache.emplace(std::make_pair(rows, cols), p);
    return p;
}

}  // namespace

Fft2::Fft2(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("fft size must be positive");
    const PlanPair p = plans_for(rows, cols);
    r2c_ = p.r2c;
    c2r_ = p.c2r;
}

ComplexMatrix Fft2::forward(const Matrix& x) const {
    if (x.rows() != rows_ || x.cols() != cols_) throw std::invalid_argument("fft input has wrong shape");
    ComplexMatrix out(rows_, spectrum_cols());
    // r2c with FFTW_ESTIMATE preserves the input.
    fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), const_cast<double*>(x.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

Matrix Fft2::inverse(const ComplexMatrix& X) const {
    if (X.rows() != rows_ || X.cols() != spectrum_cols()) throw std::invalid_argument("ifft input has wrong shape");
    ComplexMatrix scratch = X;  // c2r destroys its input
    Matrix out(rows_, cols_);
    fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_), reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
    out /= static_cast<double>(rows_) * cols_;
    return out;
}

Matrix embed_centered(const Matrix& k, int rows, int cols) {
    Matrix g = Matrix::Zero(rows, cols);
    const int hr = static_cast<int>(k.rows() - 1) / 2;
    const int hc = static_cast<int>(k.cols() - 1) / 2;
    for (int a = 0; a < k.rows(); ++a) {
        const int r = ((a - hr) % rows + rows) % rows;
        for (int b = 0; b < k.cols(); ++b) {
            const int c = ((b - hc) % cols + cols) % cols;
            g(r, c) += k(a, b);
        }
    }
    return g;
}

Matrix gather_centered(const Matrix& g, KernelDims dims) {
    const int rows = static_cast<int>(g.rows());
    const int cols = static_cast<int>(g.cols());
    Matrix k(dims.rows, dims.cols);
    for (int a = 0; a < dims.rows; ++a) {
        const int r = ((a - dims.half_rows()) % rows + rows) % rows;
        for (int b = 0; b < dims.cols; ++b) {
            const int c = ((b - dims.half_cols()) % cols + cols) % cols;
            k(a, b) = g(r, c);
        }
    }
    return k;
}

}  // namespace lrd
