#pragma once

// Single-threaded reference versions of the OpenMP kernels. The library never calls
// these; they exist so tests and the benchmark can hold the parallel code to them.

#include "lrdeblur/convops.hpp"

namespace lrd::serial {

Matrix conv2_direct(const Matrix& x, const Matrix& k, BoundaryMode mode);
Matrix conv2_adjoint_direct(const Matrix& r, const Matrix& k, BoundaryMode mode);
Matrix kernel_adjoint_direct(const Matrix& x, const Matrix& r, KernelDims dims, BoundaryMode mode);
Matrix solve_w_subproblem(const Matrix& v, double beta, double alpha);
Matrix soft_threshold(const Matrix& v, double t);

}  // namespace lrd::serial
