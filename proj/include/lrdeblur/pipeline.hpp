#pragma once

#include "lrdeblur/kstep.hpp"
#include "lrdeblur/nonblind.hpp"
#include "lrdeblur/types.hpp"
#include "lrdeblur/xstep.hpp"

#include <vector>

namespace lrd {

struct PyramidLevel {
    Image image;
    KernelDims kernel_dims;
    /// 0 is full resolution.
    int scale_index;
};

struct DeblurResult {
    Image image;
    Kernel kernel;
    /// Kernel at the end of each level, coarsest first.
    std::vector<Kernel> per_level_kernels;
    /// Image-step objective after every alternation, all levels concatenated.
    std::vector<double> objective_trace;
};

/// Nearest odd integer to v, at least 3.
int round_to_odd(double v);

Matrix resize_bilinear(const Matrix& src, int rows, int cols);

/// Coarsest level first. Level s has dimensions round(dim * factor^s) and kernel dims
/// round_to_odd(L * factor^s). Throws if a kernel would not fit inside its level.
std::vector<PyramidLevel> build_pyramid(const Image& y, KernelDims kernel_size, int levels, double factor);

/// Scales k about its central tap by the given factors (bilinear, zero outside) into `dims`,
/// then projects. Carries a kernel to the next pyramid level at the image's own scale change.
Kernel upsample_kernel(const Kernel& k, KernelDims dims, double row_scale, double col_scale);

/// L x K zeros with two horizontally adjacent 0.5 taps at the center.
Kernel initial_kernel(KernelDims dims);

/// Zeroes entries below ratio * max, then renormalizes.
Kernel threshold_kernel(const Kernel& k, double ratio);

/// Integer shift that moves the kernel's center of mass to the central tap.
Kernel recenter_kernel(const Kernel& k);

/// Periodic derivatives of y with a band of `dims` half-width cleared along the
/// borders, where the periodic model cannot explain the data.
GradientPair blind_gradients(const Image& y, KernelDims dims);

/// Alternating image / kernel estimation on one scale starting from k_init.
/// Returns the estimated kernel (thresholded and recentered per config).
Kernel estimate_kernel_single_level(const Image& y, const Kernel& k_init, const DeblurConfig& cfg,
                                    std::vector<double>* objective_trace = nullptr);

DeblurResult deblur_single_scale(const Image& y, const DeblurConfig& cfg);
DeblurResult deblur_blind(const Image& y, const DeblurConfig& cfg);

}  // namespace lrd
