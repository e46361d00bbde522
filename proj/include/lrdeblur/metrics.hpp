#pragma once

#include "lrdeblur/nonblind.hpp"
#include "lrdeblur/types.hpp"

#include <vector>

namespace lrd {

inline constexpr double kPsnrCap = 99.0;
inline constexpr double kDefaultSuccessThreshold = 3.0;

struct EvalScores {
    double ssd_kernel = 0.0;
    double ssd_kernel_raw = 0.0;
    double err_ratio = 0.0;
    double psnr_db = 0.0;
    bool success = false;
};

/// Both kernels centered in a common frame with enough margin that no shift loses mass;
/// minimum over all shifts within half the common extent.
double ssd_kernel_aligned(const Kernel& k_est, const Kernel& k_gt);
/// Same frame, no shift.
double ssd_kernel_raw(const Kernel& k_est, const Kernel& k_gt);

/// Sum of squared differences with `border` pixels dropped on every side.
double ssd_interior(const Image& a, const Image& b, int border);

/// SSD(x_est, x_gt) / SSD(x_ref, x_gt), where x_ref is the known-kernel result.
double error_ratio(const Image& x_est, const Image& x_gt, const Image& x_ref, int border);
/// Computes x_ref by non-blind deconvolution of y with k_gt; border = half kernel.
double error_ratio(const Image& x_est, const Image& x_gt, const Image& y, const Kernel& k_gt, const HQParams& nb);

/// 10 log10(peak^2 / MSE), capped at kPsnrCap.
double psnr(const Image& a, const Image& b, double peak = 1.0);

double success_rate(const std::vector<double>& errs, double threshold = kDefaultSuccessThreshold);

EvalScores evaluate(const Image& x_est, const Kernel& k_est, const Image& x_gt, const Kernel& k_gt, const Image& y,
                    const HQParams& nb, double threshold = kDefaultSuccessThreshold);

}  // namespace lrd
