#pragma once

#include "lrdeblur/convops.hpp"
#include "lrdeblur/types.hpp"

#include <optional>
#include <vector>

namespace lrd {

/// sign(v) * max(|v| - t, 0)
double soft_threshold(double v, double t);
Matrix soft_threshold(const Matrix& v, double t);

struct XStepOptions {
    double lambda = 5e-3;
    /// Outer passes; each refreezes the l2 denominator.
    int reweights = 2;
    /// Shrinkage steps per pass.
    int inner_iters = 10;
    BoundaryMode mode = BoundaryMode::Circular;
    std::uint64_t seed = 0;
};

/// Result of the normalized-sparsity image update on any number of channels.
struct XStepChannels {
    std::vector<Matrix> x;
    /// ||Kx - y||^2 + lambda ||x||_1 / ||x||_2 at the start and after every pass.
    std::vector<double> objective_trace;
    /// Frozen-denominator surrogate evaluated before every shrinkage step and after
    /// the last one of each pass, flattened across passes.
    std::vector<double> surrogate_trace;
    /// Index into surrogate_trace where each pass begins.
    std::vector<std::size_t> pass_offsets;
};

/// Image step: approximately minimizes sum_c ||k (x) x_c - y_c||^2 + lambda ||x||_1/||x||_2,
/// where the norms run jointly over all channels. Reweighted ISTA with step 1/L_f.
XStepChannels update_channels(const std::vector<Matrix>& y, const std::vector<Matrix>& x0, const Kernel& k,
                              const XStepOptions& opt);

struct XStepState {
    GradientPair current;
    std::vector<double> objective_trace;
    std::vector<double> surrogate_trace;
};

XStepState run_xstep(const GradientPair& y, const GradientPair& x0, const Kernel& k, const XStepOptions& opt);

/// Starts from x = y. `iters` is the shrinkage-step count per pass.
GradientPair update_image(const GradientPair& y, const Kernel& k, double lambda, int iters);

/// True objective of the image step over all channels.
double xstep_objective(const std::vector<Matrix>& x, const std::vector<Matrix>& y, const Kernel& k, double lambda,
                       BoundaryMode mode);

/// Largest eigenvalue of T_k^T T_k by power iteration.
double estimate_operator_norm_sq(const BlurOperator& op, int iterations, std::uint64_t seed);

}  // namespace lrd
