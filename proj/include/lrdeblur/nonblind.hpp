#pragma once

#include "lrdeblur/convops.hpp"
#include "lrdeblur/types.hpp"

#include <vector>

namespace lrd {

/// Half-quadratic splitting with a hyper-Laplacian gradient prior:
///   min_x lambda_nb/2 ||k (x) x - y||^2 + sum |grad x|^alpha
struct HQParams {
    double alpha = 2.0 / 3.0;
    double lambda_nb = 2000.0;
    std::vector<double> beta_schedule;
    /// Alternations per beta value.
    int inner_iters = 1;
};

/// alpha = 2/3, lambda_nb = 2000, beta from 1 up to (excluding) 256 in steps of 2*sqrt(2).
HQParams default_hq_params();
HQParams hq_params(const DeblurConfig& c);

/// argmin_w |w|^alpha + beta/2 (w - v)^2 for alpha in {1/2, 2/3}, closed form.
double solve_w(double v, double beta, double alpha);
Matrix solve_w_subproblem(const Matrix& v, double beta, double alpha);

/// Blends the image borders toward a blurred copy so periodic solves do not ring.
Image edge_taper(const Image& y, const Kernel& k, int passes = 3);

/// Forward differences x(i, j+1) - x(i, j) and x(i+1, j) - x(i, j), periodic.
GradientPair circular_gradients(const Image& x);

/// Exact minimizer of lambda/2 ||Kx - y||^2 + beta/2 ||grad x - w||^2 (periodic).
Matrix solve_x_subproblem(const Matrix& y, const Kernel& k, const Matrix& wh, const Matrix& wv, double lambda,
                          double beta);

/// lambda/2 ||Kx - y||^2 + sum |grad x|^alpha under periodic boundaries.
double hyper_laplacian_objective(const Matrix& x, const Matrix& y, const Kernel& k, const HQParams& p);

/// Non-blind deconvolution. Tapers y, then runs the beta continuation.
/// `objective_trace` receives the objective at the start and after each beta stage.
Image deconv_hyper_laplacian(const Image& y, const Kernel& k, const HQParams& p,
                             std::vector<double>* objective_trace = nullptr);

}  // namespace lrd
