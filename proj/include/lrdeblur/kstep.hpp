#pragma once

#include "lrdeblur/convops.hpp"
#include "lrdeblur/linalg.hpp"
#include "lrdeblur/types.hpp"

#include <optional>
#include <vector>

namespace lrd {

struct KStepParams {
    double mu = 1.0;
    double tau = 5e-5;
    /// Zero skips the low-rank proximal sub-step; otherwise scales tau.
    double sigma = 1.0;
    double delta = 1e-3;
    int outer_iter_max = 20;
    int cg_iter_max = 3;
    int inner_iter_max = 10;
    BoundaryMode mode = BoundaryMode::Circular;
};

KStepParams kstep_params(const DeblurConfig& c);

/// sum_i log(s_i + delta) over all singular values.
double logdet_cost(const Matrix& m, double delta);
double logdet_cost(const Kernel& k, double delta);

/// max(s_i - tau / (s_hat_i + delta), 0), pairing both lists by descending rank.
Vector shrink_singular_values(const Vector& s, const Vector& s_hat, double tau, double delta);

/// Proximal map of tau times the log-det surrogate linearized at z, applied to psi:
/// U (S - tau diag(1/(s_hat + delta)))_+ V^T with U S V^T = svd(psi), s_hat = sv(z).
Matrix prox_logdet(const Matrix& psi, const Matrix& z, double tau, double delta);

/// Normal equations of the kernel data term over several channels:
/// A = sum_c T_c^T T_c, b = sum_c T_c^T y_c with T_c = T_{x_c}.
class KernelNormalEquations {
public:
    KernelNormalEquations(const std::vector<Image>& x, const std::vector<Image>& y, KernelDims dims,
                          BoundaryMode mode);
    KernelNormalEquations(const GradientPair& x, const GradientPair& y, KernelDims dims, BoundaryMode mode);

    KernelDims dims() const { return dims_; }
    Matrix normal(const Matrix& p) const;
    const Matrix& rhs() const { return rhs_; }
    /// sum_c ||T_c k - y_c||^2
    double data_term(const Matrix& k) const;
    double y_norm_sq() const { return y_norm_sq_; }

private:
    KernelDims dims_;
    std::vector<KernelOperator> ops_;
    std::vector<Matrix> y_;
    ComplexMatrix power_;  // sum_c |X_c|^2, circular mode only
    Matrix rhs_;
    double y_norm_sq_ = 0.0;
};

struct CgTrace {
    /// ||b - A psi|| before the first and after every iteration.
    std::vector<double> residual_norms;
    /// ||T psi - y||^2 + mu ||psi - anchor||^2 at the same points.
    std::vector<double> objective;
};

/// Exactly `iters` conjugate-gradient iterations on (A + mu I) psi = b + mu anchor,
/// starting from `start` (stops early only on an exact zero residual).
Matrix cg_solve_psi(const KernelNormalEquations& eq, const Matrix& anchor, const Matrix& start, double mu, int iters,
                    CgTrace* trace = nullptr);

/// Convenience form that starts from the anchor.
Matrix cg_solve_psi(const GradientPair& x, const GradientPair& y, const Kernel& k_anchor, double mu, int iters,
                    KernelDims kdims, BoundaryMode mode = BoundaryMode::Circular);

/// max(m, 0) / sum(max(m, 0)); throws "kernel annihilated" on an all-non-positive input.
Kernel project_kernel(const Matrix& m);

struct KStepTrace {
    std::vector<Matrix> psi;
    std::vector<Kernel> kernels;
};

/// Low-rank regularized kernel update (alternating CG / log-det prox / projection).
Kernel update_kernel(const KernelNormalEquations& eq, const Kernel& k_init, const KStepParams& p,
                     KStepTrace* trace = nullptr);
Kernel update_kernel(const GradientPair& x, const GradientPair& y, const Kernel& k_init, const KStepParams& p);

}  // namespace lrd
