#include "lrdeblur/kstep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace lrd {

KStepParams kstep_params(const DeblurConfig& c) {
    KStepParams p;
    p.mu = c.mu;
    p.tau = c.tau;
    p.sigma = c.sigma;
    p.delta = c.delta;
    p.outer_iter_max = c.outer_iter_max;
    p.cg_iter_max = c.cg_iter_max;
    p.inner_iter_max = c.inner_iter_max;
    return p;
}

double logdet_cost(const Matrix& m, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("logdet_cost: delta must be positive");
    if (!m.allFinite()) throw std::invalid_argument("logdet_cost: non-finite input");
    const Vector s = singular_values(m);
    double c = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) c += std::log(s(i) + delta);
    return c;
}

double logdet_cost(const Kernel& k, double delta) { return logdet_cost(k.weights(), delta); }

Vector shrink_singular_values(const Vector& s, const Vector& s_hat, double tau, double delta) {
    if (s.size() != s_hat.size()) throw std::invalid_argument("shrink: rank mismatch");
    Vector out(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) out(i) = std::max(s(i) - tau / (s_hat(i) + delta), 0.0);
    return out;
}

Matrix prox_logdet(const Matrix& psi, const Matrix& z, double tau, double delta) {
    if (psi.rows() != z.rows() || psi.cols() != z.cols()) throw std::invalid_argument("prox_logdet: shape mismatch");
    if (!(tau > 0.0) || !(delta > 0.0)) throw std::invalid_argument("prox_logdet: tau and delta must be positive");
    const SvdTriple d = svd(psi);
    const Vector shrunk = shrink_singular_values(d.s, singular_values(z), tau, delta);
    return d.u * shrunk.asDiagonal() * d.v.transpose();
}

KernelNormalEquations::KernelNormalEquations(const std::vector<Image>& x, const std::vector<Image>& y, KernelDims dims,
                                             BoundaryMode mode)
    : dims_(dims) {
    if (x.empty() || x.size() != y.size()) throw std::invalid_argument("kernel equations: channel count mismatch");
    rhs_ = Matrix::Zero(dims.rows, dims.cols);
    for (std::size_t c = 0; c < x.size(); ++c) {
        if (x[c].height() != y[c].height() || x[c].width() != y[c].width() || x[c].height() != x[0].height() ||
            x[c].width() != x[0].width())
            throw std::invalid_argument("kernel equations: shape mismatch");
        ops_.emplace_back(x[c], dims, mode);
        y_.push_back(y[c].pixels());
        rhs_ += ops_.back().adjoint(y_.back());
        y_norm_sq_ += y_.back().squaredNorm();
    }
    if (mode == BoundaryMode::Circular) {
        power_ = ComplexMatrix::Zero(ops_[0].spectrum().rows(), ops_[0].spectrum().cols());
        for (const auto& op : ops_) power_ += op.spectrum().cwiseAbs2().cast<std::complex<double>>();
    }
}

KernelNormalEquations::KernelNormalEquations(const GradientPair& x, const GradientPair& y, KernelDims dims,
                                             BoundaryMode mode)
    : KernelNormalEquations(std::vector<Image>{x.horiz, x.vert}, std::vector<Image>{y.horiz, y.vert}, dims, mode) {}

Matrix KernelNormalEquations::normal(const Matrix& p) const {
    if (p.rows() != dims_.rows || p.cols() != dims_.cols) throw std::invalid_argument("normal: kernel shape");
    if (power_.size() > 0) {
        const Fft2& fft = *ops_[0].fft();
        return gather_centered(fft.inverse(power_.cwiseProduct(fft.forward(embed_centered(p, fft.rows(), fft.cols())))),
                               dims_);
    }
    Matrix out = Matrix::Zero(dims_.rows, dims_.cols);
    for (const auto& op : ops_) out += op.adjoint(op.apply(p));
    return out;
}

double KernelNormalEquations::data_term(const Matrix& k) const {
    double s = 0.0;
    for (std::size_t c = 0; c < ops_.size(); ++c) s += (ops_[c].apply(k) - y_[c]).squaredNorm();
    return s;
}

Matrix cg_solve_psi(const KernelNormalEquations& eq, const Matrix& anchor, const Matrix& start, double mu, int iters,
                    CgTrace* trace) {
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("cg_solve_psi: mu must be >= 0");
    if (iters < 1) throw std::invalid_argument("cg_solve_psi: iters must be >= 1");
    const KernelDims d = eq.dims();
    if (anchor.rows() != d.rows || anchor.cols() != d.cols || start.rows() != d.rows || start.cols() != d.cols)
        throw std::invalid_argument("cg_solve_psi: kernel shape mismatch");

    auto apply_a = [&](const Matrix& p) -> Matrix { return eq.normal(p) + mu * p; };
    const Matrix b = eq.rhs() + mu * anchor;
    // With r = b - A psi the objective is constant - <psi, b + r>.
    const double constant = eq.y_norm_sq() + mu * anchor.squaredNorm();
    auto record = [&](const Matrix& psi, const Matrix& r) {
        if (!trace) return;
        trace->residual_norms.push_back(r.norm());
        trace->objective.push_back(constant - inner(psi, b + r));
    };

    Matrix psi = start;
    Matrix r = b - apply_a(psi);
    Matrix p = r;
    double rr = r.squaredNorm();
    record(psi, r);
    for (int it = 0; it < iters; ++it) {
        if (rr == 0.0) break;
        const Matrix ap = apply_a(p);
        const double pap = inner(p, ap);
        if (!std::isfinite(pap) || !std::isfinite(rr)) throw std::runtime_error("cg_solve_psi: diverged (non-finite)");
        if (pap <= 0.0) break;
        const double alpha = rr / pap;
        psi += alpha * p;
        r -= alpha * ap;
        const double rr_next = r.squaredNorm();
        if (!std::isfinite(rr_next)) throw std::runtime_error("cg_solve_psi: diverged (non-finite)");
        p = r + (rr_next / rr) * p;
        rr = rr_next;
        record(psi, r);
    }
    return psi;
}

Matrix cg_solve_psi(const GradientPair& x, const GradientPair& y, const Kernel& k_anchor, double mu, int iters,
                    KernelDims kdims, BoundaryMode mode) {
    if (k_anchor.dims() != kdims) throw std::invalid_argument("cg_solve_psi: anchor dims differ from kdims");
    const KernelNormalEquations eq(x, y, kdims, mode);
    return cg_solve_psi(eq, k_anchor.weights(), k_anchor.weights(), mu, iters);
}

Kernel project_kernel(const Matrix& m) {
    if (!m.allFinite()) throw std::invalid_argument("project_kernel: non-finite input");
    Matrix w = m.cwiseMax(0.0);
    const double s = w.sum();
    if (!(s > 0.0)) throw std::runtime_error("kernel annihilated");
    w /= s;
    return Kernel(std::move(w));
}

Kernel update_kernel(const KernelNormalEquations& eq, const Kernel& k_init, const KStepParams& p, KStepTrace* trace) {
    if (p.outer_iter_max < 1 || p.cg_iter_max < 1 || p.inner_iter_max < 1)
        throw std::invalid_argument("update_kernel: counts must be >= 1");
    if (!(p.tau > 0.0) || !(p.delta > 0.0) || !(p.sigma >= 0.0) || !(p.mu >= 0.0))
        throw std::invalid_argument("update_kernel: invalid parameters");
    if (k_init.dims() != eq.dims()) throw std::invalid_argument("update_kernel: kernel dims mismatch");

    Kernel k = k_init;
    for (int j = 0; j < p.outer_iter_max; ++j) {
        const double mu_j = j == 0 ? 0.0 : p.mu * std::exp(static_cast<double>(j - p.outer_iter_max));
        const Matrix psi = cg_solve_psi(eq, k.weights(), k.weights(), mu_j, p.cg_iter_max);

        Matrix next = psi;
        if (p.sigma > 0.0) {
            // Every prox iterate shares psi's singular vectors, so only the singular
            // values change between inner iterations. k^(0) = U I V^T.
            const SvdTriple d = svd(psi);
            Vector s_hat = Vector::Ones(d.s.size());
            Vector s_cur = d.s;
            for (int t = 0; t < p.inner_iter_max; ++t) {
                s_cur = shrink_singular_values(d.s, s_hat, p.sigma * p.tau, p.delta);
                s_hat = s_cur;
                std::sort(s_hat.data(), s_hat.data() + s_hat.size(), std::greater<>());
            }
            next = d.u * s_cur.asDiagonal() * d.v.transpose();
        }
        k = project_kernel(next);
        if (trace) {
            trace->psi.push_back(psi);
            trace->kernels.push_back(k);
        }
    }
    return k;
}

Kernel update_kernel(const GradientPair& x, const GradientPair& y, const Kernel& k_init, const KStepParams& p) {
    const KernelNormalEquations eq(x, y, k_init.dims(), p.mode);
    return update_kernel(eq, k_init, p);
}

}  // namespace lrd
