#include "lrdeblur/xstep.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace lrd {

double soft_threshold(double v, double t) {
    const double m = std::abs(v) - t;
    return m > 0.0 ? std::copysign(m, v) : 0.0;
}

Matrix soft_threshold(const Matrix& v, double t) {
    Matrix out(v.rows(), v.cols());
    const Eigen::Index n = v.size();
    const double* src = v.data();
    double* dst = out.data();
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) dst[i] = soft_threshold(src[i], t);
    return out;
}

double estimate_operator_norm_sq(const BlurOperator& op, int iterations, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Matrix v(op.rows(), op.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = uni(rng);
    v /= v.norm();
    double est = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Matrix w = op.adjoint(op.apply(v));
        const double n = w.norm();
        if (n == 0.0) return 0.0;
        est = n;
        v = w / n;
    }
    return est;
}

namespace {

double l1(const std::vector<Matrix>& x) {
    double s = 0.0;
    for (const auto& c : x) s += c.cwiseAbs().sum();
    return s;
}

double l2(const std::vector<Matrix>& x) {
    double s = 0.0;
    for (const auto& c : x) s += c.squaredNorm();
    return std::sqrt(s);
}

double data_term(const BlurOperator& op, const std::vector<Matrix>& x, const std::vector<Matrix>& y) {
    double s = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) s += (op.apply(x[c]) - y[c]).squaredNorm();
    return s;
}

double normalized_sparsity(const std::vector<Matrix>& x) {
    const double n2 = l2(x);
    return n2 > 0.0 ? l1(x) / n2 : 0.0;
}

}  // namespace

double xstep_objective(const std::vector<Matrix>& x, const std::vector<Matrix>& y, const Kernel& k, double lambda,
                       BoundaryMode mode) {
    const BlurOperator op(k.weights(), static_cast<int>(y.front().rows()), static_cast<int>(y.front().cols()), mode);
    return data_term(op, x, y) + lambda * normalized_sparsity(x);
}

XStepChannels update_channels(const std::vector<Matrix>& y, const std::vector<Matrix>& x0, const Kernel& k,
                              const XStepOptions& opt) {
    if (!(opt.lambda >= 0.0) || !std::isfinite(opt.lambda)) throw std::invalid_argument("xstep: lambda must be >= 0");
    if (opt.reweights < 1 || opt.inner_iters < 1) throw std::invalid_argument("xstep: iteration counts must be >= 1");
    if (y.empty() || y.size() != x0.size()) throw std::invalid_argument("xstep: channel count mismatch");
    const int H = static_cast<int>(y.front().rows()), W = static_cast<int>(y.front().cols());
    for (std::size_t c = 0; c < y.size(); ++c) {
        if (y[c].rows() != H || y[c].cols() != W || x0[c].rows() != H || x0[c].cols() != W)
            throw std::invalid_argument("xstep: channel shape mismatch");
        if (!y[c].allFinite() || !x0[c].allFinite()) throw std::invalid_argument("xstep: non-finite input");
    }

    XStepChannels out;
    out.x = x0;
    if (opt.lambda > 0.0 && l2(y) == 0.0) {
        for (auto& c : out.x) c.setZero();
        out.objective_trace.push_back(0.0);
        return out;
    }

    const BlurOperator op(k.weights(), H, W, opt.mode);
    const double lipschitz = 2.0 * 1.05 * estimate_operator_norm_sq(op, 30, opt.seed);
    const double step = 1.0 / lipschitz;

    std::vector<Matrix> grad(y.size());
    auto residual_pass = [&](std::vector<Matrix>* g) {
        double s = 0.0;
        for (std::size_t c = 0; c < y.size(); ++c) {
            Matrix r = op.apply(out.x[c]) - y[c];
            s += r.squaredNorm();
            if (g) (*g)[c] = 2.0 * op.adjoint(r);
        }
        return s;
    };

    double data = residual_pass(nullptr);
    out.objective_trace.push_back(data + opt.lambda * normalized_sparsity(out.x));

    for (int pass = 0; pass < opt.reweights; ++pass) {
        double denom = l2(out.x);
        if (denom == 0.0) denom = l2(y);
        const double weight = opt.lambda / denom;
        const double thr = weight * step;
        out.pass_offsets.push_back(out.surrogate_trace.size());
        for (int it = 0; it < opt.inner_iters; ++it) {
            data = residual_pass(&grad);
            out.surrogate_trace.push_back(data + weight * l1(out.x));
            for (std::size_t c = 0; c < y.size(); ++c) out.x[c] = soft_threshold(out.x[c] - step * grad[c], thr);
        }
        data = residual_pass(nullptr);
        out.surrogate_trace.push_back(data + weight * l1(out.x));
        out.objective_trace.push_back(data + opt.lambda * normalized_sparsity(out.x));
    }
    for (const auto& c : out.x)
        if (!c.allFinite()) throw std::runtime_error("xstep: iterate became non-finite");
    return out;
}

XStepState run_xstep(const GradientPair& y, const GradientPair& x0, const Kernel& k, const XStepOptions& opt) {
    XStepChannels r = update_channels({y.horiz.pixels(), y.vert.pixels()}, {x0.horiz.pixels(), x0.vert.pixels()}, k, opt);
    return {GradientPair(Image(std::move(r.x[0])), Image(std::move(r.x[1]))), std::move(r.objective_trace),
            std::move(r.surrogate_trace)};
}

GradientPair update_image(const GradientPair& y, const Kernel& k, double lambda, int iters) {
    XStepOptions opt;
    opt.lambda = lambda;
    opt.inner_iters = iters;
    return run_xstep(y, y, k, opt).current;
}

}  // namespace lrd
