#include "lrdeblur/nonblind.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lrd {

HQParams default_hq_params() {
    HQParams p;
    const double step = 2.0 * std::numbers::sqrt2;
    for (double beta = 1.0; beta < 256.0; beta *= step) p.beta_schedule.push_back(beta);
    return p;
}

HQParams hq_params(const DeblurConfig& c) {
    HQParams p = default_hq_params();
    p.alpha = c.nb_alpha;
    p.lambda_nb = c.nb_lambda;
    return p;
}

namespace {

// Real roots of t^3 + p t + q = 0.
int depressed_cubic_roots(double p, double q, std::array<double, 3>& out) {
    if (p == 0.0) {
        out[0] = std::cbrt(-q);
        return 1;
    }
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        out[0] = std::cbrt(-q / 2.0 + sq) + std::cbrt(-q / 2.0 - sq);
        return 1;
    }
    // Three real roots (p < 0 here).
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) out[k] = r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0);
    return 3;
}

template <class F, class DF>
double newton_polish(double t, F f, DF df) {
    for (int i = 0; i < 3; ++i) {
        const double d = df(t);
        if (d == 0.0) break;
        const double next = t - f(t) / d;
        if (!std::isfinite(next)) break;
        t = next;
    }
    return t;
}

// Positive real roots of t^4 + q t + r = 0 via Ferrari's resolvent.
int quartic_positive_roots(double q, double r, std::array<double, 4>& out) {
    std::array<double, 3> res{};
    const int nres = depressed_cubic_roots(-r, -q * q / 8.0, res);
    double m = res[0];
    for (int i = 1; i < nres; ++i) m = std::max(m, res[i]);
    int n = 0;
    if (!(m > 0.0)) return 0;
    const double s = std::sqrt(2.0 * m);
    for (int sign : {1, -1}) {
        // t^2 - sign*s*t + m + sign*s*q/(4m) = 0
        const double b = -sign * s;
        const double c = m + sign * s * q / (4.0 * m);
        const double d = b * b - 4.0 * c;
        if (d < 0.0) continue;
        const double sd = std::sqrt(d);
        for (double t : {(-b + sd) / 2.0, (-b - sd) / 2.0})
            if (t > 0.0) out[static_cast<size_t>(n++)] = t;
    }
    return n;
}

}  // namespace

double solve_w(double v, double beta, double alpha) {
    if (!(beta > 0.0)) throw std::invalid_argument("solve_w: beta must be positive");
    const double av = std::abs(v);
    if (av == 0.0) return 0.0;
    auto cost = [&](double u) { return std::pow(u, alpha) + 0.5 * beta * (u - av) * (u - av); };

    double best = 0.0;
    double best_cost = cost(0.0);
    auto consider = [&](double u) {
        if (!(u > 0.0) || u > av) return;
        const double c = cost(u);
        if (c < best_cost) {
            best_cost = c;
            best = u;
        }
    };

    if (alpha == 0.5) {
        // u = t^2: t^3 - |v| t + 1/(2 beta) = 0
        const double q = 1.0 / (2.0 * beta);
        std::array<double, 3> roots{};
        const int n = depressed_cubic_roots(-av, q, roots);
        for (int i = 0; i < n; ++i) {
            const double t = newton_polish(
                roots[static_cast<size_t>(i)], [&](double x) { return x * x * x - av * x + q; },
                [&](double x) { return 3.0 * x * x - av; });
            if (t > 0.0) consider(t * t);
        }
    } else if (std::abs(alpha - 2.0 / 3.0) < 1e-12) {
        // u = t^3: t^4 - |v| t + 2/(3 beta) = 0
        const double r = 2.0 / (3.0 * beta);
        std::array<double, 4> roots{};
        const int n = quartic_positive_roots(-av, r, roots);
        for (int i = 0; i < n; ++i) {
            const double t = newton_polish(
                roots[static_cast<size_t>(i)], [&](double x) { return x * x * x * x - av * x + r; },
                [&](double x) { return 4.0 * x * x * x - av; });
            if (t > 0.0) consider(t * t * t);
        }
    } else {
        throw std::invalid_argument("solve_w: alpha must be 1/2 or 2/3");
    }
    return std::copysign(best, v);
}

Matrix solve_w_subproblem(const Matrix& v, double beta, double alpha) {
    Matrix out(v.rows(), v.cols());
    const Eigen::Index n = v.size();
    const double* src = v.data();
    double* dst = out.data();
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) dst[i] = solve_w(src[i], beta, alpha);
    return out;
}

namespace {

// 1 - normalized autocorrelation of the kernel's projection, by distance to the border.
Vector taper_profile(const Vector& proj, int n) {
    const int L = static_cast<int>(proj.size());
    Vector ac = Vector::Zero(L);
    for (int lag = 0; lag < L; ++lag)
        for (int i = 0; i + lag < L; ++i) ac(lag) += proj(i) * proj(i + lag);
    if (ac(0) > 0.0) ac /= ac(0);
    Vector w(n);
    for (int i = 0; i < n; ++i) {
        const int d = std::min(i, n - 1 - i);
        w(i) = d < L ? 1.0 - ac(d) : 1.0;
    }
    return w;
}

Matrix periodic_grad_h(const Matrix& x) {
    const Eigen::Index W = x.cols();
    Matrix g(x.rows(), W);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < W; ++j) g(i, j) = x(i, (j + 1) % W) - x(i, j);
    return g;
}

Matrix periodic_grad_v(const Matrix& x) {
    const Eigen::Index H = x.rows();
    Matrix g(H, x.cols());
    for (Eigen::Index i = 0; i < H; ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) g(i, j) = x((i + 1) % H, j) - x(i, j);
    return g;
}

Matrix grad_h_kernel() {
    Matrix k = Matrix::Zero(1, 3);
    k(0, 0) = 1.0;
    k(0, 1) = -1.0;
    return k;
}

Matrix grad_v_kernel() {
    Matrix k = Matrix::Zero(3, 1);
    k(0, 0) = 1.0;
    k(1, 0) = -1.0;
    return k;
}

}  // namespace

Image edge_taper(const Image& y, const Kernel& k, int passes) {
    const Vector wr = taper_profile(k.weights().rowwise().sum(), y.height());
    const Vector wc = taper_profile(k.weights().colwise().sum().transpose(), y.width());
    const Matrix alpha = wr * wc.transpose();
    const BlurOperator blur(k.weights(), y.height(), y.width(), BoundaryMode::Circular);
    Matrix out = y.pixels();
    for (int p = 0; p < passes; ++p) {
        const Matrix blurred = blur.apply(out);
        out = alpha.cwiseProduct(y.pixels()) + (Matrix::Ones(y.height(), y.width()) - alpha).cwiseProduct(blurred);
    }
    return Image(std::move(out));
}

GradientPair circular_gradients(const Image& x) {
    return GradientPair(Image(periodic_grad_h(x.pixels())), Image(periodic_grad_v(x.pixels())));
}

Matrix solve_x_subproblem(const Matrix& y, const Kernel& k, const Matrix& wh, const Matrix& wv, double lambda,
                          double beta) {
    const int H = static_cast<int>(y.rows()), W = static_cast<int>(y.cols());
    const Fft2 fft(H, W);
    const ComplexMatrix K = fft.forward(embed_centered(k.weights(), H, W));
    const ComplexMatrix Fh = fft.forward(embed_centered(grad_h_kernel(), H, W));
    const ComplexMatrix Fv = fft.forward(embed_centered(grad_v_kernel(), H, W));
    const ComplexMatrix num = lambda * K.conjugate().cwiseProduct(fft.forward(y)) +
                              beta * (Fh.conjugate().cwiseProduct(fft.forward(wh)) +
                                      Fv.conjugate().cwiseProduct(fft.forward(wv)));
    const Eigen::ArrayXXd den =
        (lambda * K.cwiseAbs2() + beta * (Fh.cwiseAbs2() + Fv.cwiseAbs2())).array();
    ComplexMatrix X = num;
    X.array() /= den.cast<std::complex<double>>();
    return fft.inverse(X);
}

double hyper_laplacian_objective(const Matrix& x, const Matrix& y, const Kernel& k, const HQParams& p) {
    const BlurOperator blur(k.weights(), static_cast<int>(x.rows()), static_cast<int>(x.cols()),
                            BoundaryMode::Circular);
    const double data = 0.5 * p.lambda_nb * (blur.apply(x) - y).squaredNorm();
    const double prior =
        periodic_grad_h(x).array().abs().pow(p.alpha).sum() + periodic_grad_v(x).array().abs().pow(p.alpha).sum();
    return data + prior;
}

Image deconv_hyper_laplacian(const Image& y, const Kernel& k, const HQParams& p, std::vector<double>* objective_trace) {
    if (!(p.lambda_nb > 0.0)) throw std::invalid_argument("nonblind: lambda_nb must be positive");
    if (p.beta_schedule.empty()) throw std::invalid_argument("nonblind: empty beta schedule");
    for (std::size_t i = 0; i < p.beta_schedule.size(); ++i)
        if (!(p.beta_schedule[i] > 0.0) || (i > 0 && !(p.beta_schedule[i] > p.beta_schedule[i - 1])))
            throw std::invalid_argument("nonblind: beta schedule must be positive and strictly increasing");
    if (k.rows() > y.height() || k.cols() > y.width()) throw std::invalid_argument("nonblind: kernel larger than image");

    const Matrix yt = edge_taper(y, k).pixels();
    Matrix x = yt;
    if (objective_trace) objective_trace->push_back(hyper_laplacian_objective(x, yt, k, p));
    for (double beta : p.beta_schedule) {
        for (int it = 0; it < p.inner_iters; ++it) {
            const Matrix wh = solve_w_subproblem(periodic_grad_h(x), beta, p.alpha);
            const Matrix wv = solve_w_subproblem(periodic_grad_v(x), beta, p.alpha);
            x = solve_x_subproblem(yt, k, wh, wv, p.lambda_nb, beta);
        }
        if (objective_trace) objective_trace->push_back(hyper_laplacian_objective(x, yt, k, p));
    }
    return Image(std::move(x));
}

}  // namespace lrd
