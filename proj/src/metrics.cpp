#include "lrdeblur/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lrd {

namespace {

Matrix centered_in(const Matrix& k, int rows, int cols) {
    Matrix f = Matrix::Zero(rows, cols);
    f.block((rows - k.rows()) / 2, (cols - k.cols()) / 2, k.rows(), k.cols()) = k;
    return f;
}

}  // namespace

double ssd_kernel_aligned(const Kernel& k_est, const Kernel& k_gt) {
    const int R = std::max(k_est.rows(), k_gt.rows()), C = std::max(k_est.cols(), k_gt.cols());
    const int sr = (R - 1) / 2, sc = (C - 1) / 2;
    const int FR = R + 2 * sr, FC = C + 2 * sc;
    const Matrix a = centered_in(k_est.weights(), FR, FC);
    const Matrix b = centered_in(k_gt.weights(), FR, FC);
    double best = std::numeric_limits<double>::infinity();
    for (int dr = -sr; dr <= sr; ++dr)
        for (int dc = -sc; dc <= sc; ++dc) {
            double s = 0.0;
            for (int i = 0; i < FR; ++i)
                for (int j = 0; j < FC; ++j) {
                    const int si = i - dr, sj = j - dc;
                    const double av = (si >= 0 && si < FR && sj >= 0 && sj < FC) ? a(si, sj) : 0.0;
                    const double d = av - b(i, j);
                    s += d * d;
                }
            best = std::min(best, s);
        }
    return best;
}

double ssd_kernel_raw(const Kernel& k_est, const Kernel& k_gt) {
    const int R = std::max(k_est.rows(), k_gt.rows()), C = std::max(k_est.cols(), k_gt.cols());
    return (centered_in(k_est.weights(), R, C) - centered_in(k_gt.weights(), R, C)).squaredNorm();
}

double ssd_interior(const Image& a, const Image& b, int border) {
    if (a.height() != b.height() || a.width() != b.width()) throw std::invalid_argument("ssd: dimension mismatch");
    if (border < 0 || 2 * border >= a.height() || 2 * border >= a.width())
        throw std::invalid_argument("ssd: border leaves no pixels");
    const int h = a.height() - 2 * border, w = a.width() - 2 * border;
    return (a.pixels().block(border, border, h, w) - b.pixels().block(border, border, h, w)).squaredNorm();
}

double error_ratio(const Image& x_est, const Image& x_gt, const Image& x_ref, int border) {
    const double den = ssd_interior(x_ref, x_gt, border);
    if (!(den > 0.0)) throw std::domain_error("error_ratio: reference SSD is zero");
    return ssd_interior(x_est, x_gt, border) / den;
}

double error_ratio(const Image& x_est, const Image& x_gt, const Image& y, const Kernel& k_gt, const HQParams& nb) {
    const Image x_ref = deconv_hyper_laplacian(y, k_gt, nb);
    return error_ratio(x_est, x_gt, x_ref, std::max(k_gt.dims().half_rows(), k_gt.dims().half_cols()));
}

double psnr(const Image& a, const Image& b, double peak) {
    if (a.height() != b.height() || a.width() != b.width()) throw std::invalid_argument("psnr: dimension mismatch");
    if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be positive");
    const double mse = (a.pixels() - b.pixels()).squaredNorm() / static_cast<double>(a.pixels().size());
    if (mse == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

double success_rate(const std::vector<double>& errs, double threshold) {
    if (errs.empty()) throw std::invalid_argument("success_rate: empty list");
    const auto n = std::count_if(errs.begin(), errs.end(), [&](double e) { return e <= threshold; });
    return static_cast<double>(n) / static_cast<double>(errs.size());
}

EvalScores evaluate(const Image& x_est, const Kernel& k_est, const Image& x_gt, const Kernel& k_gt, const Image& y,
                    const HQParams& nb, double threshold) {
    EvalScores s;
    s.ssd_kernel = ssd_kernel_aligned(k_est, k_gt);
    s.ssd_kernel_raw = ssd_kernel_raw(k_est, k_gt);
    s.err_ratio = error_ratio(x_est, x_gt, y, k_gt, nb);
    s.psnr_db = psnr(x_est, x_gt);
    s.success = s.err_ratio <= threshold;
    return s;
}

}  // namespace lrd
