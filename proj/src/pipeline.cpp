#include "lrdeblur/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lrd {

int round_to_odd(double v) {
    const int odd = 2 * static_cast<int>(std::lround((v - 1.0) / 2.0)) + 1;
    return std::max(3, odd);
}

Matrix resize_bilinear(const Matrix& src, int rows, int cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("resize: target must be non-empty");
    const int H = static_cast<int>(src.rows()), W = static_cast<int>(src.cols());
    Matrix out(rows, cols);
    const double sy = static_cast<double>(H) / rows;
    const double sx = static_cast<double>(W) / cols;
    for (int i = 0; i < rows; ++i) {
        const double fy = std::clamp((i + 0.5) * sy - 0.5, 0.0, static_cast<double>(H - 1));
        const int y0 = static_cast<int>(std::floor(fy));
        const int y1 = std::min(y0 + 1, H - 1);
        const double wy = fy - y0;
        for (int j = 0; j < cols; ++j) {
            const double fx = std::clamp((j + 0.5) * sx - 0.5, 0.0, static_cast<double>(W - 1));
            const int x0 = static_cast<int>(std::floor(fx));
            const int x1 = std::min(x0 + 1, W - 1);
            const double wx = fx - x0;
            out(i, j) = (1 - wy) * ((1 - wx) * src(y0, x0) + wx * src(y0, x1)) +
                        wy * ((1 - wx) * src(y1, x0) + wx * src(y1, x1));
        }
    }
    return out;
}

Kernel upsample_kernel(const Kernel& k, KernelDims dims, double row_scale, double col_scale) {
    if (!dims.is_odd()) throw std::invalid_argument("kernel dims must be odd");
    if (!(row_scale > 0.0 && col_scale > 0.0)) throw std::invalid_argument("upsample_kernel: scales must be positive");
    const int R = k.rows(), C = k.cols();
    const double cr = k.dims().half_rows(), cc = k.dims().half_cols();
    auto tap = [&](int r, int c) { return (r < 0 || r >= R || c < 0 || c >= C) ? 0.0 : k(r, c); };
    Matrix out(dims.rows, dims.cols);
    for (int i = 0; i < dims.rows; ++i) {
        const double fy = cr + (i - dims.half_rows()) / row_scale;
        const int y0 = static_cast<int>(std::floor(fy));
        const double wy = fy - y0;
        for (int j = 0; j < dims.cols; ++j) {
            const double fx = cc + (j - dims.half_cols()) / col_scale;
            const int x0 = static_cast<int>(std::floor(fx));
            const double wx = fx - x0;
            out(i, j) = (1 - wy) * ((1 - wx) * tap(y0, x0) + wx * tap(y0, x0 + 1)) +
                        wy * ((1 - wx) * tap(y0 + 1, x0) + wx * tap(y0 + 1, x0 + 1));
        }
    }
    return project_kernel(out);
}

std::vector<PyramidLevel> build_pyramid(const Image& y, KernelDims kernel_size, int levels, double factor) {
    if (levels < 1) throw std::invalid_argument("pyramid: levels must be >= 1");
    if (!(factor > 0.0 && factor < 1.0)) throw std::invalid_argument("pyramid: factor must be in (0,1)");
    if (!kernel_size.is_odd()) throw std::invalid_argument("kernel dims must be odd");
    std::vector<PyramidLevel> out;
    for (int s = levels - 1; s >= 0; --s) {
        const double f = std::pow(factor, s);
        const int h = s == 0 ? y.height() : std::max(1, static_cast<int>(std::lround(y.height() * f)));
        const int w = s == 0 ? y.width() : std::max(1, static_cast<int>(std::lround(y.width() * f)));
        const KernelDims kd = s == 0 ? kernel_size : KernelDims{round_to_odd(kernel_size.rows * f),
                                                                round_to_odd(kernel_size.cols * f)};
        if (kd.rows > h || kd.cols > w) {
            std::ostringstream msg;
            msg << "pyramid: kernel " << kd.rows << "x" << kd.cols << " does not fit level " << s << " image " << h
                << "x" << w;
            throw std::invalid_argument(msg.str());
        }
        Image img = s == 0 ? y : Image(resize_bilinear(y.pixels(), h, w));
        out.push_back({std::move(img), kd, s});
    }
    return out;
}

Kernel initial_kernel(KernelDims dims) {
    if (!dims.is_odd()) throw std::invalid_argument("kernel dims must be odd");
    if (dims.cols < 3) return Kernel::delta(dims);
    Matrix w = Matrix::Zero(dims.rows, dims.cols);
    w(dims.half_rows(), dims.half_cols()) = 0.5;
    w(dims.half_rows(), dims.half_cols() + 1) = 0.5;
    return Kernel(std::move(w));
}

Kernel threshold_kernel(const Kernel& k, double ratio) {
    if (!(ratio >= 0.0 && ratio < 1.0)) throw std::invalid_argument("threshold_kernel: ratio must be in [0,1)");
    const double cut = ratio * k.weights().maxCoeff();
    Matrix w = k.weights();
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w.data()[i] < cut) w.data()[i] = 0.0;
    return project_kernel(w);
}

Kernel recenter_kernel(const Kernel& k) {
    const Matrix& w = k.weights();
    double cr = 0.0, cc = 0.0;
    for (int a = 0; a < w.rows(); ++a)
        for (int b = 0; b < w.cols(); ++b) {
            cr += a * w(a, b);
            cc += b * w(a, b);
        }
    const int dr = k.dims().half_rows() - static_cast<int>(std::lround(cr));
    const int dc = k.dims().half_cols() - static_cast<int>(std::lround(cc));
    if (dr == 0 && dc == 0) return k;
    Matrix out = Matrix::Zero(w.rows(), w.cols());
    for (int a = 0; a < w.rows(); ++a)
        for (int b = 0; b < w.cols(); ++b) {
            const int ta = a + dr, tb = b + dc;
            if (ta >= 0 && ta < w.rows() && tb >= 0 && tb < w.cols()) out(ta, tb) = w(a, b);
        }
    return project_kernel(out);
}

GradientPair blind_gradients(const Image& y, KernelDims dims) {
    GradientPair g = circular_gradients(y);
    Matrix h = g.horiz.pixels(), v = g.vert.pixels();
    const int H = y.height(), W = y.width();
    const int br = std::min(dims.half_rows() + 1, H), bc = std::min(dims.half_cols() + 1, W);
    for (Matrix* m : {&h, &v}) {
        m->topRows(br).setZero();
        m->bottomRows(br).setZero();
        m->leftCols(bc).setZero();
        m->rightCols(bc).setZero();
    }
    return GradientPair(Image(std::move(h)), Image(std::move(v)));
}

Kernel estimate_kernel_single_level(const Image& y, const Kernel& k_init, const DeblurConfig& cfg,
                                    std::vector<double>* objective_trace) {
    const GradientPair gy = blind_gradients(y, k_init.dims());
    XStepOptions xo;
    xo.lambda = cfg.lambda;
    // The data term grows with gradient energy and pixel count, l1/l2 of a sparse field only
    // with the square root of the count.
    if (cfg.scale_lambda)
        xo.lambda *= (gy.horiz.pixels().squaredNorm() + gy.vert.pixels().squaredNorm()) /
                     std::sqrt(static_cast<double>(y.height()) * y.width());
    xo.reweights = cfg.xstep_reweights;
    xo.inner_iters = cfg.xstep_inner_iters;
    xo.mode = BoundaryMode::Circular;
    xo.seed = cfg.seed;
    KStepParams kp = kstep_params(cfg);
    kp.mode = BoundaryMode::Circular;

    std::vector<Matrix> yc{gy.horiz.pixels(), gy.vert.pixels()};
    std::vector<Matrix> x = yc;
    Kernel k = k_init;
    for (int it = 0; it < cfg.iter_max; ++it) {
        XStepChannels xs = update_channels(yc, x, k, xo);
        x = std::move(xs.x);
        if (objective_trace) objective_trace->push_back(xs.objective_trace.back());
        const KernelNormalEquations eq{GradientPair{Image{x[0]}, Image{x[1]}}, gy, k.dims(), BoundaryMode::Circular};
        k = update_kernel(eq, k, kp);
    }
    if (cfg.threshold_ratio > 0.0) k = threshold_kernel(k, cfg.threshold_ratio);
    if (cfg.recenter_kernel) k = recenter_kernel(k);
    return k;
}

namespace {

void require_valid(const DeblurConfig& cfg) {
    const auto errs = validate_config(cfg);
    if (!errs.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errs) msg += " " + e + ";";
        throw std::invalid_argument(msg);
    }
}

}  // namespace

DeblurResult deblur_single_scale(const Image& y, const DeblurConfig& cfg) {
    DeblurConfig one = cfg;
    one.pyramid_levels = 1;
    return deblur_blind(y, one);
}

DeblurResult deblur_blind(const Image& y, const DeblurConfig& cfg) {
    require_valid(cfg);
    const auto levels = build_pyramid(y, cfg.kernel_size, cfg.pyramid_levels, cfg.pyramid_factor);
    std::vector<Kernel> per_level;
    std::vector<double> trace;
    Kernel k = initial_kernel(levels.front().kernel_dims);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const PyramidLevel& lv = levels[i];
        if (i > 0) {
            const Image& prev = levels[i - 1].image;
            k = upsample_kernel(k, lv.kernel_dims, static_cast<double>(lv.image.height()) / prev.height(),
                                static_cast<double>(lv.image.width()) / prev.width());
        }
        k = estimate_kernel_single_level(lv.image, k, cfg, &trace);
        per_level.push_back(k);
    }
    Image x = deconv_hyper_laplacian(y, k, hq_params(cfg));
    return {std::move(x), k, std::move(per_level), std::move(trace)};
}

}  // namespace lrd
