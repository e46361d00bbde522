#include "lrdeblur/synth.hpp"

#include "lrdeblur/convops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace lrd {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Vector default_signal_row() {
    constexpr int n = 255;
    Vector x(n);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        double v = 0.2;
        if (i >= 30) v = 0.75;
        if (i >= 70) v = 0.75 - 0.5 * (i - 70) / 40.0;
        if (i >= 110) v = 0.4;
        if (i >= 140) v = 0.4 + 0.35 * std::exp(-std::pow((i - 165) / 12.0, 2));
        if (i >= 195) v = 0.9;
        if (i >= 215) v = 0.1 + 0.05 * std::sin(12.0 * std::numbers::pi * t);
        x(i) = v;
    }
    return x;
}

Kernel motion_kernel(int size, std::uint64_t seed) {
    if (size < 3 || size % 2 == 0) throw std::invalid_argument("motion_kernel: size must be odd and >= 3");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    constexpr int steps = 64;
    std::vector<double> px(steps), py(steps);
    double vx = g(rng), vy = g(rng);
    double x = 0.0, y = 0.0;
    for (int s = 0; s < steps; ++s) {
        px[static_cast<size_t>(s)] = x;
        py[static_cast<size_t>(s)] = y;
        vx = 0.9 * vx + 0.5 * g(rng);
        vy = 0.9 * vy + 0.5 * g(rng);
        const double sp = std::hypot(vx, vy);
        if (sp > 0.0) {
            x += vx / sp;
            y += vy / sp;
        }
    }
    // Center the trajectory's mean on the middle tap; bilinear splatting keeps the mean,
    // so the kernel's center of mass lands exactly on the center.
    double cx = 0.0, cy = 0.0;
    for (int s = 0; s < steps; ++s) {
        cx += px[static_cast<size_t>(s)] / steps;
        cy += py[static_cast<size_t>(s)] / steps;
    }
    double reach = 1e-9;
    for (int s = 0; s < steps; ++s)
        reach = std::max({reach, std::abs(px[static_cast<size_t>(s)] - cx), std::abs(py[static_cast<size_t>(s)] - cy)});
    const double c = (size - 1) / 2.0;
    const double scale = (c - 1.0) / reach;
    Matrix w = Matrix::Zero(size, size);
    for (int s = 0; s < steps; ++s) {
        const double fx = c + (px[static_cast<size_t>(s)] - cx) * scale;
        const double fy = c + (py[static_cast<size_t>(s)] - cy) * scale;
        const int x0 = static_cast<int>(std::floor(fx)), y0 = static_cast<int>(std::floor(fy));
        const double ax = fx - x0, ay = fy - y0;
        w(y0, x0) += (1 - ax) * (1 - ay);
        w(y0, x0 + 1) += ax * (1 - ay);
        w(y0 + 1, x0) += (1 - ax) * ay;
        w(y0 + 1, x0 + 1) += ax * ay;
    }
    w /= w.sum();
    return Kernel(std::move(w));
}

Kernel gaussian_kernel(int size, double std_dev) {
    if (size < 1 || size % 2 == 0) throw std::invalid_argument("gaussian_kernel: size must be odd");
    if (!(std_dev > 0.0)) throw std::invalid_argument("gaussian_kernel: std must be positive");
    const int h = (size - 1) / 2;
    Matrix w(size, size);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j)
            w(i, j) = std::exp(-((i - h) * (i - h) + (j - h) * (j - h)) / (2.0 * std_dev * std_dev));
    w /= w.sum();
    return Kernel(std::move(w));
}

Image synthetic_image(int height, int width, std::uint64_t seed) {
    if (height < 1 || width < 1) throw std::invalid_argument("synthetic_image: empty size");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix img(height, width);
    const double gx = u(rng) - 0.5, gy = u(rng) - 0.5;
    for (int i = 0; i < height; ++i)
        for (int j = 0; j < width; ++j) img(i, j) = 0.5 + 0.3 * (gx * j / width + gy * i / height);
    // Rotated ellipses and triangles so edges come in every orientation.
    const int shapes = 6 + static_cast<int>((height * width) / 1200);
    const double scale = std::min(height, width);
    for (int s = 0; s < shapes; ++s) {
        const double level = 0.1 + 0.8 * u(rng);
        const double ci = u(rng) * height, cj = u(rng) * width;
        const double r1 = (0.06 + 0.2 * u(rng)) * scale, r2 = (0.06 + 0.2 * u(rng)) * scale;
        const double th = std::numbers::pi * u(rng);
        const double ct = std::cos(th), st = std::sin(th);
        if (u(rng) < 0.5) {
            for (int i = 0; i < height; ++i)
                for (int j = 0; j < width; ++j) {
                    const double a = ((i - ci) * ct + (j - cj) * st) / r1;
                    const double b = (-(i - ci) * st + (j - cj) * ct) / r2;
                    if (a * a + b * b <= 1.0) img(i, j) = level;
                }
        } else {
            double vi[3], vj[3];
            for (int v = 0; v < 3; ++v) {
                const double ang = th + 2.0 * std::numbers::pi * (v + 0.3 * (u(rng) - 0.5)) / 3.0;
                const double rad = v % 2 == 0 ? r1 : r2;
                vi[v] = ci + rad * std::cos(ang);
                vj[v] = cj + rad * std::sin(ang);
            }
            for (int i = 0; i < height; ++i)
                for (int j = 0; j < width; ++j) {
                    bool pos = false, neg = false;
                    for (int v = 0; v < 3; ++v) {
                        const int w = (v + 1) % 3;
                        const double cr = (vi[w] - vi[v]) * (j - vj[v]) - (vj[w] - vj[v]) * (i - vi[v]);
                        pos = pos || cr > 0.0;
                        neg = neg || cr < 0.0;
                    }
                    if (!(pos && neg)) img(i, j) = level;
                }
        }
    }
    return Image(img.cwiseMax(0.0).cwiseMin(1.0));
}

BlurredPair make_blurred_pair(int height, int width, const Kernel& k, double noise_std, std::uint64_t seed) {
    if (noise_std < 0.0) throw std::invalid_argument("make_blurred_pair: noise_std must be >= 0");
    const int pr = k.dims().half_rows(), pc = k.dims().half_cols();
    const Image canvas = synthetic_image(height + 2 * pr, width + 2 * pc, seed);
    const Matrix blurred = conv2(canvas.pixels(), k.weights(), BoundaryMode::Replicate);
    Matrix y = blurred.block(pr, pc, height, width);
    if (noise_std > 0.0) {
        std::mt19937_64 rng(derive_seed(seed, 1));
        std::normal_distribution<double> g(0.0, noise_std);
        for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] += g(rng);
    }
    return {Image(canvas.pixels().block(pr, pc, height, width)), Image(std::move(y))};
}

}  // namespace lrd
