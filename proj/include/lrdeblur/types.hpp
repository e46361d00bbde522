#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lrd {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Odd kernel extent (rows = L, cols = K).
struct KernelDims {
    int rows = 1;
    int cols = 1;

    int half_rows() const { return (rows - 1) / 2; }
    int half_cols() const { return (cols - 1) / 2; }
    bool is_odd() const { return rows > 0 && cols > 0 && rows % 2 == 1 && cols % 2 == 1; }
    bool operator==(const KernelDims&) const = default;
};

/// Grayscale intensity grid. Non-empty and finite; immutable after construction.
class Image {
public:
    explicit Image(Matrix pixels);
    Image(int height, int width, double fill = 0.0);

    int height() const { return static_cast<int>(pixels_.rows()); }
    int width() const { return static_cast<int>(pixels_.cols()); }
    double operator()(int r, int c) const { return pixels_(r, c); }
    const Matrix& pixels() const { return pixels_; }
    std::span<const double> data() const { return {pixels_.data(), static_cast<size_t>(pixels_.size())}; }

private:
    Matrix pixels_;
};

/// Blur kernel: odd dimensions, non-negative weights summing to one.
class Kernel {
public:
    /// Throws std::invalid_argument unless `weights` already satisfies the invariants.
    explicit Kernel(Matrix weights);

    /// Unit impulse at the center.
    static Kernel delta(KernelDims dims);

    int rows() const { return static_cast<int>(w_.rows()); }
    int cols() const { return static_cast<int>(w_.cols()); }
    KernelDims dims() const { return {rows(), cols()}; }
    double operator()(int r, int c) const { return w_(r, c); }
    const Matrix& weights() const { return w_; }

private:
    Matrix w_;
};

inline constexpr double kKernelSumTolerance = 1e-9;

/// Horizontal and vertical derivative images of the same extent.
struct GradientPair {
    GradientPair(Image h, Image v);

    Image horiz;
    Image vert;
};

/// All tunables of the blind deconvolution pipeline.
struct DeblurConfig {
    /// Image-prior weight. With scale_lambda the x-step uses lambda * ||grad y||^2 / sqrt(pixels)
    /// on each level, so the balance does not depend on contrast or image size.
    double lambda = 1.0;
    bool scale_lambda = true;
    double sigma = 1.0;
    double mu = 1.0;
    double tau = 5e-5;
    double delta = 1e-3;
    /// Accepted for completeness; no stage reads it.
    double eta = 0.0;
    int outer_iter_max = 20;
    int cg_iter_max = 3;
    int inner_iter_max = 10;
    /// Alternations of x-step and k-step per pyramid level.
    int iter_max = 15;
    int xstep_reweights = 2;
    int xstep_inner_iters = 10;
    int pyramid_levels = 7;
    double pyramid_factor = 0.70710678118654752;
    KernelDims kernel_size{23, 23};
    double threshold_ratio = 0.05;
    bool recenter_kernel = true;
    double nb_alpha = 2.0 / 3.0;
    double nb_lambda = 2000.0;
    std::uint64_t seed = 0;

    bool operator==(const DeblurConfig&) const = default;
};

DeblurConfig default_config();

/// Every invariant violation; empty means the config is usable.
std::vector<std::string> validate_config(const DeblurConfig& c);

/// `key = value` lines with `#` comments. Unknown keys and malformed values throw.
DeblurConfig parse_config(const std::string& text, DeblurConfig base = default_config());
std::string format_config(const DeblurConfig& c);
/// Applies one `key = value` assignment; throws std::invalid_argument on bad input.
void set_config_value(DeblurConfig& c, const std::string& key, const std::string& value);

/// Tabular result of an analysis run. Columns share one length.
class ExperimentReport {
public:
    ExperimentReport(std::string name, std::uint64_t seed) : name_(std::move(name)), seed_(seed) {}

    void set_param(const std::string& key, const std::string& value);
    void set_param(const std::string& key, double value);
    void add_column(std::string name, std::vector<double> values);

    const std::string& name() const { return name_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<std::pair<std::string, std::string>>& params() const { return params_; }
    const std::vector<std::pair<std::string, std::vector<double>>>& columns() const { return columns_; }
    std::size_t rows() const { return columns_.empty() ? 0 : columns_.front().second.size(); }

    /// Throws std::out_of_range for an unknown column.
    const std::vector<double>& column(const std::string& name) const;
    std::string param(const std::string& key) const;

private:
    std::string name_;
    std::uint64_t seed_;
    std::vector<std::pair<std::string, std::string>> params_;
    std::vector<std::pair<std::string, std::vector<double>>> columns_;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace lrd
