#include "lrdeblur/types.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lrd {

namespace {

bool all_finite(const Matrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i)
        if (!std::isfinite(m.data()[i])) return false;
    return true;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    if (!v.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || !std::isfinite(out))
        throw std::invalid_argument("config: bad number for '" + key + "': " + v);
    return out;
}

long long parse_int(const std::string& key, const std::string& v) {
    long long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw std::invalid_argument("config: bad integer for '" + key + "': " + v);
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: bad boolean for '" + key + "': " + v);
}

int to_count(const std::string& key, const std::string& v) {
    const long long n = parse_int(key, v);
    if (n < INT32_MIN || n > INT32_MAX) throw std::invalid_argument("config: out of range for '" + key + "'");
    return static_cast<int>(n);
}

}  // namespace

Image::Image(Matrix pixels) : pixels_(std::move(pixels)) {
    if (pixels_.rows() < 1 || pixels_.cols() < 1) throw std::invalid_argument("image must be at least 1x1");
    if (!all_finite(pixels_)) throw std::invalid_argument("image contains non-finite values");
}

Image::Image(int height, int width, double fill) {
    if (height < 1 || width < 1) throw std::invalid_argument("image must be at least 1x1");
    if (!std::isfinite(fill)) throw std::invalid_argument("image contains non-finite values");
    pixels_ = Matrix::Constant(height, width, fill);
}

Kernel::Kernel(Matrix weights) : w_(std::move(weights)) {
    if (!KernelDims{static_cast<int>(w_.rows()), static_cast<int>(w_.cols())}.is_odd())
        throw std::invalid_argument("kernel dims must be odd");
    if (!all_finite(w_)) throw std::invalid_argument("kernel contains non-finite values");
    if ((w_.array() < 0.0).any()) throw std::invalid_argument("kernel weights must be non-negative");
    if (std::abs(w_.sum() - 1.0) > kKernelSumTolerance) throw std::invalid_argument("kernel weights must sum to one");
}

Kernel Kernel::delta(KernelDims dims) {
    if (!dims.is_odd()) throw std::invalid_argument("kernel dims must be odd");
    Matrix w = Matrix::Zero(dims.rows, dims.cols);
    w(dims.half_rows(), dims.half_cols()) = 1.0;
    return Kernel(std::move(w));
}

GradientPair::GradientPair(Image h, Image v) : horiz(std::move(h)), vert(std::move(v)) {
    if (horiz.height() != vert.height() || horiz.width() != vert.width())
        throw std::invalid_argument("gradient channels must share dimensions");
}

DeblurConfig default_config() { return DeblurConfig{}; }

std::vector<std::string> validate_config(const DeblurConfig& c) {
    std::vector<std::string> errs;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) errs.push_back(std::string(name) + " must be positive");
    };
    auto count = [&](int v, const char* name) {
        if (v < 1) errs.push_back(std::string(name) + " must be >= 1");
    };
    positive(c.lambda, "lambda");
    if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma)) errs.emplace_back("sigma must be non-negative");
    if (!(c.mu >= 0.0) || !std::isfinite(c.mu)) errs.emplace_back("mu must be non-negative");
    positive(c.tau, "tau");
    positive(c.delta, "delta");
    if (!std::isfinite(c.eta)) errs.emplace_back("eta must be finite");
    count(c.outer_iter_max, "outer_iter_max");
    count(c.cg_iter_max, "cg_iter_max");
    count(c.inner_iter_max, "inner_iter_max");
    count(c.iter_max, "iter_max");
    count(c.xstep_reweights, "xstep_reweights");
    count(c.xstep_inner_iters, "xstep_inner_iters");
    count(c.pyramid_levels, "pyramid_levels");
    if (!(c.pyramid_factor > 0.0 && c.pyramid_factor < 1.0)) errs.emplace_back("pyramid_factor must be in (0,1)");
    if (!c.kernel_size.is_odd()) errs.emplace_back("kernel dims must be odd");
    if (!(c.threshold_ratio >= 0.0 && c.threshold_ratio < 1.0)) errs.emplace_back("threshold_ratio must be in [0,1)");
    if (!(c.nb_alpha == 0.5 || c.nb_alpha == 2.0 / 3.0)) errs.emplace_back("nb_alpha must be 1/2 or 2/3");
    positive(c.nb_lambda, "nb_lambda");
    return errs;
}

void set_config_value(DeblurConfig& c, const std::string& key, const std::string& value) {
    const std::string& v = value;
    if (key == "lambda") c.lambda = parse_double(key, v);
    else if (key == "sigma") c.sigma = parse_double(key, v);
    else if (key == "mu") c.mu = parse_double(key, v);
    else if (key == "tau") c.tau = parse_double(key, v);
    else if (key == "delta") c.delta = parse_double(key, v);
    else if (key == "eta") c.eta = parse_double(key, v);
    else if (key == "outer_iter_max") c.outer_iter_max = to_count(key, v);
    else if (key == "cg_iter_max") c.cg_iter_max = to_count(key, v);
    else if (key == "inner_iter_max") c.inner_iter_max = to_count(key, v);
    else if (key == "iter_max") c.iter_max = to_count(key, v);
    else if (key == "xstep_reweights") c.xstep_reweights = to_count(key, v);
    else if (key == "xstep_inner_iters") c.xstep_inner_iters = to_count(key, v);
    else if (key == "pyramid_levels") c.pyramid_levels = to_count(key, v);
    else if (key == "pyramid_factor") c.pyramid_factor = parse_double(key, v);
    else if (key == "kernel_rows") c.kernel_size.rows = to_count(key, v);
    else if (key == "kernel_cols") c.kernel_size.cols = to_count(key, v);
    else if (key == "threshold_ratio") c.threshold_ratio = parse_double(key, v);
    else if (key == "recenter_kernel") c.recenter_kernel = parse_bool(key, v);
    else if (key == "scale_lambda") c.scale_lambda = parse_bool(key, v);
    else if (key == "nb_alpha") c.nb_alpha = parse_double(key, v);
    else if (key == "nb_lambda") c.nb_lambda = parse_double(key, v);
    else if (key == "seed") {
        std::uint64_t s = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
        if (ec != std::errc() || ptr != v.data() + v.size())
            throw std::invalid_argument("config: bad seed: " + v);
        c.seed = s;
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

DeblurConfig parse_config(const std::string& text, DeblurConfig base) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected 'key = value'");
        set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

std::string format_config(const DeblurConfig& c) {
    std::ostringstream o;
    o << "# lrdeblur configuration\n";
    o << "lambda = " << format_double(c.lambda) << '\n';
    o << "sigma = " << format_double(c.sigma) << '\n';
    o << "mu = " << format_double(c.mu) << '\n';
    o << "tau = " << format_double(c.tau) << '\n';
    o << "delta = " << format_double(c.delta) << '\n';
    o << "eta = " << format_double(c.eta) << '\n';
    o << "outer_iter_max = " << c.outer_iter_max << '\n';
    o << "cg_iter_max = " << c.cg_iter_max << '\n';
    o << "inner_iter_max = " << c.inner_iter_max << '\n';
    o << "iter_max = " << c.iter_max << '\n';
    o << "xstep_reweights = " << c.xstep_reweights << '\n';
    o << "xstep_inner_iters = " << c.xstep_inner_iters << '\n';
    o << "pyramid_levels = " << c.pyramid_levels << '\n';
    o << "pyramid_factor = " << format_double(c.pyramid_factor) << '\n';
    o << "kernel_rows = " << c.kernel_size.rows << '\n';
    o << "kernel_cols = " << c.kernel_size.cols << '\n';
    o << "threshold_ratio = " << format_double(c.threshold_ratio) << '\n';
    o << "recenter_kernel = " << (c.recenter_kernel ? "true" : "false") << '\n';
    o << "scale_lambda = " << (c.scale_lambda ? "true" : "false") << '\n';
    o << "nb_alpha = " << format_double(c.nb_alpha) << '\n';
    o << "nb_lambda = " << format_double(c.nb_lambda) << '\n';
    o << "seed = " << c.seed << '\n';
    return o.str();
}

void ExperimentReport::set_param(const std::string& key, const std::string& value) {
    for (auto& [k, v] : params_) {
        if (k == key) {
            v = value;
            return;
        }
    }
    params_.emplace_back(key, value);
}

void ExperimentReport::set_param(const std::string& key, double value) { set_param(key, format_double(value)); }

void ExperimentReport::add_column(std::string name, std::vector<double> values) {
    if (!columns_.empty() && values.size() != columns_.front().second.size())
        throw std::invalid_argument("report column '" + name + "' has mismatched length");
    for (const auto& [n, _] : columns_)
        if (n == name) throw std::invalid_argument("duplicate report column '" + name + "'");
    columns_.emplace_back(std::move(name), std::move(values));
}

const std::vector<double>& ExperimentReport::column(const std::string& name) const {
    for (const auto& [n, v] : columns_)
        if (n == name) return v;
    throw std::out_of_range("no report column '" + name + "'");
}

std::string ExperimentReport::param(const std::string& key) const {
    for (const auto& [k, v] : params_)
        if (k == key) return v;
    throw std::out_of_range("no report param '" + key + "'");
}

}  // namespace lrd
