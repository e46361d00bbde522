#include "lrdeblur/analysis.hpp"

#include "lrdeblur/convops.hpp"
#include "lrdeblur/kstep.hpp"
#include "lrdeblur/linalg.hpp"
#include "lrdeblur/synth.hpp"
#include "lrdeblur/xstep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lrd {

namespace {

void check_sizes(const std::vector<int>& sizes, int m) {
    if (sizes.empty()) throw std::invalid_argument("sizes must be non-empty");
    for (int L : sizes) {
        if (L < 1 || L % 2 == 0) throw std::invalid_argument("sizes must be odd and positive");
        if (L > 2 * m - 1) throw std::invalid_argument("size exceeds 2M-1 for the signal length");
    }
}

std::string join_sizes(const std::vector<int>& sizes) {
    std::string s;
    for (std::size_t i = 0; i < sizes.size(); ++i) s += (i ? " " : "") + std::to_string(sizes[i]);
    return s;
}

Vector gaussian_unit(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = g(rng);
    return v / v.norm();
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

HyperLaplacianTable::HyperLaplacianTable(double gamma, double alpha) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("hyper-Laplacian: gamma must be > 0");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("hyper-Laplacian: alpha must be in (0, 1]");
    const auto n = static_cast<std::size_t>(std::llround(1.0 / kResolution));
    cdf_.resize(n + 1);
    cdf_[0] = 0.0;
    double prev = 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double f = std::exp(-gamma * std::pow(static_cast<double>(i) * kResolution, alpha));
        cdf_[i] = cdf_[i - 1] + 0.5 * (prev + f);
        prev = f;
    }
    const double total = cdf_.back();
    for (double& c : cdf_) c /= total;
}

double HyperLaplacianTable::draw(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double p = u(rng);
    const bool negative = u(rng) < 0.5;
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), p);
    double t = 1.0;
    if (it != cdf_.end()) {
        const auto i = static_cast<std::size_t>(it - cdf_.begin());
        const double lo = cdf_[i - 1], hi = cdf_[i];
        const double frac = hi > lo ? (p - lo) / (hi - lo) : 0.0;
        t = (static_cast<double>(i - 1) + frac) * kResolution;
    }
    return negative ? -t : t;
}

std::vector<double> sample_hyper_laplacian(int n, const HyperLaplacianSampler& s) {
    if (n < 1) throw std::invalid_argument("sample_hyper_laplacian: n must be >= 1");
    const HyperLaplacianTable table(s.gamma, s.alpha);
    std::mt19937_64 rng(s.seed);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (double& v : out) v = table.draw(rng);
    return out;
}

SingularSummary singular_summary(const Matrix& t) {
    const Vector s = singular_values(t);
    if (s.size() == 0) throw std::invalid_argument("singular_summary: empty matrix");
    return {s.minCoeff(), s.maxCoeff(), s.mean()};
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("spearman: need two equal-length series");
    const auto ra = ranks(a), rb = ranks(b);
    const double ma = mean_of(ra), mb = mean_of(rb);
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - mb) * (rb[i] - mb);
    }
    if (da == 0.0 || db == 0.0) return 0.0;
    return num / std::sqrt(da * db);
}

ExperimentReport experiment_noise_amplification(const Vector& x, const std::vector<int>& sizes, int trials,
                                                std::uint64_t seed) {
    const int m = static_cast<int>(x.size());
    check_sizes(sizes, m);
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    // One noise vector per trial, shared across sizes.
    std::vector<Vector> noise(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        noise[static_cast<std::size_t>(t)] = gaussian_unit(m, rng);
    }
    const std::size_t ns = sizes.size();
    std::vector<double> s_min(ns), s_min_nz(ns), s_max(ns), mean_n(ns), std_n(ns), min_n(ns), max_n(ns), within(ns);
    constexpr double slack = 1e-10;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < ns; ++i) {
        const int L = sizes[i];
        const Matrix pinv = pseudo_inverse(build_toeplitz_1d(as_span(x), L).entries);
        const Vector s = singular_values(pinv);
        const int rank = numerical_rank(pinv, kPinvRelTol);
        s_max[i] = s.size() ? s(0) : 0.0;
        s_min_nz[i] = rank > 0 ? s(rank - 1) : 0.0;
        // inf ||P n|| over unit n in R^M: zero unless P has M independent columns.
        s_min[i] = (rank == m) ? s(rank - 1) : 0.0;
        std::vector<double> norms(static_cast<std::size_t>(trials));
        int inside = 0;
        for (int t = 0; t < trials; ++t) {
            const double v = (pinv * noise[static_cast<std::size_t>(t)]).norm();
            norms[static_cast<std::size_t>(t)] = v;
            if (v >= s_min[i] * (1.0 - slack) && v <= s_max[i] * (1.0 + slack)) ++inside;
        }
        mean_n[i] = mean_of(norms);
        std_n[i] = std_of(norms);
        min_n[i] = *std::min_element(norms.begin(), norms.end());
        max_n[i] = *std::max_element(norms.begin(), norms.end());
        within[i] = static_cast<double>(inside) / trials;
    }
    ExperimentReport r("noise_amplification", seed);
    r.set_param("m", m);
    r.set_param("sizes", join_sizes(sizes));
    r.set_param("trials", trials);
    std::vector<double> ls(sizes.begin(), sizes.end());
    r.add_column("L", ls);
    r.add_column("s_min", s_min);
    r.add_column("s_min_nonzero", s_min_nz);
    r.add_column("s_max", s_max);
    r.add_column("mean_norm", mean_n);
    r.add_column("std_norm", std_n);
    r.add_column("min_norm", min_n);
    r.add_column("max_norm", max_n);
    r.add_column("within_bounds", within);
    return r;
}

ExperimentReport experiment_perturbed_pseudoinverse(int m, const std::vector<int>& sizes, int trials,
                                                    const HyperLaplacianSampler& sampler, double rel_noise) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    check_sizes(sizes, m);
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (!(rel_noise >= 0.0)) throw std::invalid_argument("rel_noise must be >= 0");
    const HyperLaplacianTable table(sampler.gamma, sampler.alpha);
    const std::size_t ns = sizes.size();
    std::vector<std::vector<SingularSummary>> res(static_cast<std::size_t>(trials), std::vector<SingularSummary>(ns));
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 rng(derive_seed(sampler.seed, static_cast<std::uint64_t>(t)));
        Vector x(m);
        for (int i = 0; i < m; ++i) x(i) = table.draw(rng);
        Vector dx = Vector::Zero(m);
        if (rel_noise > 0.0) dx = gaussian_unit(m, rng) * (rel_noise * x.norm());
        const Vector xp = x + dx;
        for (std::size_t i = 0; i < ns; ++i) {
            const int L = sizes[i];
            const Matrix tx = build_toeplitz_1d(as_span(x), L).entries;
            const Matrix tp = build_toeplitz_1d(as_span(xp), L).entries;
            const Matrix op = pseudo_inverse(tp) * tx - Matrix::Identity(L, L);
            res[static_cast<std::size_t>(t)][i] = singular_summary(op);
        }
    }
    ExperimentReport r("perturbed_pseudoinverse", sampler.seed);
    r.set_param("m", m);
    r.set_param("sizes", join_sizes(sizes));
    r.set_param("trials", trials);
    r.set_param("gamma", sampler.gamma);
    r.set_param("alpha", sampler.alpha);
    r.set_param("rel_noise", rel_noise);
    std::vector<double> ls(sizes.begin(), sizes.end());
    std::vector<double> mn_m(ns), mn_s(ns), mx_m(ns), mx_s(ns), me_m(ns), me_s(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        std::vector<double> a, b, c;
        for (const auto& tr : res) {
            a.push_back(tr[i].s_min);
            b.push_back(tr[i].s_max);
            c.push_back(tr[i].s_mean);
        }
        mn_m[i] = mean_of(a);
        mn_s[i] = std_of(a);
        mx_m[i] = mean_of(b);
        mx_s[i] = std_of(b);
        me_m[i] = mean_of(c);
        me_s[i] = std_of(c);
    }
    r.add_column("L", ls);
    r.add_column("s_min_mean", mn_m);
    r.add_column("s_min_std", mn_s);
    r.add_column("s_max_mean", mx_m);
    r.add_column("s_max_std", mx_s);
    r.add_column("s_mean_mean", me_m);
    r.add_column("s_mean_std", me_s);
    return r;
}

int gf2_rank(std::vector<std::vector<std::uint8_t>> rows) {
    if (rows.empty()) return 0;
    const std::size_t cols = rows.front().size();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && !rows[pivot][c]) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != rank && rows[r][c])
                for (std::size_t k = c; k < cols; ++k) rows[r][k] ^= rows[rank][k];
        ++rank;
    }
    return static_cast<int>(rank);
}

ExperimentReport experiment_toeplitz_rank(int m, int trials, const HyperLaplacianSampler& sampler) {
    if (m < 1 || m % 2 == 0) throw std::invalid_argument("toeplitz rank: M must be odd");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    const HyperLaplacianTable table(sampler.gamma, sampler.alpha);
    const int l = (m - 1) / 2;
    std::vector<int> real_rank(static_cast<std::size_t>(trials)), gf_general(static_cast<std::size_t>(trials)),
        gf_banded(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 rng(derive_seed(sampler.seed, static_cast<std::uint64_t>(t)));
        Vector x(m);
        for (int i = 0; i < m; ++i) x(i) = table.draw(rng);
        real_rank[static_cast<std::size_t>(t)] = numerical_rank(build_toeplitz_1d(as_span(x), m).entries, kRankRelTol);

        std::mt19937_64 bits(derive_seed(sampler.seed ^ 0x6f2ULL, static_cast<std::uint64_t>(t)));
        std::vector<std::uint8_t> diag(static_cast<std::size_t>(2 * m - 1));
        for (auto& b : diag) b = static_cast<std::uint8_t>(bits() & 1U);
        std::vector<std::vector<std::uint8_t>> g(static_cast<std::size_t>(m), std::vector<std::uint8_t>(m));
        std::vector<std::vector<std::uint8_t>> h(static_cast<std::size_t>(m), std::vector<std::uint8_t>(m, 0));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = diag[static_cast<std::size_t>(i - j + m - 1)];
                const int p = i + l - j;
                if (p >= 0 && p < m)
                    h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = diag[static_cast<std::size_t>(p)];
            }
        gf_general[static_cast<std::size_t>(t)] = gf2_rank(std::move(g));
        gf_banded[static_cast<std::size_t>(t)] = gf2_rank(std::move(h));
    }
    auto frac_full = [&](const std::vector<int>& r) {
        return static_cast<double>(std::count(r.begin(), r.end(), m)) / trials;
    };
    ExperimentReport r("toeplitz_rank", sampler.seed);
    r.set_param("m", m);
    r.set_param("trials", trials);
    r.set_param("gamma", sampler.gamma);
    r.set_param("alpha", sampler.alpha);
    r.set_param("rank_rel_tol", kRankRelTol);
    r.add_column("m", {static_cast<double>(m)});
    r.add_column("trials", {static_cast<double>(trials)});
    r.add_column("full_rank_fraction", {frac_full(real_rank)});
    r.add_column("min_rank", {static_cast<double>(*std::min_element(real_rank.begin(), real_rank.end()))});
    r.add_column("gf2_full_rank_fraction", {frac_full(gf_general)});
    r.add_column("gf2_banded_full_rank_fraction", {frac_full(gf_banded)});
    return r;
}

const char* to_string(Regularizer r) {
    switch (r) {
        case Regularizer::L2Squared: return "l2sq";
        case Regularizer::L1: return "l1";
        case Regularizer::LAlpha: return "lalpha";
        case Regularizer::LogDet: return "logdet";
    }
    return "?";
}

double regularizer_cost(const RegularizerSpec& r, const Matrix& k) {
    if (!k.allFinite()) throw std::invalid_argument("regularizer_cost: non-finite input");
    if (r.kind == Regularizer::LogDet) return logdet_cost(k, r.param);
    std::vector<double> v(k.data(), k.data() + k.size());
    for (double& e : v) {
        const double a = std::abs(e);
        switch (r.kind) {
            case Regularizer::L2Squared: e = a * a; break;
            case Regularizer::L1: e = a; break;
            case Regularizer::LAlpha: e = std::pow(a, r.param); break;
            case Regularizer::LogDet: break;
        }
    }
    std::sort(v.begin(), v.end());
    return std::accumulate(v.begin(), v.end(), 0.0);
}

Matrix positive_noise_kernel(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix n(rows, cols);
    for (Eigen::Index i = 0; i < n.size(); ++i) n.data()[i] = std::abs(g(rng));
    return n / n.sum();
}

ExperimentReport cost_ratio_curve(const Kernel& k_true, const std::vector<RegularizerSpec>& regs,
                                  const std::vector<double>& epsilons, int trials, std::uint64_t seed) {
    if (regs.empty() || epsilons.empty()) throw std::invalid_argument("cost_ratio_curve: empty inputs");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    for (double e : epsilons)
        if (!(e >= 0.0 && e < 1.0)) throw std::invalid_argument("cost_ratio_curve: epsilons must lie in [0, 1)");
    std::vector<double> base(regs.size());
    for (std::size_t r = 0; r < regs.size(); ++r) {
        base[r] = regularizer_cost(regs[r], k_true.weights());
        if (base[r] == 0.0) throw std::domain_error("cost_ratio_curve: cost(0) is zero, ratio undefined");
    }
    // sums[t][e][r]
    std::vector<std::vector<std::vector<double>>> ratio(
        static_cast<std::size_t>(trials),
        std::vector<std::vector<double>>(epsilons.size(), std::vector<double>(regs.size())));
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        const Matrix n = positive_noise_kernel(k_true.rows(), k_true.cols(), rng);
        for (std::size_t e = 0; e < epsilons.size(); ++e) {
            const Matrix mix = (1.0 - epsilons[e]) * k_true.weights() + epsilons[e] * n;
            for (std::size_t r = 0; r < regs.size(); ++r)
                ratio[static_cast<std::size_t>(t)][e][r] =
                    epsilons[e] == 0.0 ? 1.0
                                       : 1.0 + (regularizer_cost(regs[r], mix) - base[r]) / std::abs(base[r]);
        }
    }
    ExperimentReport rep("cost_ratio", seed);
    rep.set_param("trials", trials);
    rep.set_param("kernel_rows", k_true.rows());
    rep.set_param("kernel_cols", k_true.cols());
    for (const auto& r : regs) rep.set_param(std::string("param_") + to_string(r.kind), r.param);
    rep.add_column("epsilon", epsilons);
    for (std::size_t r = 0; r < regs.size(); ++r) {
        std::vector<double> col(epsilons.size());
        for (std::size_t e = 0; e < epsilons.size(); ++e) {
            double s = 0.0;
            for (int t = 0; t < trials; ++t) s += ratio[static_cast<std::size_t>(t)][e][r];
            col[e] = s / trials;
        }
        rep.add_column(std::string("ratio_") + to_string(regs[r].kind), std::move(col));
    }
    return rep;
}

ExperimentReport logdet_vs_size_curve(const Kernel& k_true, const std::vector<int>& sizes, std::uint64_t seed,
                                      double delta) {
    if (sizes.empty()) throw std::invalid_argument("logdet_vs_size_curve: empty sizes");
    const int need = std::max(k_true.rows(), k_true.cols());
    for (int n : sizes)
        if (n < need || n % 2 == 0) throw std::invalid_argument("logdet_vs_size_curve: sizes must be odd and cover the kernel");
    std::vector<double> noise(sizes.size()), padded(sizes.size()), gauss(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const int n = sizes[i];
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(n)));
        noise[i] = logdet_cost(positive_noise_kernel(n, n, rng), delta);
        Matrix p = Matrix::Zero(n, n);
        p.block((n - k_true.rows()) / 2, (n - k_true.cols()) / 2, k_true.rows(), k_true.cols()) = k_true.weights();
        padded[i] = logdet_cost(p, delta);
        gauss[i] = logdet_cost(gaussian_kernel(n, n / 6.0), delta);
    }
    ExperimentReport r("logdet_vs_size", seed);
    r.set_param("sizes", join_sizes(sizes));
    r.set_param("delta", delta);
    r.set_param("kernel_rows", k_true.rows());
    r.set_param("kernel_cols", k_true.cols());
    r.add_column("size", std::vector<double>(sizes.begin(), sizes.end()));
    r.add_column("logdet_noise", noise);
    r.add_column("logdet_padded_truth", padded);
    r.add_column("logdet_gaussian", gauss);
    return r;
}

Vector marginalize_kernel(const Kernel& k) { return k.weights().colwise().sum().transpose(); }

namespace {

// Matrix of x -> conv1d_zeropad(x, k) for signals of length m.
Matrix conv_matrix(const Vector& k, int m) {
    const int L = static_cast<int>(k.size()), l = (L - 1) / 2;
    Matrix a = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int p = std::max(0, i + l - L + 1); p <= std::min(m - 1, i + l); ++p) a(i, p) = k(i + l - p);
    return a;
}

Vector project_1d(const Vector& raw) {
    Vector p = raw.cwiseMax(0.0);
    const double s = p.sum();
    if (!(s > 0.0)) throw std::runtime_error("kernel annihilated");
    return p / s;
}

Vector xstep_1d(const Vector& y, const Vector& x0, const Vector& k, const DeblurConfig& cfg) {
    const int m = static_cast<int>(y.size());
    const Matrix a = conv_matrix(k, m);
    const double smax = singular_values(a)(0);
    const double step = 1.0 / (2.0 * 1.05 * smax * smax);
    Vector x = x0;
    for (int pass = 0; pass < cfg.xstep_reweights; ++pass) {
        double denom = x.norm();
        if (denom == 0.0) denom = y.norm();
        const double thr = cfg.lambda / denom * step;
        for (int it = 0; it < cfg.xstep_inner_iters; ++it) {
            const Vector grad = 2.0 * a.transpose() * (a * x - y);
            x = x - step * grad;
            for (int i = 0; i < m; ++i) x(i) = soft_threshold(x(i), thr);
        }
    }
    return x;
}

}  // namespace

Blind1DResult experiment_1d_blind(const Vector& x_row, const Vector& k_true, const std::vector<int>& sizes, int iters,
                                  const DeblurConfig& cfg, double noise_std) {
    const int m = static_cast<int>(x_row.size());
    const int lt = static_cast<int>(k_true.size());
    if (m < 3) throw std::invalid_argument("experiment_1d_blind: signal too short");
    if (lt < 1 || lt % 2 == 0) throw std::invalid_argument("experiment_1d_blind: truth length must be odd");
    if (iters < 1) throw std::invalid_argument("experiment_1d_blind: iters must be >= 1");
    if (!(noise_std >= 0.0)) throw std::invalid_argument("experiment_1d_blind: noise_std must be >= 0");
    check_sizes(sizes, m);
    for (int L : sizes)
        if (L < lt) throw std::invalid_argument("experiment_1d_blind: sizes must be at least the truth size");

    Vector g = Vector::Zero(m);
    for (int i = 0; i + 1 < m; ++i) g(i) = x_row(i + 1) - x_row(i);
    Vector y = conv1d_zeropad(as_span(g), as_span(k_true));
    if (noise_std > 0.0) {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> nd(0.0, noise_std);
        for (int i = 0; i < m; ++i) y(i) += nd(rng);
    }

    Vector k = Vector::Zero(lt);
    if (lt >= 3) {
        k((lt - 1) / 2) = 0.5;
        k((lt + 1) / 2) = 0.5;
    } else {
        k(0) = 1.0;
    }
    Vector x = y;
    for (int it = 1; it < iters; ++it) {
        x = xstep_1d(y, x, k, cfg);
        if (x.isZero(0.0)) throw std::runtime_error("experiment_1d_blind: sparse estimate is all zero, lambda too large");
        k = project_1d(pseudo_inverse_apply(build_toeplitz_1d(as_span(x), lt), y));
    }
    x = xstep_1d(y, x, k, cfg);
    if (x.isZero(0.0)) throw std::runtime_error("experiment_1d_blind: sparse estimate is all zero, lambda too large");

    const std::size_t ns = sizes.size();
    std::vector<Vector> raw(ns), proj(ns);
    std::vector<double> side(ns), ssd(ns), resid(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        const int L = sizes[i];
        const Toeplitz1D t = build_toeplitz_1d(as_span(x), L);
        raw[i] = pseudo_inverse_apply(t, y);
        proj[i] = project_1d(raw[i]);
        resid[i] = (t.entries * raw[i] - y).norm();
        const int off = (L - lt) / 2;
        double outside = 0.0, s = 0.0;
        for (int j = 0; j < L; ++j) {
            const bool in = j >= off && j < off + lt;
            if (!in) outside += proj[i](j);
            const double d = proj[i](j) - (in ? k_true(j - off) : 0.0);
            s += d * d;
        }
        side[i] = outside;
        ssd[i] = s;
    }

    Blind1DResult out{ExperimentReport("blind1d", cfg.seed), ExperimentReport("blind1d_kernels", cfg.seed)};
    for (ExperimentReport* r : {&out.summary, &out.kernels}) {
        r->set_param("m", m);
        r->set_param("truth_size", lt);
        r->set_param("sizes", join_sizes(sizes));
        r->set_param("iters", iters);
        r->set_param("lambda", cfg.lambda);
        r->set_param("xstep_reweights", cfg.xstep_reweights);
        r->set_param("xstep_inner_iters", cfg.xstep_inner_iters);
        r->set_param("noise_std", noise_std);
    }
    out.summary.add_column("size", std::vector<double>(sizes.begin(), sizes.end()));
    out.summary.add_column("side_lobe_mass", side);
    out.summary.add_column("ssd_to_truth", ssd);
    out.summary.add_column("residual", resid);
    std::vector<double> cs, ci, cr, cp;
    for (std::size_t i = 0; i < ns; ++i)
        for (int j = 0; j < sizes[i]; ++j) {
            cs.push_back(sizes[i]);
            ci.push_back(j);
            cr.push_back(raw[i](j));
            cp.push_back(proj[i](j));
        }
    out.kernels.add_column("size", cs);
    out.kernels.add_column("tap", ci);
    out.kernels.add_column("raw", cr);
    out.kernels.add_column("projected", cp);
    return out;
}

}  // namespace lrd
