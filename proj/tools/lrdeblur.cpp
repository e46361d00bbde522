#include "lrdeblur/analysis.hpp"
#include "lrdeblur/io.hpp"
#include "lrdeblur/kstep.hpp"
#include "lrdeblur/linalg.hpp"
#include "lrdeblur/metrics.hpp"
#include "lrdeblur/pipeline.hpp"
#include "lrdeblur/synth.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using namespace lrd;

std::string joined_command(int argc, char** argv) {
    std::string s = "lrdeblur";
    for (int i = 1; i < argc; ++i) s += std::string(" ") + argv[i];
    return s;
}

void apply_thread_env() {
    if (const char* t = std::getenv("LRD_THREADS")) {
        const int n = std::atoi(t);
        if (n < 1) throw std::invalid_argument("LRD_THREADS must be a positive integer");
        omp_set_num_threads(n);
    }
}

struct DeblurArgs {
    std::string input, config, out_image, out_kernel, out_kernel_png;
    int kernel_size = 0;
    int kernel_cols = 0;
    bool sigma0 = false;
    bool single_scale = false;
    std::vector<std::string> set;
};

int run_deblur(const DeblurArgs& a) {
    DeblurConfig cfg = default_config();
    if (!a.config.empty()) cfg = parse_config(read_file(a.config), cfg);
    for (const auto& kv : a.set) cfg = parse_config(kv, cfg);
    cfg.kernel_size = {a.kernel_size, a.kernel_cols > 0 ? a.kernel_cols : a.kernel_size};
    if (a.sigma0) {
        cfg.sigma = 0.0;
        cfg.mu = 0.0;
    }
    if (a.single_scale) cfg.pyramid_levels = 1;

    const Image y = load_image(a.input);
    const DeblurResult r = deblur_blind(y, cfg);

    const fs::path in(a.input);
    const std::string stem = (in.parent_path() / in.stem()).string();
    const std::string out_image = a.out_image.empty() ? stem + "_deblurred.png" : a.out_image;
    const std::string out_kernel = a.out_kernel.empty() ? stem + "_kernel.txt" : a.out_kernel;
    save_image(out_image, r.image);
    save_kernel(out_kernel, r.kernel);
    if (!a.out_kernel_png.empty()) save_kernel_png(a.out_kernel_png, r.kernel);
    std::cout << "image  " << out_image << "\nkernel " << out_kernel << "\n";
    return 0;
}

struct SimArgs {
    std::string out, out_kernels;
    std::uint64_t seed = 7;
    int trials = -1;
    int m = -1;
    std::vector<int> sizes;
    double gamma = 10.0;
    double alpha = 0.5;
    double rel_noise = 0.01;
    std::vector<double> eps{0.0, 0.05, 0.1, 0.15, 0.2};
    double delta = default_config().delta;
    int kernel_size = 23;
    std::uint64_t kernel_seed = 0;
    int iters = 50;
    double lambda = kBlind1DLambda;
    double noise_std = 0.0;
};

std::vector<int> odd_range(int lo, int hi) {
    std::vector<int> v;
    for (int L = lo; L <= hi; L += 2) v.push_back(L);
    return v;
}

template <class T>
T or_default(T v, T fallback) {
    return v < 0 ? fallback : v;
}

int run_simulate(const std::string& which, SimArgs a, const std::string& command) {
    if (which == "amplification") {
        if (a.sizes.empty()) a.sizes = odd_range(3, 31);
        save_report(a.out, experiment_noise_amplification(default_signal_row(), a.sizes, or_default(a.trials, 50), a.seed),
                    command);
    } else if (which == "perturbed") {
        if (a.sizes.empty()) a.sizes = {5, 9, 13, 17, 21};
        const HyperLaplacianSampler s{a.gamma, a.alpha, a.seed};
        save_report(a.out, experiment_perturbed_pseudoinverse(or_default(a.m, 64), a.sizes, or_default(a.trials, 30), s,
                                                              a.rel_noise),
                    command);
    } else if (which == "rank") {
        const HyperLaplacianSampler s{a.gamma, a.alpha, a.seed};
        save_report(a.out, experiment_toeplitz_rank(or_default(a.m, 21), or_default(a.trials, 1000), s), command);
    } else if (which == "cost-ratio") {
        const std::vector<RegularizerSpec> regs{{Regularizer::L2Squared, 0.0},
                                                {Regularizer::L1, 0.0},
                                                {Regularizer::LAlpha, a.alpha},
                                                {Regularizer::LogDet, a.delta}};
        save_report(a.out,
                    cost_ratio_curve(motion_kernel(a.kernel_size, a.kernel_seed), regs, a.eps, or_default(a.trials, 20),
                                     a.seed),
                    command);
    } else if (which == "logdet-size") {
        if (a.sizes.empty()) a.sizes = {23, 31, 39, 47, 55, 63};
        save_report(a.out, logdet_vs_size_curve(motion_kernel(a.kernel_size, a.kernel_seed), a.sizes, a.seed, a.delta),
                    command);
    } else if (which == "blind1d") {
        if (a.sizes.empty()) a.sizes = {23, 31, 47, 69};
        DeblurConfig cfg = default_config();
        cfg.lambda = a.lambda;
        cfg.seed = a.seed;
        const Blind1DResult r = experiment_1d_blind(default_signal_row(), marginalize_kernel(motion_kernel(a.kernel_size, a.kernel_seed)),
                                                    a.sizes, a.iters, cfg, a.noise_std);
        save_report(a.out, r.summary, command);
        if (!a.out_kernels.empty()) save_report(a.out_kernels, r.kernels, command);
    } else {
        throw std::invalid_argument("unknown experiment '" + which + "'");
    }
    std::cout << "report " << a.out << "\n";
    return 0;
}

struct EvalArgs {
    std::string est, gt, blurry, gt_kernel, est_kernel, config, out;
    double threshold = kDefaultSuccessThreshold;
};

int run_eval(const EvalArgs& a, const std::string& command) {
    DeblurConfig cfg = default_config();
    if (!a.config.empty()) cfg = parse_config(read_file(a.config), cfg);
    const Image est = load_image(a.est), gt = load_image(a.gt), y = load_image(a.blurry);
    const Kernel kgt = load_kernel(a.gt_kernel);
    const double err = error_ratio(est, gt, y, kgt, hq_params(cfg));
    const double p = psnr(est, gt);
    ExperimentReport r("eval", cfg.seed);
    r.set_param("threshold", a.threshold);
    r.add_column("err_ratio", {err});
    r.add_column("psnr_db", {p});
    r.add_column("success", {err <= a.threshold ? 1.0 : 0.0});
    std::printf("err_ratio %.6g\npsnr_db   %.4f\nsuccess   %d\n", err, p, err <= a.threshold ? 1 : 0);
    if (!a.est_kernel.empty()) {
        const Kernel kest = load_kernel(a.est_kernel);
        const double ssd = ssd_kernel_aligned(kest, kgt);
        r.add_column("ssd_kernel", {ssd});
        std::printf("ssd_kernel %.6g\n", ssd);
    }
    if (!a.out.empty()) save_report(a.out, r, command);
    return 0;
}

void print_values(const char* label, const Vector& s) {
    std::printf("%s", label);
    for (Eigen::Index i = 0; i < s.size(); ++i) std::printf(" %.10g", s(i));
    std::printf("\n");
}

int run_prox_demo(double tau, double delta, std::uint64_t seed) {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 0.1;
    std::printf("psi = z = diag(1, 0.1), tau = 0.05, delta = 0.01\n");
    print_values("  shrunk:", singular_values(prox_logdet(d, d, 0.05, 0.01)));
    std::printf("same input, tau = 2 (beyond s_max * (s_hat_max + delta))\n");
    print_values("  shrunk:", singular_values(prox_logdet(d, d, 2.0, 0.01)));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix psi(7, 7);
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi.data()[i] = nd(rng);
    std::printf("random 7x7 psi = z (seed %llu), tau = %g, delta = %g\n", static_cast<unsigned long long>(seed), tau,
                delta);
    print_values("  input: ", singular_values(psi));
    print_values("  shrunk:", singular_values(prox_logdet(psi, psi, tau, delta)));
    return 0;
}

struct SynthArgs {
    int height = 96, width = 96, kernel_size = 11;
    std::uint64_t image_seed = 100, kernel_seed = 0;
    double noise = 0.005;
    std::string out_blurry, out_sharp, out_kernel;
};

int run_synth(const SynthArgs& a) {
    const Kernel k = motion_kernel(a.kernel_size, a.kernel_seed);
    const BlurredPair p = make_blurred_pair(a.height, a.width, k, a.noise, a.image_seed);
    save_image(a.out_blurry, p.blurry, 16);
    if (!a.out_sharp.empty()) save_image(a.out_sharp, p.sharp, 16);
    if (!a.out_kernel.empty()) save_kernel(a.out_kernel, k);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blind deconvolution with a low-rank kernel prior"};
    app.require_subcommand(1);

    DeblurArgs da;
    auto* deblur = app.add_subcommand("deblur", "Estimate kernel and sharp image from a blurry image");
    deblur->add_option("input", da.input, "Blurry image (PGM or PNG)")->required()->check(CLI::ExistingFile);
    deblur->add_option("--kernel-size", da.kernel_size, "Kernel rows (odd)")->required();
    deblur->add_option("--kernel-cols", da.kernel_cols, "Kernel cols (odd, default: rows)");
    deblur->add_option("--config", da.config, "Config file of key = value lines")->check(CLI::ExistingFile);
    deblur->add_option("--set", da.set, "Config override key=value (repeatable)");
    deblur->add_flag("--sigma0", da.sigma0, "Disable the low-rank step (sigma = mu = 0)");
    deblur->add_flag("--single-scale", da.single_scale, "Skip the pyramid");
    deblur->add_option("--out-image", da.out_image, "Output image (.png or .pgm)");
    deblur->add_option("--out-kernel", da.out_kernel, "Output kernel text file");
    deblur->add_option("--out-kernel-png", da.out_kernel_png, "Kernel visualization, max-scaled");

    SimArgs sa;
    std::string which;
    auto* sim = app.add_subcommand("simulate", "Run a seeded numerical experiment and write a CSV report");
    sim->add_option("experiment", which, "amplification|perturbed|rank|cost-ratio|logdet-size|blind1d")
        ->required()
        ->check(CLI::IsMember({"amplification", "perturbed", "rank", "cost-ratio", "logdet-size", "blind1d"}));
    sim->add_option("--out", sa.out, "CSV output path")->required();
    sim->add_option("--seed", sa.seed, "Master seed");
    sim->add_option("--trials", sa.trials, "Trials (experiment default if omitted)");
    sim->add_option("--m", sa.m, "Signal length M");
    sim->add_option("--sizes", sa.sizes, "Comma-separated odd sizes")->delimiter(',');
    sim->add_option("--gamma", sa.gamma, "Hyper-Laplacian gamma");
    sim->add_option("--alpha", sa.alpha, "Hyper-Laplacian alpha, or the l_alpha exponent for cost-ratio");
    sim->add_option("--rel-noise", sa.rel_noise, "Relative perturbation for perturbed");
    sim->add_option("--eps", sa.eps, "Comma-separated noise fractions for cost-ratio")->delimiter(',');
    sim->add_option("--delta", sa.delta, "Log-det delta");
    sim->add_option("--kernel-size", sa.kernel_size, "Truth motion kernel size");
    sim->add_option("--kernel-seed", sa.kernel_seed, "Truth motion kernel seed");
    sim->add_option("--iters", sa.iters, "Alternations for blind1d");
    sim->add_option("--lambda", sa.lambda, "Sparsity weight for blind1d");
    sim->add_option("--noise-std", sa.noise_std, "Observation noise for blind1d");
    sim->add_option("--out-kernels", sa.out_kernels, "blind1d: long-format kernel CSV");

    EvalArgs ea;
    auto* ev = app.add_subcommand("eval", "Score a deblurred image against ground truth");
    ev->add_option("--est", ea.est, "Estimated sharp image")->required()->check(CLI::ExistingFile);
    ev->add_option("--gt", ea.gt, "Ground-truth sharp image")->required()->check(CLI::ExistingFile);
    ev->add_option("--blurry", ea.blurry, "Blurry input")->required()->check(CLI::ExistingFile);
    ev->add_option("--gt-kernel", ea.gt_kernel, "Ground-truth kernel text file")->required()->check(CLI::ExistingFile);
    ev->add_option("--est-kernel", ea.est_kernel, "Estimated kernel, adds aligned SSD")->check(CLI::ExistingFile);
    ev->add_option("--config", ea.config, "Config for the reference non-blind solve")->check(CLI::ExistingFile);
    ev->add_option("--threshold", ea.threshold, "Success threshold on the error ratio");
    ev->add_option("--out", ea.out, "Optional CSV output");

    double ptau = 0.5, pdelta = default_config().delta;
    std::uint64_t pseed = 1;
    auto* prox = app.add_subcommand("prox-demo", "Print singular values before and after the log-det prox");
    prox->add_option("--tau", ptau, "Shrink weight for the random example");
    prox->add_option("--delta", pdelta, "Delta for the random example");
    prox->add_option("--seed", pseed, "Seed for the random example");

    SynthArgs ya;
    auto* syn = app.add_subcommand("synth", "Write a synthetic blurry/sharp pair and its motion kernel");
    syn->add_option("--height", ya.height);
    syn->add_option("--width", ya.width);
    syn->add_option("--kernel-size", ya.kernel_size);
    syn->add_option("--image-seed", ya.image_seed);
    syn->add_option("--kernel-seed", ya.kernel_seed);
    syn->add_option("--noise", ya.noise);
    syn->add_option("--out-blurry", ya.out_blurry)->required();
    syn->add_option("--out-sharp", ya.out_sharp);
    syn->add_option("--out-kernel", ya.out_kernel);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        apply_thread_env();
        const std::string command = joined_command(argc, argv);
        if (*deblur) return run_deblur(da);
        if (*sim) return run_simulate(which, sa, command);
        if (*ev) return run_eval(ea, command);
        if (*prox) return run_prox_demo(ptau, pdelta, pseed);
        if (*syn) return run_synth(ya);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
