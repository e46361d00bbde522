#pragma once

#include "lrdeblur/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace lrd {

/// Density proportional to exp(-gamma |x|^alpha) on [-1, 1].
struct HyperLaplacianSampler {
    double gamma = 10.0;
    double alpha = 0.5;
    std::uint64_t seed = 0;
};

/// Numeric CDF of |x| on a uniform grid over [0, 1].
class HyperLaplacianTable {
public:
    static constexpr double kResolution = 1e-6;

    HyperLaplacianTable(double gamma, double alpha);

    double draw(std::mt19937_64& rng) const;

private:
    std::vector<double> cdf_;
};

std::vector<double> sample_hyper_laplacian(int n, const HyperLaplacianSampler& s);

struct SingularSummary {
    double s_min = 0.0;
    double s_max = 0.0;
    double s_mean = 0.0;
};

/// Over the min(rows, cols) singular values.
SingularSummary singular_summary(const Matrix& t);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Per odd L: bounds of ||T_x(L)^+ n|| over unit n and statistics of it for Gaussian unit n.
/// Column s_min is the infimum over all unit n (0 whenever L < M, since T^+ then has a
/// null space); s_min_nonzero is the smallest nonzero singular value of T^+.
ExperimentReport experiment_noise_amplification(const Vector& x, const std::vector<int>& sizes, int trials,
                                                std::uint64_t seed);

/// Singular values of (T_{x+dx} + ...)^+ T_x - I per size, averaged over trials.
ExperimentReport experiment_perturbed_pseudoinverse(int m, const std::vector<int>& sizes, int trials,
                                                    const HyperLaplacianSampler& sampler, double rel_noise);

/// Full-rank frequency of T_x(M) for sampled x, plus two GF(2) analogs: a general Toeplitz
/// matrix with 2M-1 free bits and the banded T_x(M) pattern with M free bits.
ExperimentReport experiment_toeplitz_rank(int m, int trials, const HyperLaplacianSampler& sampler);

/// Numerical rank cutoff relative to the largest singular value.
inline constexpr double kRankRelTol = 1e-10;

/// Rank over GF(2) of a square 0/1 matrix.
int gf2_rank(std::vector<std::vector<std::uint8_t>> rows);

enum class Regularizer { L2Squared, L1, LAlpha, LogDet };

const char* to_string(Regularizer r);

struct RegularizerSpec {
    Regularizer kind = Regularizer::L1;
    /// Exponent for LAlpha, delta for LogDet.
    double param = 0.0;
};

/// l_p costs sum the sorted magnitudes, so any permutation of the entries yields the same bits.
double regularizer_cost(const RegularizerSpec& r, const Matrix& k);

/// Non-negative Gaussian noise, unit sum.
Matrix positive_noise_kernel(int rows, int cols, std::mt19937_64& rng);

/// Mean over trials of 1 + (cost(eps) - cost(0)) / |cost(0)| for (1 - eps) k + eps n.
ExperimentReport cost_ratio_curve(const Kernel& k_true, const std::vector<RegularizerSpec>& regs,
                                  const std::vector<double>& epsilons, int trials, std::uint64_t seed);

/// Log-det cost per size of unit-sum positive noise, the zero-padded truth, and a Gaussian PSF with std n/6.
ExperimentReport logdet_vs_size_curve(const Kernel& k_true, const std::vector<int>& sizes, std::uint64_t seed,
                                      double delta);

/// Column sums of a 2-D kernel (a unit-sum 1-D kernel).
Vector marginalize_kernel(const Kernel& k);

inline constexpr double kBlind1DLambda = 1e-2;

struct Blind1DResult {
    ExperimentReport summary;
    /// Long format: size, tap, raw, projected.
    ExperimentReport kernels;
};

/// 1-D alternation on the derivative of x_row at the truth size for iters - 1 rounds, then a
/// least-squares kernel step at every declared size from the same sparse estimate.
/// cfg.lambda applies to the 1-D data term directly; a single row carries far less energy
/// than a 2-D gradient field, so kBlind1DLambda is the matching default.
Blind1DResult experiment_1d_blind(const Vector& x_row, const Vector& k_true, const std::vector<int>& sizes, int iters,
                                  const DeblurConfig& cfg, double noise_std = 0.0);

}  // namespace lrd
