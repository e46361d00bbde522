#pragma once

#include "lrdeblur/types.hpp"

#include <cstdint>

namespace lrd {

/// splitmix64 finalizer; derives independent stream seeds from (seed, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// 255-sample piecewise-smooth test row in [0,1] (steps, ramps and a smooth bump).
Vector default_signal_row();

/// Camera-shake style kernel: a smoothed random walk rasterized into size x size.
Kernel motion_kernel(int size, std::uint64_t seed);

/// Isotropic Gaussian on size x size, unit sum.
Kernel gaussian_kernel(int size, double std_dev);

/// Piecewise-constant shapes on a smooth background, values in [0,1].
Image synthetic_image(int height, int width, std::uint64_t seed);

struct BlurredPair {
    Image sharp;
    Image blurry;
};

/// Blurs a larger canvas with replicated borders and crops the center, so the observation
/// has no periodic wrap; adds Gaussian noise of the given standard deviation.
BlurredPair make_blurred_pair(int height, int width, const Kernel& k, double noise_std, std::uint64_t seed);

}  // namespace lrd
