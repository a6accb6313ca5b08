#pragma once

#include <string>

#include "weatherforge/image.hpp"

namespace weatherforge::metrics {

// rgb: computed over all three channels (dehazing/desnowing convention);
// y: computed on the BT.601 luma channel (deraining convention).
enum class ChannelMode { Rgb, Y };

std::string to_string(ChannelMode m);
ChannelMode channel_mode_from_string(const std::string& s);

// 10 * log10(1 / MSE) with peak 1.0. Identical images give +infinity.
double psnr(const Image& a, const Image& b, ChannelMode mode = ChannelMode::Rgb);

// Gaussian-window SSIM (window 11, sigma 1.5, K1 = 0.01, K2 = 0.03, L = 1),
// valid-region windows only, mean over positions; rgb mode averages the
// per-channel scores. Requires both dimensions >= 11.
double ssim(const Image& a, const Image& b, ChannelMode mode = ChannelMode::Rgb);

}  // namespace weatherforge::metrics
