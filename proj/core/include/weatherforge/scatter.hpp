#pragma once

#include "weatherforge/image.hpp"

namespace weatherforge::scatter {

// Medium transmission, samples in (0, 1].
struct TransmissionMap {
  ScalarMap map;
};

// Global atmospheric light and scattering coefficient.
struct Atmosphere {
  float light = 1.0f;  // A in [0, 1]
  float beta = 0.0f;   // 1/meter, >= 0
};

inline constexpr float kDefaultTransmissionFloor = 0.05f;

// t(x) = exp(-beta * d(x)). Depth in meters, samples >= 0.
// Throws DomainError naming the first offending pixel if a depth sample is
// negative, ConfigError if beta < 0.
TransmissionMap transmission_from_depth(const ScalarMap& depth, float beta);

// B(x) = J(x) * t(x) + A * (1 - t(x)) per channel. A convex combination, so
// the output stays in [0, 1] without clamping.
Image scattering_composite(const Image& scene, const TransmissionMap& t,
                           float light);

// J(x) = (B(x) - A * (1 - t')) / t' with t' = max(t(x), t_floor), clamped to
// [0, 1]. t_floor bounds the division; default 0.05.
Image scattering_invert(const Image& background, const TransmissionMap& t,
                        float light,
                        float t_floor = kDefaultTransmissionFloor);

}  // namespace weatherforge::scatter
