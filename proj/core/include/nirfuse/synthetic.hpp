#pragma once

#include <cstdint>
#include <vector>

#include "nirfuse/image.hpp"

namespace nirfuse::synthetic {

/// Linear ramp along direction `angle`, rescaled to [lo, hi].
ImagePlanar gradient_plane(int w, int h, double angle, double lo, double hi);

/// Two-level step across the line through the image center with normal
/// direction `angle`; `pos` in [-1,1] shifts the line along the normal.
ImagePlanar step_plane(int w, int h, double angle, double pos, double lo, double hi);

/// base + amp * sin(2*pi*(x*cos(angle)+y*sin(angle))/period + phase).
ImagePlanar sinusoid_plane(int w, int h, double period, double angle, double amp,
                           double phase, double base);

ImagePlanar checkerboard(int w, int h, int cell);

/// Uniform random plane in [lo, hi], seeded.
ImagePlanar random_plane(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 1.0);

/// Random mixture of a gradient, an optional step, and optional sinusoids,
/// clamped to [0,1]. This is the clean half of the training recipe.
ImagePlanar random_clean_plane(int w, int h, std::uint64_t seed);

inline constexpr std::uint64_t kDefaultCorpusSeed = 20240225;

struct TrainingCorpus {
  std::vector<ImagePlanar> clean;
  std::vector<ImagePlanar> noisy;  // clean counterparts + sigma=0.05 noise
};

/// The seeded corpus behind the builtin model: `count` clean planes and their
/// noised twins.
TrainingCorpus default_corpus(int count = 225, int w = 64, int h = 64,
                              std::uint64_t seed = kDefaultCorpusSeed);

}  // namespace nirfuse::synthetic
