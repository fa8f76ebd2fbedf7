#include "nirfuse/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace nirfuse::synthetic {

namespace {

constexpr double kPi = std::numbers::pi;

double projected(int x, int y, double angle) {
  return x * std::cos(angle) + y * std::sin(angle);
}

}  // namespace

ImagePlanar gradient_plane(int w, int h, double angle, double lo, double hi) {
  ImagePlanar img(w, h, 1);
  double pmin = std::numeric_limits<double>::infinity();
  double pmax = -pmin;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double p = projected(x, y, angle);
      pmin = std::min(pmin, p);
      pmax = std::max(pmax, p);
    }
  }
  const double range = (pmax > pmin) ? pmax - pmin : 1.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(0, x, y) = lo + (hi - lo) * (projected(x, y, angle) - pmin) / range;
    }
  }
  return img;
}

ImagePlanar step_plane(int w, int h, double angle, double pos, double lo, double hi) {
  ImagePlanar img(w, h, 1);
  const double cx = 0.5 * (w - 1);
  const double cy = 0.5 * (h - 1);
  const double half_span = 0.5 * std::max(w, h);
  const double shift = pos * half_span;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double p = (x - cx) * std::cos(angle) + (y - cy) * std::sin(angle);
      img.at(0, x, y) = (p < shift) ? lo : hi;
    }
  }
  return img;
}

ImagePlanar sinusoid_plane(int w, int h, double period, double angle, double amp,
                           double phase, double base) {
  ImagePlanar img(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(0, x, y) =
          base + amp * std::sin(2.0 * kPi * projected(x, y, angle) / period + phase);
    }
  }
  return img;
}

ImagePlanar checkerboard(int w, int h, int cell) {
  ImagePlanar img(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(0, x, y) = (((x / cell) + (y / cell)) % 2 == 0) ? 0.0 : 1.0;
    }
  }
  return img;
}

ImagePlanar random_plane(int w, int h, std::uint64_t seed, double lo, double hi) {
  ImagePlanar img(w, h, 1);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(lo, hi);
  for (double& v : img.data()) v = uni(rng);
  return img;
}

ImagePlanar random_clean_plane(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  const double angle = uni(rng) * 2.0 * kPi;
  const double grad_span = 0.25 + 0.2 * uni(rng);
  const double base_lo = 0.1 + 0.25 * uni(rng);
  ImagePlanar img = gradient_plane(w, h, angle, base_lo, base_lo + grad_span);

  // Every clean plane carries structure the way a photograph does: step
  // edges, locally textured patches, and smooth shading in between. The
  // shading slope and edge heights are kept in ranges where the smooth
  // regions form a sharp interior spike in the normalized variance
  // histogram; a bare ramp or an everywhere-busy plane loses that signature.
  const int steps = 1 + (uni(rng) < 0.4 ? 1 : 0);
  for (int k = 0; k < steps; ++k) {
    const double step_angle = uni(rng) * 2.0 * kPi;
    const double height = 0.08 + 0.14 * uni(rng);
    const double pos = (uni(rng) - 0.5) * 0.8;
    const ImagePlanar step = step_plane(w, h, step_angle, pos, 0.0, height);
    for (std::size_t i = 0; i < img.data().size(); ++i) img.data()[i] += step.data()[i];
  }
  const int waves = 1 + (uni(rng) < 0.5 ? 1 : 0);
  for (int k = 0; k < waves; ++k) {
    const double period = 4.0 + uni(rng) * 12.0;
    const double wangle = uni(rng) * 2.0 * kPi;
    const double amp = 0.03 + 0.07 * uni(rng);
    const double phase = uni(rng) * 2.0 * kPi;
    // texture confined to an elliptical patch
    const double cx = w * (0.2 + 0.6 * uni(rng));
    const double cy = h * (0.2 + 0.6 * uni(rng));
    const double rx = w * (0.12 + 0.2 * uni(rng));
    const double ry = h * (0.12 + 0.2 * uni(rng));
    const ImagePlanar wave = sinusoid_plane(w, h, period, wangle, amp, phase, 0.0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double dx = (x - cx) / rx;
        const double dy = (y - cy) / ry;
        img.at(0, x, y) += wave.at(0, x, y) * std::exp(-0.5 * (dx * dx + dy * dy));
      }
    }
  }
  for (double& v : img.data()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

TrainingCorpus default_corpus(int count, int w, int h, std::uint64_t seed) {
  TrainingCorpus corpus;
  corpus.clean.reserve(count);
  corpus.noisy.reserve(count);
  for (int i = 0; i < count; ++i) {
    ImagePlanar clean = random_clean_plane(w, h, seed + static_cast<std::uint64_t>(i));
    corpus.noisy.push_back(
        add_gaussian_noise(clean, 0.05, seed ^ (0x9e3779b97f4a7c15ULL + i)));
    corpus.clean.push_back(std::move(clean));
  }
  return corpus;
}

}  // namespace nirfuse::synthetic
