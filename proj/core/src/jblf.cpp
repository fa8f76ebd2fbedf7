#include "nirfuse/jblf.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nirfuse {

void JblfParams::validate() const {
  if (s <= 0.0) throw Error("jblf: spatial scale s must be > 0");
  if (r_threshold < 0.0) throw Error("jblf: threshold R must be >= 0");
  if (radius < 1) throw Error("jblf: window radius must be >= 1");
}

int jblf_radius_for_scale(double s, int cap) {
  const int r = static_cast<int>(std::ceil(3.0 * s));
  return std::clamp(r, 1, std::max(1, cap));
}

ImagePlanar joint_bilateral_threshold(const ImagePlanar& input, const ImagePlanar& guide,
                                      const JblfParams& params) {
  params.validate();
  if (input.channels() != 1 || guide.channels() != 1) {
    throw Error("jblf: input and guide must be single-plane");
  }
  if (!input.same_size(guide)) {
    throw Error("jblf: input " + std::to_string(input.width()) + "x" +
                std::to_string(input.height()) + " vs guide " + std::to_string(guide.width()) +
                "x" + std::to_string(guide.height()) + " dimension mismatch");
  }

  const int w = input.width();
  const int h = input.height();
  const int radius = params.radius;
  const int side = 2 * radius + 1;

  // Spatial kernel table over the full window.
  std::vector<double> spatial(static_cast<std::size_t>(side) * side);
  const double inv_2s2 = 1.0 / (2.0 * params.s * params.s);
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      spatial[static_cast<std::size_t>(dy + radius) * side + (dx + radius)] =
          std::exp(-(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy) * inv_2s2);
    }
  }

  ImagePlanar out(w, h, 1);
  const double* in = input.plane(0);
  const double* gd = guide.plane(0);
  double* dst = out.plane(0);
  const double R = params.r_threshold;

  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - radius);
    const int y1 = std::min(h - 1, y + radius);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - radius);
      const int x1 = std::min(w - 1, x + radius);
      const double gp = gd[static_cast<std::size_t>(y) * w + x];
      double acc = 0.0;
      double norm = 0.0;
      for (int qy = y0; qy <= y1; ++qy) {
        const std::size_t row = static_cast<std::size_t>(qy) * w;
        const double* srow = spatial.data() + static_cast<std::size_t>(qy - y + radius) * side +
                             (x0 - x + radius);
        for (int qx = x0; qx <= x1; ++qx) {
          if (std::abs(gd[row + qx] - gp) < R || (qx == x && qy == y)) {
            const double f = srow[qx - x0];
            acc += f * in[row + qx];
            norm += f;
          }
        }
      }
      dst[static_cast<std::size_t>(y) * w + x] = acc / norm;
    }
  }
  return out;
}

}  // namespace nirfuse
