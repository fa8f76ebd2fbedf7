#include "nirfuse/image.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nirfuse {

namespace {

void check_dims(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    throw Error("image dimensions must be at least 1x1, got " + std::to_string(width) + "x" +
                std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw Error("channel count must be 1 or 3, got " + std::to_string(channels));
  }
}

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

ImagePlanar::ImagePlanar(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  check_dims(width, height, channels);
  data_.assign(plane_size() * static_cast<std::size_t>(channels), 0.0);
}

ImagePlanar::ImagePlanar(int width, int height, int channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_dims(width, height, channels);
  const std::size_t expected = plane_size() * static_cast<std::size_t>(channels);
  if (data_.size() != expected) {
    throw Error("image data length " + std::to_string(data_.size()) + " does not match " +
                std::to_string(expected));
  }
}

ImagePlanar ImagePlanar::extract_plane(int c) const {
  if (c < 0 || c >= channels_) {
    throw Error("plane index " + std::to_string(c) + " out of range");
  }
  std::vector<double> out(plane(c), plane(c) + plane_size());
  return ImagePlanar(width_, height_, 1, std::move(out));
}

HsvImage::HsvImage(ImagePlanar h_, ImagePlanar s_, ImagePlanar v_)
    : h(std::move(h_)), s(std::move(s_)), v(std::move(v_)) {
  if (h.channels() != 1 || s.channels() != 1 || v.channels() != 1) {
    throw Error("HSV planes must be single-channel");
  }
  if (!h.same_size(s) || !h.same_size(v)) {
    throw Error("HSV planes must share dimensions");
  }
  for (const ImagePlanar* p : {&h, &s, &v}) {
    for (double value : p->data()) {
      if (!(value >= 0.0 && value <= 1.0)) {
        throw Error("HSV plane value " + std::to_string(value) + " outside [0,1]");
      }
    }
  }
}

HsvImage rgb_to_hsv(const ImagePlanar& rgb) {
  if (rgb.channels() != 3) {
    throw Error("rgb_to_hsv expects a 3-channel image, got " +
                std::to_string(rgb.channels()));
  }
  const std::size_t n = rgb.plane_size();
  const double* r = rgb.plane(0);
  const double* g = rgb.plane(1);
  const double* b = rgb.plane(2);
  std::vector<double> h(n), s(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rc = clamp01(r[i]);
    const double gc = clamp01(g[i]);
    const double bc = clamp01(b[i]);
    const double mx = std::max({rc, gc, bc});
    const double mn = std::min({rc, gc, bc});
    const double delta = mx - mn;
    v[i] = mx;
    s[i] = (mx > 0.0) ? delta / mx : 0.0;
    double hue = 0.0;
    if (delta > 0.0) {
      if (mx == rc) {
        hue = (gc - bc) / delta;  // in (-1, 1)
        if (hue < 0.0) hue += 6.0;
      } else if (mx == gc) {
        hue = (bc - rc) / delta + 2.0;
      } else {
        hue = (rc - gc) / delta + 4.0;
      }
      hue /= 6.0;
      if (hue >= 1.0) hue -= 1.0;  // wrap h=1 to 0
    }
    h[i] = hue;
  }
  return HsvImage(ImagePlanar(rgb.width(), rgb.height(), 1, std::move(h)),
                  ImagePlanar(rgb.width(), rgb.height(), 1, std::move(s)),
                  ImagePlanar(rgb.width(), rgb.height(), 1, std::move(v)));
}

ImagePlanar hsv_planes_to_rgb(const ImagePlanar& h, const ImagePlanar& s,
                              const ImagePlanar& v) {
  if (h.channels() != 1 || s.channels() != 1 || v.channels() != 1 || !h.same_size(s) ||
      !h.same_size(v)) {
    throw Error("hsv_planes_to_rgb expects three matching single-channel planes");
  }
  const std::size_t n = h.plane_size();
  ImagePlanar rgb(h.width(), h.height(), 3);
  double* r = rgb.plane(0);
  double* g = rgb.plane(1);
  double* b = rgb.plane(2);
  const double* hp = h.plane(0);
  const double* sp = s.plane(0);
  const double* vp = v.plane(0);
  for (std::size_t i = 0; i < n; ++i) {
    const double val = vp[i];
    const double sat = clamp01(sp[i]);
    double hue = hp[i] - std::floor(hp[i]);  // [0,1); maps h=1 to 0
    double rr, gg, bb;
    if (sat == 0.0) {
      rr = gg = bb = val;
    } else {
      const double h6 = hue * 6.0;
      const int sector = static_cast<int>(h6) % 6;
      const double f = h6 - std::floor(h6);
      const double p = val * (1.0 - sat);
      const double q = val * (1.0 - sat * f);
      const double t = val * (1.0 - sat * (1.0 - f));
      switch (sector) {
        case 0: rr = val; gg = t; bb = p; break;
        case 1: rr = q; gg = val; bb = p; break;
        case 2: rr = p; gg = val; bb = t; break;
        case 3: rr = p; gg = q; bb = val; break;
        case 4: rr = t; gg = p; bb = val; break;
        default: rr = val; gg = p; bb = q; break;
      }
    }
    r[i] = clamp01(rr);
    g[i] = clamp01(gg);
    b[i] = clamp01(bb);
  }
  return rgb;
}

ImagePlanar hsv_to_rgb(const HsvImage& hsv) {
  return hsv_planes_to_rgb(hsv.h, hsv.s, hsv.v);
}

ImagePlanar add_gaussian_noise(const ImagePlanar& img, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) {
    throw Error("noise sigma must be nonnegative, got " + std::to_string(sigma));
  }
  if (sigma == 0.0) return img;
  ImagePlanar out = img;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (double& v : out.data()) {
    v = clamp01(v + gauss(rng));
  }
  return out;
}

ImagePlanar gaussian_blur(const ImagePlanar& img, double sigma, int radius) {
  if (sigma <= 0.0) {
    throw Error("blur sigma must be positive, got " + std::to_string(sigma));
  }
  if (radius < 0) radius = static_cast<int>(std::ceil(3.0 * sigma));
  if (radius == 0) return img;

  std::vector<double> kernel(static_cast<std::size_t>(radius) + 1);
  double sum = 0.0;
  for (int k = 0; k <= radius; ++k) {
    kernel[k] = std::exp(-0.5 * (static_cast<double>(k) * k) / (sigma * sigma));
    sum += (k == 0) ? kernel[k] : 2.0 * kernel[k];
  }
  for (double& k : kernel) k /= sum;

  const int w = img.width();
  const int h = img.height();
  ImagePlanar tmp(w, h, img.channels());
  ImagePlanar out(w, h, img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    const double* src = img.plane(c);
    double* mid = tmp.plane(c);
    // horizontal pass, replicate edges
    for (int y = 0; y < h; ++y) {
      const double* row = src + static_cast<std::size_t>(y) * w;
      double* orow = mid + static_cast<std::size_t>(y) * w;
      for (int x = 0; x < w; ++x) {
        double acc = kernel[0] * row[x];
        for (int k = 1; k <= radius; ++k) {
          const int xl = std::max(0, x - k);
          const int xr = std::min(w - 1, x + k);
          acc += kernel[k] * (row[xl] + row[xr]);
        }
        orow[x] = acc;
      }
    }
    // vertical pass
    const double* msrc = tmp.plane(c);
    double* dst = out.plane(c);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = kernel[0] * msrc[static_cast<std::size_t>(y) * w + x];
        for (int k = 1; k <= radius; ++k) {
          const int yu = std::max(0, y - k);
          const int yd = std::min(h - 1, y + k);
          acc += kernel[k] * (msrc[static_cast<std::size_t>(yu) * w + x] +
                              msrc[static_cast<std::size_t>(yd) * w + x]);
        }
        dst[static_cast<std::size_t>(y) * w + x] = acc;
      }
    }
  }
  return out;
}

}  // namespace nirfuse
