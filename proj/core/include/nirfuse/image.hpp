#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nirfuse {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Planar floating-point image. Values are nominally in [0,1]; channels is 1
/// (luminance / NIR) or 3 (RGB). Plane c occupies data[c*w*h .. (c+1)*w*h).
class ImagePlanar {
 public:
  ImagePlanar() = default;
  ImagePlanar(int width, int height, int channels);
  ImagePlanar(int width, int height, int channels, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t plane_size() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  double* plane(int c) { return data_.data() + plane_size() * static_cast<std::size_t>(c); }
  const double* plane(int c) const {
    return data_.data() + plane_size() * static_cast<std::size_t>(c);
  }

  double& at(int c, int x, int y) { return plane(c)[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int c, int x, int y) const {
    return plane(c)[static_cast<std::size_t>(y) * width_ + x];
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_size(const ImagePlanar& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  /// Single-channel view of one plane (copies the plane).
  ImagePlanar extract_plane(int c) const;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// HSV triple with every plane in [0,1]. Hue is stored wrapped to [0,1),
/// h=1 normalizes to 0; zero-saturation pixels carry the canonical h=0.
struct HsvImage {
  ImagePlanar h;
  ImagePlanar s;
  ImagePlanar v;

  HsvImage(ImagePlanar h_, ImagePlanar s_, ImagePlanar v_);

  int width() const { return h.width(); }
  int height() const { return h.height(); }
};

HsvImage rgb_to_hsv(const ImagePlanar& rgb);
ImagePlanar hsv_to_rgb(const HsvImage& hsv);

/// Conversion used by the fusion stage: v is allowed to run out of [0,1]
/// (unclamped luminance sums); output channels are clamped.
ImagePlanar hsv_planes_to_rgb(const ImagePlanar& h, const ImagePlanar& s,
                              const ImagePlanar& v);

/// i.i.d. zero-mean Gaussian perturbation of every pixel, clamped to [0,1].
/// Deterministic for a fixed seed; sigma == 0 returns the input unchanged.
ImagePlanar add_gaussian_noise(const ImagePlanar& img, double sigma, std::uint64_t seed);

/// Separable Gaussian blur with replicate-edge padding. radius < 0 selects
/// ceil(3*sigma).
ImagePlanar gaussian_blur(const ImagePlanar& img, double sigma, int radius = -1);

}  // namespace nirfuse
