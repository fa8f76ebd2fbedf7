#include <doctest.h>

#include <cmath>
#include <random>

#include "nirfuse/image.hpp"

using namespace nirfuse;

namespace {

ImagePlanar random_rgb(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  ImagePlanar img(w, h, 3);
  for (double& v : img.data()) v = uni(rng);
  return img;
}

}  // namespace

TEST_CASE("ImagePlanar invariants") {
  CHECK_THROWS_AS(ImagePlanar(0, 4, 1), Error);
  CHECK_THROWS_AS(ImagePlanar(4, 0, 1), Error);
  CHECK_THROWS_AS(ImagePlanar(4, 4, 2), Error);
  CHECK_THROWS_AS(ImagePlanar(2, 2, 1, std::vector<double>(5, 0.0)), Error);
  const ImagePlanar img(3, 2, 3);
  CHECK(img.data().size() == 18);
  CHECK(img.plane_size() == 6);
}

TEST_CASE("rgb_to_hsv hand values") {
  // pure red
  ImagePlanar red(1, 1, 3, {1.0, 0.0, 0.0});
  HsvImage hsv = rgb_to_hsv(red);
  CHECK(hsv.h.data()[0] == 0.0);
  CHECK(hsv.s.data()[0] == doctest::Approx(1.0));
  CHECK(hsv.v.data()[0] == doctest::Approx(1.0));

  // gray has zero saturation
  ImagePlanar gray(1, 1, 3, {0.5, 0.5, 0.5});
  hsv = rgb_to_hsv(gray);
  CHECK(hsv.h.data()[0] == 0.0);
  CHECK(hsv.s.data()[0] == 0.0);
  CHECK(hsv.v.data()[0] == doctest::Approx(0.5));

  CHECK_THROWS_AS(rgb_to_hsv(ImagePlanar(2, 2, 1)), Error);
}

TEST_CASE("hsv_to_rgb hand values") {
  // zero saturation is gray
  HsvImage gray(ImagePlanar(1, 1, 1, {0.0}), ImagePlanar(1, 1, 1, {0.0}),
                ImagePlanar(1, 1, 1, {0.7}));
  ImagePlanar rgb = hsv_to_rgb(gray);
  CHECK(rgb.data()[0] == doctest::Approx(0.7));
  CHECK(rgb.data()[1] == doctest::Approx(0.7));
  CHECK(rgb.data()[2] == doctest::Approx(0.7));

  // pure green
  HsvImage green(ImagePlanar(1, 1, 1, {1.0 / 3.0}), ImagePlanar(1, 1, 1, {1.0}),
                 ImagePlanar(1, 1, 1, {1.0}));
  rgb = hsv_to_rgb(green);
  CHECK(rgb.data()[0] == doctest::Approx(0.0).epsilon(1e-12).scale(1));
  CHECK(rgb.data()[1] == doctest::Approx(1.0));
  CHECK(rgb.data()[2] == doctest::Approx(0.0).epsilon(1e-12).scale(1));
}

TEST_CASE("hsv round trip is the identity within 1e-6") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ImagePlanar rgb = random_rgb(8, 8, seed);
    const ImagePlanar back = hsv_to_rgb(rgb_to_hsv(rgb));
    for (std::size_t i = 0; i < rgb.data().size(); ++i) {
      CHECK(std::abs(back.data()[i] - rgb.data()[i]) < 1e-6);
    }
    // reverse direction: hsv -> rgb -> hsv
    const HsvImage hsv = rgb_to_hsv(rgb);
    const HsvImage again = rgb_to_hsv(hsv_to_rgb(hsv));
    for (std::size_t i = 0; i < hsv.h.data().size(); ++i) {
      CHECK(std::abs(again.h.data()[i] - hsv.h.data()[i]) < 1e-6);
      CHECK(std::abs(again.s.data()[i] - hsv.s.data()[i]) < 1e-6);
      CHECK(std::abs(again.v.data()[i] - hsv.v.data()[i]) < 1e-6);
    }
  }
}

TEST_CASE("hsv planes stay in [0,1] and hue wraps") {
  const ImagePlanar rgb = random_rgb(16, 16, 77);
  const HsvImage hsv = rgb_to_hsv(rgb);
  for (const ImagePlanar* p : {&hsv.h, &hsv.s, &hsv.v}) {
    for (double v : p->data()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  for (double v : hsv.h.data()) CHECK(v < 1.0);  // h=1 normalized to 0
}

TEST_CASE("add_gaussian_noise contract") {
  const ImagePlanar img = random_rgb(16, 16, 5);

  SUBCASE("sigma=0 is the identity") {
    const ImagePlanar out = add_gaussian_noise(img, 0.0, 123);
    CHECK(out.data() == img.data());
  }
  SUBCASE("same seed is bit-identical") {
    const ImagePlanar a = add_gaussian_noise(img, 0.05, 42);
    const ImagePlanar b = add_gaussian_noise(img, 0.05, 42);
    CHECK(a.data() == b.data());
    const ImagePlanar c = add_gaussian_noise(img, 0.05, 43);
    CHECK(a.data() != c.data());
  }
  SUBCASE("negative sigma rejected") {
    CHECK_THROWS_AS(add_gaussian_noise(img, -0.1, 0), Error);
  }
  SUBCASE("sample std matches sigma on a constant plane") {
    ImagePlanar flat(256, 256, 1);
    for (double& v : flat.data()) v = 0.5;
    const ImagePlanar noisy = add_gaussian_noise(flat, 0.05, 99);
    double sum = 0.0, sq = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < flat.data().size(); ++i) {
      if (noisy.data()[i] > 0.0 && noisy.data()[i] < 1.0) {  // non-clipped
        const double d = noisy.data()[i] - flat.data()[i];
        sum += d;
        sq += d * d;
        ++count;
      }
    }
    const double mean = sum / static_cast<double>(count);
    const double std_dev = std::sqrt(sq / static_cast<double>(count) - mean * mean);
    CHECK(std::abs(std_dev - 0.05) < 0.005);
  }
  SUBCASE("outputs stay in [0,1]") {
    const ImagePlanar noisy = add_gaussian_noise(img, 0.5, 7);
    for (double v : noisy.data()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("gaussian_blur preserves constants") {
  ImagePlanar flat(12, 10, 1);
  for (double& v : flat.data()) v = 0.3;
  const ImagePlanar out = gaussian_blur(flat, 2.0);
  for (double v : out.data()) CHECK(v == doctest::Approx(0.3).epsilon(1e-12));
}
