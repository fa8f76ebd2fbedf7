#include "nirfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nirfuse {

namespace {

// Additive visual-noise variance of the block information model, the VIF
// convention sigma_n^2 = 2 rescaled from the 8-bit range to [0,1].
constexpr double kViffNoiseVar = 2.0 / (255.0 * 255.0);
constexpr double kVarianceGuard = 1e-12;
constexpr int kViffBlock = 8;

void require_plane_pair(const ImagePlanar& a, const ImagePlanar& b, const char* op) {
  if (a.channels() != 1 || b.channels() != 1) {
    throw Error(std::string(op) + " expects single-plane images");
  }
  if (!a.same_size(b)) {
    throw Error(std::string(op) + ": dimension mismatch " + std::to_string(a.width()) + "x" +
                std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                std::to_string(b.height()));
  }
}

ImagePlanar multiply(const ImagePlanar& a, const ImagePlanar& b) {
  ImagePlanar out(a.width(), a.height(), 1);
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] = a.data()[i] * b.data()[i];
  }
  return out;
}

// ------------------------------------------------------------------ VIFF

// 5-tap binomial smoothing + 2x decimation, replicate edges.
ImagePlanar pyramid_reduce(const ImagePlanar& img) {
  static const double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  const int w = img.width();
  const int h = img.height();
  ImagePlanar tmp(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int t = -2; t <= 2; ++t) {
        acc += k[t + 2] * img.at(0, std::clamp(x + t, 0, w - 1), y);
      }
      tmp.at(0, x, y) = acc;
    }
  }
  const int ow = (w + 1) / 2;
  const int oh = (h + 1) / 2;
  ImagePlanar out(ow, oh, 1);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int t = -2; t <= 2; ++t) {
        acc += k[t + 2] * tmp.at(0, 2 * x, std::clamp(2 * y + t, 0, h - 1));
      }
      out.at(0, x, y) = acc;
    }
  }
  return out;
}

struct BlockStats {
  double mean = 0.0;
  double var = 0.0;
};

BlockStats block_stats(const ImagePlanar& img, int bx, int by) {
  BlockStats s;
  for (int y = 0; y < kViffBlock; ++y) {
    for (int x = 0; x < kViffBlock; ++x) {
      s.mean += img.at(0, bx + x, by + y);
    }
  }
  const double count = kViffBlock * kViffBlock;
  s.mean /= count;
  for (int y = 0; y < kViffBlock; ++y) {
    for (int x = 0; x < kViffBlock; ++x) {
      const double d = img.at(0, bx + x, by + y) - s.mean;
      s.var += d * d;
    }
  }
  s.var /= count;
  return s;
}

double block_cov(const ImagePlanar& a, double mean_a, const ImagePlanar& b, double mean_b,
                 int bx, int by) {
  double cov = 0.0;
  for (int y = 0; y < kViffBlock; ++y) {
    for (int x = 0; x < kViffBlock; ++x) {
      cov += (a.at(0, bx + x, by + y) - mean_a) * (b.at(0, bx + x, by + y) - mean_b);
    }
  }
  return cov / (kViffBlock * kViffBlock);
}

// ------------------------------------------------------------------ QABF

void sobel(const ImagePlanar& img, ImagePlanar& mag, ImagePlanar& angle) {
  const int w = img.width();
  const int h = img.height();
  auto px = [&](int x, int y) {
    return img.at(0, std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
      const double gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
      mag.at(0, x, y) = std::sqrt(gx * gx + gy * gy);
      double a = std::atan2(gy, gx);
      // fold to orientation in (-pi/2, pi/2]
      if (a > std::numbers::pi / 2.0) a -= std::numbers::pi;
      if (a <= -std::numbers::pi / 2.0) a += std::numbers::pi;
      angle.at(0, x, y) = a;
    }
  }
}

double edge_quality(double g_src, double a_src, double g_fused, double a_fused,
                    const QabfParams& p) {
  const double mx = std::max(g_src, g_fused);
  const double strength = (mx > 0.0) ? std::min(g_src, g_fused) / mx : 0.0;
  const double agreement = 1.0 - std::abs(a_src - a_fused) * (2.0 / std::numbers::pi);
  const double qg = p.gamma_g / (1.0 + std::exp(p.kappa_g * (strength - p.sigma_g)));
  const double qa = p.gamma_a / (1.0 + std::exp(p.kappa_a * (agreement - p.sigma_a)));
  return qg * qa;
}

ImagePlanar luminance_plane(const ImagePlanar& img) {
  if (img.channels() == 1) return img;
  ImagePlanar out(img.width(), img.height(), 1);
  const double* r = img.plane(0);
  const double* g = img.plane(1);
  const double* b = img.plane(2);
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] = std::max({r[i], g[i], b[i]});
  }
  return out;
}

}  // namespace

void SsimParams::validate() const {
  if (c1 <= 0.0 || c2 <= 0.0) throw Error("ssim: stability constants must be > 0");
  if (window_size < 1 || window_size % 2 == 0) throw Error("ssim: window size must be odd");
  if (window_sigma <= 0.0) throw Error("ssim: window sigma must be > 0");
}

void QabfParams::validate() const {
  if (!(gamma_g > 0.0 && gamma_g <= 1.0) || !(gamma_a > 0.0 && gamma_a <= 1.0)) {
    throw Error("qabf: gamma constants must be in (0,1]");
  }
  if (sigma_g <= 0.0 || sigma_a <= 0.0) throw Error("qabf: sigma constants must be > 0");
  if (l_exponent < 0.0) throw Error("qabf: weight exponent must be >= 0");
}

double ssim(const ImagePlanar& x, const ImagePlanar& y, const SsimParams& params) {
  params.validate();
  require_plane_pair(x, y, "ssim");
  const int radius = params.window_size / 2;

  const ImagePlanar mu_x = gaussian_blur(x, params.window_sigma, radius);
  const ImagePlanar mu_y = gaussian_blur(y, params.window_sigma, radius);
  const ImagePlanar xx = gaussian_blur(multiply(x, x), params.window_sigma, radius);
  const ImagePlanar yy = gaussian_blur(multiply(y, y), params.window_sigma, radius);
  const ImagePlanar xy = gaussian_blur(multiply(x, y), params.window_sigma, radius);

  double total = 0.0;
  const std::size_t n = x.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    const double mx = mu_x.data()[i];
    const double my = mu_y.data()[i];
    const double var_x = xx.data()[i] - mx * mx;
    const double var_y = yy.data()[i] - my * my;
    const double cov = xy.data()[i] - mx * my;
    const double num = (2.0 * mx * my + params.c1) * (2.0 * cov + params.c2);
    const double den = (mx * mx + my * my + params.c1) * (var_x + var_y + params.c2);
    total += num / den;
  }
  return total / static_cast<double>(n);
}

double fusion_ssim(const ImagePlanar& rgb_luma, const ImagePlanar& nir,
                   const ImagePlanar& fused_luma, const SsimParams& params) {
  return 0.5 * (ssim(rgb_luma, fused_luma, params) + ssim(nir, fused_luma, params));
}

double viff(const std::vector<ImagePlanar>& sources, const ImagePlanar& fused, int levels) {
  if (sources.size() < 2) throw Error("viff: needs at least 2 source images");
  if (levels < 1) throw Error("viff: levels must be >= 1");
  for (const ImagePlanar& src : sources) require_plane_pair(src, fused, "viff");
  if (fused.width() < kViffBlock || fused.height() < kViffBlock) {
    throw Error("viff: image smaller than one 8x8 block");
  }

  std::vector<ImagePlanar> band_sources = sources;
  ImagePlanar band_fused = fused;
  double total = 0.0;
  int used_bands = 0;

  for (int level = 0; level < levels; ++level) {
    if (level > 0) {
      for (ImagePlanar& src : band_sources) src = pyramid_reduce(src);
      band_fused = pyramid_reduce(band_fused);
    }
    if (band_fused.width() < kViffBlock || band_fused.height() < kViffBlock) break;

    const int nbx = band_fused.width() / kViffBlock;
    const int nby = band_fused.height() / kViffBlock;
    double fvid = 0.0;
    double fvind = 0.0;
    for (int by = 0; by < nby; ++by) {
      for (int bx = 0; bx < nbx; ++bx) {
        const int px = bx * kViffBlock;
        const int py = by * kViffBlock;
        // information-dominant source for this block
        int dom = 0;
        BlockStats dom_stats = block_stats(band_sources[0], px, py);
        for (std::size_t i = 1; i < band_sources.size(); ++i) {
          const BlockStats s = block_stats(band_sources[i], px, py);
          if (s.var > dom_stats.var) {
            dom_stats = s;
            dom = static_cast<int>(i);
          }
        }
        const BlockStats fs = block_stats(band_fused, px, py);
        const double cov =
            block_cov(band_sources[dom], dom_stats.mean, band_fused, fs.mean, px, py);
        const double var_c = std::max(dom_stats.var, kVarianceGuard);
        const double gain = cov / var_c;
        const double noise = std::max(fs.var - gain * cov, 0.0);
        fvid += std::log(1.0 + gain * gain * dom_stats.var / (noise + kViffNoiseVar));
        fvind += std::log(1.0 + dom_stats.var / kViffNoiseVar);
      }
    }
    total += (fvind > kVarianceGuard) ? fvid / fvind : 1.0;
    ++used_bands;
  }
  return total / static_cast<double>(used_bands);
}

double qabf(const ImagePlanar& a, const ImagePlanar& b, const ImagePlanar& fused,
            const QabfParams& params) {
  params.validate();
  require_plane_pair(a, fused, "qabf");
  require_plane_pair(b, fused, "qabf");

  const int w = fused.width();
  const int h = fused.height();
  ImagePlanar ga(w, h, 1), aa(w, h, 1), gb(w, h, 1), ab(w, h, 1), gf(w, h, 1), af(w, h, 1);
  sobel(a, ga, aa);
  sobel(b, gb, ab);
  sobel(fused, gf, af);

  double num = 0.0;
  double den = 0.0;
  const std::size_t n = fused.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    const double qaf = edge_quality(ga.data()[i], aa.data()[i], gf.data()[i], af.data()[i], params);
    const double qbf = edge_quality(gb.data()[i], ab.data()[i], gf.data()[i], af.data()[i], params);
    const double wa = std::pow(ga.data()[i], params.l_exponent);
    const double wb = std::pow(gb.data()[i], params.l_exponent);
    num += qaf * wa + qbf * wb;
    den += wa + wb;
  }
  return (den > 0.0) ? num / den : 0.0;
}

QualityReport quality_report(const ImagePlanar& rgb, const ImagePlanar& nir,
                             const ImagePlanar& fused, const SsimParams& ssim_params,
                             const QabfParams& qabf_params, int viff_levels) {
  if (rgb.channels() != 3 || fused.channels() != 3) {
    throw Error("quality_report: rgb and fused must be 3-channel");
  }
  const ImagePlanar rgb_luma = luminance_plane(rgb);
  const ImagePlanar nir_luma = luminance_plane(nir);
  const ImagePlanar fused_luma = luminance_plane(fused);

  QualityReport report;
  report.ssim = fusion_ssim(rgb_luma, nir_luma, fused_luma, ssim_params);
  report.viff = viff({rgb_luma, nir_luma}, fused_luma, viff_levels);
  report.qabf = qabf(rgb_luma, nir_luma, fused_luma, qabf_params);
  return report;
}

}  // namespace nirfuse
