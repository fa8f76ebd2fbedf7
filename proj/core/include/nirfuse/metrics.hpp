#pragma once

#include <vector>

#include "nirfuse/image.hpp"

namespace nirfuse {

/// SSIM constants for the [0,1] value range: C1=(0.01)^2, C2=(0.03)^2 with
/// an 11x11 Gaussian window of scale 1.5.
struct SsimParams {
  double c1 = 1e-4;
  double c2 = 9e-4;
  int window_size = 11;
  double window_sigma = 1.5;

  void validate() const;
};

/// Edge-preservation sigmoid constants (strength and orientation) plus the
/// importance-weight exponent.
struct QabfParams {
  double gamma_g = 0.9994;
  double kappa_g = -15.0;
  double sigma_g = 0.5;
  double gamma_a = 0.9879;
  double kappa_a = -22.0;
  double sigma_a = 0.8;
  double l_exponent = 1.0;

  void validate() const;
};

struct QualityReport {
  double ssim = 0.0;
  double viff = 0.0;
  double qabf = 0.0;
};

/// Mean of the per-pixel SSIM map (Gaussian-windowed statistics, replicate
/// edges). Symmetric in its arguments.
double ssim(const ImagePlanar& x, const ImagePlanar& y, const SsimParams& params = {});

/// (ssim(rgb_luma, fused) + ssim(nir, fused)) / 2.
double fusion_ssim(const ImagePlanar& rgb_luma, const ImagePlanar& nir,
                   const ImagePlanar& fused_luma, const SsimParams& params = {});

/// Visual-information-fidelity fusion score over a Gaussian pyramid of
/// `levels` sub-bands with 8x8 blocks; per band the ratio of transferred to
/// reference block information for the per-block information-dominant
/// source, bands combined with equal weights. Constants are documented in
/// the repository README.
double viff(const std::vector<ImagePlanar>& sources, const ImagePlanar& fused,
            int levels = 4);

/// Pixel-level edge-transfer quality: Sobel strength/orientation agreement
/// with `fused` folded through the two sigmoids, weighted by source edge
/// strength. Symmetric in the two sources.
double qabf(const ImagePlanar& a, const ImagePlanar& b, const ImagePlanar& fused,
            const QabfParams& params = {});

/// All three metrics on luminance planes (HSV V for the color images).
QualityReport quality_report(const ImagePlanar& rgb, const ImagePlanar& nir,
                             const ImagePlanar& fused, const SsimParams& ssim_params = {},
                             const QabfParams& qabf_params = {}, int viff_levels = 4);

}  // namespace nirfuse
