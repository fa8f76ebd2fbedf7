#pragma once

#include <string>

#include "nirfuse/image.hpp"
#include "nirfuse/jblf.hpp"
#include "nirfuse/noise_model.hpp"
#include "nirfuse/rtv.hpp"

namespace nirfuse {

/// Every tunable of the pipeline. jblf.radius acts as the window cap: the
/// effective radius is ceil(3*s) for the scheduled s, never above the cap.
struct FusionConfig {
  RtvParams rtv_vis;
  RtvParams rtv_nir;
  JblfParams jblf;
  SigmoidParams sigmoid;
  int variance_window = 3;
  int histogram_bins = 100;
  std::string model_path = "builtin";
  bool clamp_output = true;
  bool standard_gaussian = false;  // likelihood form for classification

  FusionConfig();

  void validate() const;
};

/// Every intermediate of one fusion run, for inspection and testing.
struct FusionTrace {
  ImagePlanar s_vis_structure;
  ImagePlanar t_vis_texture;
  ImagePlanar t_vis_denoised;
  ImagePlanar s_nir_structure;
  ImagePlanar t_nir_texture;
  ImagePlanar variance_guide;
  FeatureVector features;
  NoiseLabel label = NoiseLabel::dnoi;
  double p_noi = 0.0;
  double p_dnoi = 0.0;
  double s_coefficient = 0.0;
  ImagePlanar f_v;
};

struct FusionResult {
  ImagePlanar fused;
  FusionTrace trace;
};

/// End-to-end fusion of a registered pair: decompose the visible V channel
/// and the NIR plane, classify noise from the V-channel variance map,
/// adaptively denoise the visible texture, sum the fused luminance and
/// convert back with the source hue/saturation untouched.
FusionResult fuse(const ImagePlanar& rgb, const ImagePlanar& nir, const NoiseModel& model,
                  const FusionConfig& config);

/// The isolated denoising stage: joint bilateral filtering of the texture
/// plane under the variance guide with the scheduled coefficient s.
ImagePlanar denoise_texture(const ImagePlanar& t_vis, const ImagePlanar& guide, double s,
                            const FusionConfig& config);

}  // namespace nirfuse
