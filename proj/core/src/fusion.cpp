#include "nirfuse/fusion.hpp"

#include <algorithm>
#include <cmath>

namespace nirfuse {

FusionConfig::FusionConfig() {
  rtv_nir.lambda = 0.01;
  jblf.radius = 15;  // cap for the scheduled window
}

void FusionConfig::validate() const {
  rtv_vis.validate();
  rtv_nir.validate();
  if (jblf.r_threshold < 0.0) throw Error("fusion config: jblf.r_threshold must be >= 0");
  if (jblf.radius < 1) throw Error("fusion config: jblf.radius must be >= 1");
  sigmoid.validate();
  if (variance_window < 3 || variance_window % 2 == 0) {
    throw Error("fusion config: variance_window must be odd and >= 3");
  }
  if (histogram_bins < 2) throw Error("fusion config: histogram_bins must be >= 2");
  if (model_path.empty()) throw Error("fusion config: model_path must not be empty");
}

ImagePlanar denoise_texture(const ImagePlanar& t_vis, const ImagePlanar& guide, double s,
                            const FusionConfig& config) {
  if (!t_vis.same_size(guide)) {
    throw Error("denoise_texture: texture and guide dimensions mismatch");
  }
  JblfParams params;
  params.s = s;
  params.r_threshold = config.jblf.r_threshold;
  params.radius = jblf_radius_for_scale(s, config.jblf.radius);
  return joint_bilateral_threshold(t_vis, guide, params);
}

FusionResult fuse(const ImagePlanar& rgb, const ImagePlanar& nir, const NoiseModel& model,
                  const FusionConfig& config) {
  config.validate();
  model.validate();
  if (rgb.channels() != 3) throw Error("fuse: visible image must have 3 channels");
  if (nir.channels() != 1) throw Error("fuse: NIR image must be single-channel");
  if (!rgb.same_size(nir)) {
    throw Error("fuse: dimension mismatch, visible " + std::to_string(rgb.width()) + "x" +
                std::to_string(rgb.height()) + " vs NIR " + std::to_string(nir.width()) + "x" +
                std::to_string(nir.height()));
  }
  if (model.histogram_bins != config.histogram_bins) {
    throw Error("fuse: model trained with " + std::to_string(model.histogram_bins) +
                " histogram bins but config requests " + std::to_string(config.histogram_bins));
  }

  const HsvImage hsv = rgb_to_hsv(rgb);

  FusionTrace trace;
  Decomposition vis = decompose(hsv.v, config.rtv_vis);
  Decomposition nir_dec = decompose(nir, config.rtv_nir);
  trace.variance_guide = local_variance(hsv.v, config.variance_window);

  trace.features = extract_features(trace.variance_guide, config.histogram_bins);
  const LikelihoodForm form =
      config.standard_gaussian ? LikelihoodForm::standard_gaussian : LikelihoodForm::printed;
  const Classification cls = classify(model, trace.features, form);
  trace.label = cls.label;
  trace.p_noi = cls.p_noi;
  trace.p_dnoi = cls.p_dnoi;
  trace.s_coefficient = smoothing_coefficient(cls.p_noi, cls.p_dnoi, config.sigmoid);

  trace.t_vis_denoised =
      denoise_texture(vis.texture, trace.variance_guide, trace.s_coefficient, config);

  // F_V = V_struct + denoised visible texture + NIR texture.
  ImagePlanar f_v(rgb.width(), rgb.height(), 1);
  const std::size_t n = f_v.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = vis.structure.data()[i] + trace.t_vis_denoised.data()[i] +
               nir_dec.texture.data()[i];
    if (config.clamp_output) v = std::clamp(v, 0.0, 1.0);
    f_v.data()[i] = v;
  }

  FusionResult result;
  result.fused = hsv_planes_to_rgb(hsv.h, hsv.s, f_v);
  trace.s_vis_structure = std::move(vis.structure);
  trace.t_vis_texture = std::move(vis.texture);
  trace.s_nir_structure = std::move(nir_dec.structure);
  trace.t_nir_texture = std::move(nir_dec.texture);
  trace.f_v = std::move(f_v);
  result.trace = std::move(trace);
  return result;
}

}  // namespace nirfuse
