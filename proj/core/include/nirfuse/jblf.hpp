#pragma once

#include "nirfuse/image.hpp"

namespace nirfuse {

struct JblfParams {
  double s = 1.0;           // spatial Gaussian scale (pixels)
  double r_threshold = 0.2; // guide-distance cutoff R
  int radius = 1;           // square window half-width

  void validate() const;
};

/// Window half-width for a spatial scale: ceil(3*s), at least 1, capped.
int jblf_radius_for_scale(double s, int cap);

/// Joint bilateral filter with a hard-threshold range kernel:
///   out_p = sum_q f(p,q) g(G_p,G_q) in_q / sum_q f(p,q) g(G_p,G_q)
/// where f is a spatial Gaussian of scale s over a (2*radius+1)^2 window
/// clipped at the image border, and g = 1 iff |G_p - G_q| < R. The center
/// pixel always passes, so the normalizer never vanishes.
ImagePlanar joint_bilateral_threshold(const ImagePlanar& input, const ImagePlanar& guide,
                                      const JblfParams& params);

}  // namespace nirfuse
