#pragma once

#include "nirfuse/image.hpp"

namespace nirfuse {

/// Parameters of the relative-total-variation smoother.
struct RtvParams {
  double lambda = 0.015;      // smoothing weight
  double eps = 1e-3;          // windowed-variation guard
  double eps_w = 1e-2;        // pointwise-variation guard
  double sigma_spatial = 3.0; // Gaussian window scale (pixels)
  int iterations = 4;         // fixed-point rounds
  double solver_tol = 1e-6;   // relative residual target
  int solver_max_steps = 1000;

  void validate() const;
};

/// Diagonal weight planes of the iteratively reweighted quadratic form.
/// ux/uy hold 1/(|G_sigma * dS| + eps), wx/wy hold 1/(|dS| + eps_w); the
/// gradient operators are forward differences with replicate edges (the
/// difference at the last column/row is zero).
struct RtvWeights {
  ImagePlanar ux;
  ImagePlanar uy;
  ImagePlanar wx;
  ImagePlanar wy;
};

struct Decomposition {
  ImagePlanar structure;
  ImagePlanar texture;  // signed residual, input - structure
};

RtvWeights compute_rtv_weights(const ImagePlanar& channel, const RtvParams& params);

/// Solves (I + lambda*L) v = channel where L is the weighted 5-point graph
/// Laplacian assembled from the weight planes. Matrix-free Jacobi-
/// preconditioned conjugate gradients; throws if the relative residual does
/// not reach tol within max_steps. An optional initial guess warm-starts the
/// iteration (defaults to the right-hand side).
ImagePlanar solve_smoothing_system(const ImagePlanar& channel, const RtvWeights& weights,
                                   double lambda, double tol, int max_steps,
                                   const ImagePlanar* initial_guess = nullptr);

/// Runs `iterations` rounds of reweighting + linear solve starting from the
/// input. The output is the structure image (not clamped).
ImagePlanar rtv_smooth(const ImagePlanar& channel, const RtvParams& params);

/// structure = rtv_smooth(channel), texture = channel - structure.
Decomposition decompose(const ImagePlanar& channel, const RtvParams& params);

}  // namespace nirfuse
