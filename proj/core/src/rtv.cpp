#include "nirfuse/rtv.hpp"

#include <cmath>
#include <vector>

namespace nirfuse {

namespace {

void require_single_plane(const ImagePlanar& img, const char* op) {
  if (img.channels() != 1) {
    throw Error(std::string(op) + " expects a single-plane image, got " +
                std::to_string(img.channels()) + " channels");
  }
}

// Forward differences with replicate edges: the difference at the last
// column (row) is zero.
void forward_diff(const ImagePlanar& img, ImagePlanar& dx, ImagePlanar& dy) {
  const int w = img.width();
  const int h = img.height();
  const double* src = img.plane(0);
  double* fx = dx.plane(0);
  double* fy = dy.plane(0);
  for (int y = 0; y < h; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w - 1; ++x) fx[row + x] = src[row + x + 1] - src[row + x];
    fx[row + w - 1] = 0.0;
  }
  for (int y = 0; y < h - 1; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) fy[row + x] = src[row + w + x] - src[row + x];
  }
  for (int x = 0; x < w; ++x) fy[static_cast<std::size_t>(h - 1) * w + x] = 0.0;
}

// y += alpha * L x with L the weighted 5-point Laplacian. Edge weights are
// ex (pixel -> right neighbor) and ey (pixel -> lower neighbor); the last
// column of ex and last row of ey never enter.
void accumulate_laplacian(const std::vector<double>& ex, const std::vector<double>& ey,
                          int w, int h, double alpha, const double* x, double* y) {
  for (int row = 0; row < h; ++row) {
    const std::size_t base = static_cast<std::size_t>(row) * w;
    for (int col = 0; col + 1 < w; ++col) {
      const std::size_t i = base + col;
      const double d = x[i + 1] - x[i];
      const double f = alpha * ex[i] * d;
      y[i] -= f;
      y[i + 1] += f;
    }
  }
  for (int row = 0; row + 1 < h; ++row) {
    const std::size_t base = static_cast<std::size_t>(row) * w;
    for (int col = 0; col < w; ++col) {
      const std::size_t i = base + col;
      const double d = x[i + w] - x[i];
      const double f = alpha * ey[i] * d;
      y[i] -= f;
      y[i + w] += f;
    }
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

void RtvParams::validate() const {
  if (lambda < 0.0) throw Error("rtv: lambda must be >= 0");
  if (eps <= 0.0) throw Error("rtv: eps must be > 0");
  if (eps_w <= 0.0) throw Error("rtv: eps_w must be > 0");
  if (sigma_spatial <= 0.0) throw Error("rtv: sigma_spatial must be > 0");
  if (iterations < 1) throw Error("rtv: iterations must be >= 1");
  if (solver_tol <= 0.0) throw Error("rtv: solver_tol must be > 0");
  if (solver_max_steps < 1) throw Error("rtv: solver_max_steps must be >= 1");
}

RtvWeights compute_rtv_weights(const ImagePlanar& channel, const RtvParams& params) {
  require_single_plane(channel, "compute_rtv_weights");
  params.validate();
  const int w = channel.width();
  const int h = channel.height();

  ImagePlanar fx(w, h, 1), fy(w, h, 1);
  forward_diff(channel, fx, fy);

  // The difference fields live on edges: (w-1) x h for x, w x (h-1) for y.
  // The Gaussian window runs over that edge domain so weights stay mirror-
  // symmetric; the phantom zero last column/row never enters the window.
  RtvWeights weights{ImagePlanar(w, h, 1), ImagePlanar(w, h, 1), ImagePlanar(w, h, 1),
                     ImagePlanar(w, h, 1)};
  const std::size_t n = channel.plane_size();
  ImagePlanar gx(w, h, 1), gy(w, h, 1);
  if (w > 1) {
    ImagePlanar fxe(w - 1, h, 1);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x + 1 < w; ++x) fxe.at(0, x, y) = fx.at(0, x, y);
    }
    const ImagePlanar gxe = gaussian_blur(fxe, params.sigma_spatial);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x + 1 < w; ++x) gx.at(0, x, y) = gxe.at(0, x, y);
    }
  }
  if (h > 1) {
    ImagePlanar fye(w, h - 1, 1);
    for (int y = 0; y + 1 < h; ++y) {
      for (int x = 0; x < w; ++x) fye.at(0, x, y) = fy.at(0, x, y);
    }
    const ImagePlanar gye = gaussian_blur(fye, params.sigma_spatial);
    for (int y = 0; y + 1 < h; ++y) {
      for (int x = 0; x < w; ++x) gy.at(0, x, y) = gye.at(0, x, y);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    weights.ux.plane(0)[i] = 1.0 / (std::abs(gx.plane(0)[i]) + params.eps);
    weights.uy.plane(0)[i] = 1.0 / (std::abs(gy.plane(0)[i]) + params.eps);
    weights.wx.plane(0)[i] = 1.0 / (std::abs(fx.plane(0)[i]) + params.eps_w);
    weights.wy.plane(0)[i] = 1.0 / (std::abs(fy.plane(0)[i]) + params.eps_w);
  }
  return weights;
}

ImagePlanar solve_smoothing_system(const ImagePlanar& channel, const RtvWeights& weights,
                                   double lambda, double tol, int max_steps,
                                   const ImagePlanar* initial_guess) {
  require_single_plane(channel, "solve_smoothing_system");
  if (lambda < 0.0) throw Error("rtv solve: lambda must be >= 0");
  if (tol <= 0.0) throw Error("rtv solve: tol must be > 0");
  if (lambda == 0.0) return channel;  // system reduces to the identity
  if (!weights.ux.same_size(channel)) throw Error("rtv solve: weight dimensions mismatch");

  const int w = channel.width();
  const int h = channel.height();
  const std::size_t n = channel.plane_size();

  // Combined diagonal edge weights U*W.
  std::vector<double> ex(n), ey(n);
  for (std::size_t i = 0; i < n; ++i) {
    ex[i] = weights.ux.plane(0)[i] * weights.wx.plane(0)[i];
    ey[i] = weights.uy.plane(0)[i] * weights.wy.plane(0)[i];
  }

  const std::vector<double>& b = channel.data();
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return ImagePlanar(w, h, 1);  // unique solution is zero

  // Jacobi preconditioner: diag(A) = 1 + lambda * (incident edge weights).
  std::vector<double> inv_diag(n, 1.0);
  for (int row = 0; row < h; ++row) {
    const std::size_t base = static_cast<std::size_t>(row) * w;
    for (int col = 0; col + 1 < w; ++col) {
      inv_diag[base + col] += lambda * ex[base + col];
      inv_diag[base + col + 1] += lambda * ex[base + col];
    }
  }
  for (int row = 0; row + 1 < h; ++row) {
    const std::size_t base = static_cast<std::size_t>(row) * w;
    for (int col = 0; col < w; ++col) {
      inv_diag[base + col] += lambda * ey[base + col];
      inv_diag[base + col + w] += lambda * ey[base + col];
    }
  }
  for (double& d : inv_diag) d = 1.0 / d;

  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    y = x;
    accumulate_laplacian(ex, ey, w, h, lambda, x.data(), y.data());
  };

  if (initial_guess && !initial_guess->same_size(channel)) {
    throw Error("rtv solve: initial guess dimensions mismatch");
  }
  std::vector<double> x = initial_guess ? initial_guess->data() : b;

  std::vector<double> r(n), z(n), p(n), ap(n);
  apply(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  double rnorm = norm2(r);
  if (rnorm <= tol * bnorm) return ImagePlanar(w, h, 1, std::move(x));

  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);

  int step = 0;
  for (; step < max_steps; ++step) {
    apply(p, ap);
    const double pap = dot(p, ap);
    if (pap <= 0.0) break;  // cannot happen for an SPD system unless stagnated
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    rnorm = norm2(r);
    if (rnorm <= tol * bnorm) {
      // Recurrence residuals drift; confirm against the true residual.
      apply(x, ap);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
      rnorm = norm2(r);
      if (rnorm <= tol * bnorm) return ImagePlanar(w, h, 1, std::move(x));
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw Error("rtv solve: no convergence after " + std::to_string(step) +
              " steps (relative residual " + std::to_string(rnorm / bnorm) + ", target " +
              std::to_string(tol) + ")");
}

ImagePlanar rtv_smooth(const ImagePlanar& channel, const RtvParams& params) {
  require_single_plane(channel, "rtv_smooth");
  params.validate();
  ImagePlanar estimate = channel;
  for (int t = 0; t < params.iterations; ++t) {
    const RtvWeights weights = compute_rtv_weights(estimate, params);
    estimate = solve_smoothing_system(channel, weights, params.lambda, params.solver_tol,
                                      params.solver_max_steps, &estimate);
  }
  return estimate;
}

Decomposition decompose(const ImagePlanar& channel, const RtvParams& params) {
  require_single_plane(channel, "decompose");
  ImagePlanar structure = rtv_smooth(channel, params);
  ImagePlanar texture(channel.width(), channel.height(), 1);
  const std::size_t n = channel.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    texture.data()[i] = channel.data()[i] - structure.data()[i];
  }
  return Decomposition{std::move(structure), std::move(texture)};
}

}  // namespace nirfuse
