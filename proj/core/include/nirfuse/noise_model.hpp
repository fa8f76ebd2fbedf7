#pragma once

#include <string>
#include <vector>

#include "nirfuse/image.hpp"

namespace nirfuse {

/// Histogram features of a local-variance map: f1 is the maximum first-order
/// histogram gradient, f2 the argmax bin index rescaled to [0,1].
struct FeatureVector {
  double f1 = 0.0;
  double f2 = 0.0;
};

/// Per-class bivariate Gaussian parameters in normalized feature space.
struct ClassGaussian {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double rho = 0.5;
  double prior = 0.5;
};

enum class NoiseLabel { noi, dnoi };

const char* to_string(NoiseLabel label);

struct NoiseModel {
  ClassGaussian noisy;  // NOI
  ClassGaussian clean;  // DNOI
  double feat_min[2] = {0.0, 0.0};
  double feat_max[2] = {1.0, 1.0};
  int histogram_bins = 100;

  void validate() const;
};

/// Likelihood evaluation form. `printed` divides the squared deviations by
/// the first power of sigma (the form this pipeline runs under);
/// `standard_gaussian` uses sigma^2 as a conventional bivariate normal would.
enum class LikelihoodForm { printed, standard_gaussian };

/// Raw per-pixel local standard deviation over a window*window neighborhood
/// with replicate-edge padding (population form: sqrt of the mean squared
/// deviation).
ImagePlanar local_stddev_map(const ImagePlanar& channel, int window);

/// local_stddev_map followed by min-max normalization to [0,1] over the whole
/// plane. A constant input yields an all-zero map.
ImagePlanar local_variance(const ImagePlanar& channel, int window);

/// Histogram features over `bins` equal bins on [0,1]. Argmax ties break
/// toward the lowest index.
FeatureVector extract_features(const ImagePlanar& variance_map, int bins);

/// Fits the two-class model: pooled min-max normalization bounds, per-class
/// mean/std (std floored at 1e-6), priors from class counts, rho as given.
NoiseModel train(const std::vector<FeatureVector>& noisy_features,
                 const std::vector<FeatureVector>& clean_features, double rho,
                 int bins = 100);

/// Bivariate class-conditional density at x (normalized with the model's
/// bounds and clamped to [0,1] first).
double class_likelihood(const NoiseModel& model, const FeatureVector& x, NoiseLabel cls,
                        LikelihoodForm form = LikelihoodForm::printed);

struct Classification {
  NoiseLabel label = NoiseLabel::dnoi;
  double p_noi = 0.0;   // normalized posterior-proportional score
  double p_dnoi = 0.0;
};

/// prior * likelihood per class; exact ties resolve to DNOI. Returned scores
/// sum to 1.
Classification classify(const NoiseModel& model, const FeatureVector& x,
                        LikelihoodForm form = LikelihoodForm::printed);

struct SigmoidParams {
  double a = 5.0;
  double b = 0.01;
  double alpha = 10.0;
  // Restores the k sign exactly as printed in the source formula (clean
  // images then receive the large coefficient); off by default.
  bool paper_literal_k = false;

  void validate() const;
};

/// Smoothing-coefficient schedule s = a/(1+exp(-alpha*k)) + b with
/// k = (p_noi - p_dnoi)/max(p_noi, p_dnoi), so noisy inputs get a large s.
double smoothing_coefficient(double p_noi, double p_dnoi, const SigmoidParams& params);

/// Versioned line-oriented text persistence; decimals carry 17 significant
/// digits so a save/load/save cycle is byte-identical.
void save_model(const NoiseModel& model, const std::string& path);
NoiseModel load_model(const std::string& path);

std::string model_to_text(const NoiseModel& model);
NoiseModel model_from_text(const std::string& text);

/// The default model, trained once per process on the seeded synthetic
/// 225+225 corpus. Identical to the model file shipped under core/data/.
const NoiseModel& builtin_model();

}  // namespace nirfuse
