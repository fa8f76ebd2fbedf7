#include "nirfuse/noise_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "nirfuse/synthetic.hpp"

namespace nirfuse {

namespace {

constexpr double kSigmaFloor = 1e-6;

void require_single_plane(const ImagePlanar& img, const char* op) {
  if (img.channels() != 1) {
    throw Error(std::string(op) + " expects a single-plane image");
  }
}

struct Moments {
  double mu1, mu2, sigma1, sigma2;
};

Moments fit_moments(const std::vector<FeatureVector>& normalized) {
  const double n = static_cast<double>(normalized.size());
  double m1 = 0.0, m2 = 0.0;
  for (const FeatureVector& f : normalized) {
    m1 += f.f1;
    m2 += f.f2;
  }
  m1 /= n;
  m2 /= n;
  double v1 = 0.0, v2 = 0.0;
  for (const FeatureVector& f : normalized) {
    v1 += (f.f1 - m1) * (f.f1 - m1);
    v2 += (f.f2 - m2) * (f.f2 - m2);
  }
  v1 /= (n - 1.0);
  v2 /= (n - 1.0);
  return Moments{m1, m2, std::max(std::sqrt(v1), kSigmaFloor),
                 std::max(std::sqrt(v2), kSigmaFloor)};
}

FeatureVector normalize_features(const NoiseModel& model, const FeatureVector& x) {
  FeatureVector out;
  out.f1 = std::clamp((x.f1 - model.feat_min[0]) / (model.feat_max[0] - model.feat_min[0]),
                      0.0, 1.0);
  out.f2 = std::clamp((x.f2 - model.feat_min[1]) / (model.feat_max[1] - model.feat_min[1]),
                      0.0, 1.0);
  return out;
}

double log_likelihood(const ClassGaussian& g, const FeatureVector& xn, LikelihoodForm form) {
  const double one_minus_rho2 = 1.0 - g.rho * g.rho;
  const double coef =
      1.0 / (2.0 * std::numbers::pi * g.sigma1 * g.sigma2 * std::sqrt(one_minus_rho2));
  const double d1 = xn.f1 - g.mu1;
  const double d2 = xn.f2 - g.mu2;
  const double s1 = (form == LikelihoodForm::printed) ? g.sigma1 : g.sigma1 * g.sigma1;
  const double s2 = (form == LikelihoodForm::printed) ? g.sigma2 : g.sigma2 * g.sigma2;
  const double quad =
      d1 * d1 / s1 + d2 * d2 / s2 - 2.0 * g.rho * d1 * d2 / (g.sigma1 * g.sigma2);
  return std::log(coef) - quad / (2.0 * one_minus_rho2);
}

void validate_class(const ClassGaussian& g, const char* name) {
  if (g.sigma1 <= 0.0 || g.sigma2 <= 0.0) {
    throw Error(std::string("noise model: class ") + name + " has nonpositive sigma");
  }
  if (!(std::abs(g.rho) < 1.0)) {
    throw Error(std::string("noise model: class ") + name + " needs |rho| < 1");
  }
  if (!(g.prior > 0.0 && g.prior < 1.0)) {
    throw Error(std::string("noise model: class ") + name + " prior must be in (0,1)");
  }
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char* to_string(NoiseLabel label) {
  return label == NoiseLabel::noi ? "NOI" : "DNOI";
}

void NoiseModel::validate() const {
  validate_class(noisy, "NOI");
  validate_class(clean, "DNOI");
  if (std::abs(noisy.prior + clean.prior - 1.0) > 1e-9) {
    throw Error("noise model: class priors must sum to 1");
  }
  for (int i = 0; i < 2; ++i) {
    if (!(feat_min[i] < feat_max[i])) {
      throw Error("noise model: feat_min must be strictly below feat_max");
    }
  }
  if (histogram_bins < 2) throw Error("noise model: histogram_bins must be >= 2");
}

void SigmoidParams::validate() const {
  if (a <= 0.0) throw Error("sigmoid: a must be > 0");
  if (b < 0.0) throw Error("sigmoid: b must be >= 0");
  if (alpha <= 0.0) throw Error("sigmoid: alpha must be > 0");
}

ImagePlanar local_stddev_map(const ImagePlanar& channel, int window) {
  require_single_plane(channel, "local_stddev_map");
  if (window < 3 || window % 2 == 0) {
    throw Error("local variance window must be odd and >= 3, got " + std::to_string(window));
  }
  const int w = channel.width();
  const int h = channel.height();
  const int radius = window / 2;
  const double count = static_cast<double>(window) * window;
  const double* src = channel.plane(0);
  ImagePlanar out(w, h, 1);
  double* dst = out.plane(0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double mean = 0.0;
      for (int dy = -radius; dy <= radius; ++dy) {
        const int yy = std::clamp(y + dy, 0, h - 1);
        for (int dx = -radius; dx <= radius; ++dx) {
          const int xx = std::clamp(x + dx, 0, w - 1);
          mean += src[static_cast<std::size_t>(yy) * w + xx];
        }
      }
      mean /= count;
      double sq = 0.0;
      for (int dy = -radius; dy <= radius; ++dy) {
        const int yy = std::clamp(y + dy, 0, h - 1);
        for (int dx = -radius; dx <= radius; ++dx) {
          const int xx = std::clamp(x + dx, 0, w - 1);
          const double d = src[static_cast<std::size_t>(yy) * w + xx] - mean;
          sq += d * d;
        }
      }
      dst[static_cast<std::size_t>(y) * w + x] = std::sqrt(sq / count);
    }
  }
  return out;
}

ImagePlanar local_variance(const ImagePlanar& channel, int window) {
  ImagePlanar raw = local_stddev_map(channel, window);
  double lo = raw.data()[0];
  double hi = raw.data()[0];
  for (double v : raw.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double range = hi - lo;
  if (range == 0.0) {
    return ImagePlanar(channel.width(), channel.height(), 1);  // all zeros
  }
  for (double& v : raw.data()) v = (v - lo) / range;
  return raw;
}

FeatureVector extract_features(const ImagePlanar& variance_map, int bins) {
  require_single_plane(variance_map, "extract_features");
  if (bins < 2) throw Error("extract_features: bins must be >= 2");
  for (double v : variance_map.data()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error("extract_features: map value " + std::to_string(v) + " outside [0,1]");
    }
  }
  std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
  for (double v : variance_map.data()) {
    int idx = static_cast<int>(v * bins);
    idx = std::min(idx, bins - 1);
    hist[idx] += 1.0;
  }
  const double total = static_cast<double>(variance_map.plane_size());
  for (double& c : hist) c /= total;

  double best = hist[1] - hist[0];
  int best_idx = 0;
  for (int i = 1; i + 1 < bins; ++i) {
    const double g = hist[i + 1] - hist[i];
    if (g > best) {
      best = g;
      best_idx = i;
    }
  }
  FeatureVector f;
  f.f1 = best;
  f.f2 = (bins > 2) ? static_cast<double>(best_idx) / (bins - 2) : 0.0;
  return f;
}

NoiseModel train(const std::vector<FeatureVector>& noisy_features,
                 const std::vector<FeatureVector>& clean_features, double rho, int bins) {
  if (noisy_features.size() < 2 || clean_features.size() < 2) {
    throw Error("train: each class needs at least 2 samples");
  }
  if (!(std::abs(rho) < 1.0)) throw Error("train: |rho| must be < 1");
  if (bins < 2) throw Error("train: bins must be >= 2");

  NoiseModel model;
  model.histogram_bins = bins;
  model.feat_min[0] = model.feat_min[1] = std::numeric_limits<double>::infinity();
  model.feat_max[0] = model.feat_max[1] = -std::numeric_limits<double>::infinity();
  for (const auto* list : {&noisy_features, &clean_features}) {
    for (const FeatureVector& f : *list) {
      model.feat_min[0] = std::min(model.feat_min[0], f.f1);
      model.feat_max[0] = std::max(model.feat_max[0], f.f1);
      model.feat_min[1] = std::min(model.feat_min[1], f.f2);
      model.feat_max[1] = std::max(model.feat_max[1], f.f2);
    }
  }
  for (int i = 0; i < 2; ++i) {
    if (!(model.feat_min[i] < model.feat_max[i])) {
      throw Error("train: zero feature range for f" + std::to_string(i + 1));
    }
  }

  auto normalize_all = [&](const std::vector<FeatureVector>& in) {
    std::vector<FeatureVector> out;
    out.reserve(in.size());
    for (const FeatureVector& f : in) out.push_back(normalize_features(model, f));
    return out;
  };
  const Moments mn = fit_moments(normalize_all(noisy_features));
  const Moments mc = fit_moments(normalize_all(clean_features));

  const double total = static_cast<double>(noisy_features.size() + clean_features.size());
  model.noisy = ClassGaussian{mn.mu1, mn.mu2, mn.sigma1, mn.sigma2, rho,
                              static_cast<double>(noisy_features.size()) / total};
  model.clean = ClassGaussian{mc.mu1, mc.mu2, mc.sigma1, mc.sigma2, rho,
                              static_cast<double>(clean_features.size()) / total};
  model.validate();
  return model;
}

double class_likelihood(const NoiseModel& model, const FeatureVector& x, NoiseLabel cls,
                        LikelihoodForm form) {
  model.validate();
  const FeatureVector xn = normalize_features(model, x);
  const ClassGaussian& g = (cls == NoiseLabel::noi) ? model.noisy : model.clean;
  return std::exp(log_likelihood(g, xn, form));
}

Classification classify(const NoiseModel& model, const FeatureVector& x, LikelihoodForm form) {
  model.validate();
  const FeatureVector xn = normalize_features(model, x);
  const double score_noi = std::log(model.noisy.prior) + log_likelihood(model.noisy, xn, form);
  const double score_dnoi = std::log(model.clean.prior) + log_likelihood(model.clean, xn, form);

  Classification result;
  // Exact ties prefer DNOI (no smoothing over destructive smoothing).
  result.label = (score_noi > score_dnoi) ? NoiseLabel::noi : NoiseLabel::dnoi;
  result.p_noi = 1.0 / (1.0 + std::exp(score_dnoi - score_noi));
  result.p_dnoi = 1.0 - result.p_noi;
  return result;
}

double smoothing_coefficient(double p_noi, double p_dnoi, const SigmoidParams& params) {
  params.validate();
  if (p_noi < 0.0 || p_dnoi < 0.0) {
    throw Error("smoothing_coefficient: scores must be nonnegative");
  }
  const double mx = std::max(p_noi, p_dnoi);
  if (mx == 0.0) throw Error("smoothing_coefficient: both scores are zero");
  const double k =
      params.paper_literal_k ? (p_dnoi - p_noi) / mx : (p_noi - p_dnoi) / mx;
  return params.a / (1.0 + std::exp(-params.alpha * k)) + params.b;
}

std::string model_to_text(const NoiseModel& model) {
  std::ostringstream out;
  out << "nirfuse_noise_model_version = 1\n";
  out << "histogram_bins = " << model.histogram_bins << "\n";
  out << "feat_min.f1 = " << format_value(model.feat_min[0]) << "\n";
  out << "feat_min.f2 = " << format_value(model.feat_min[1]) << "\n";
  out << "feat_max.f1 = " << format_value(model.feat_max[0]) << "\n";
  out << "feat_max.f2 = " << format_value(model.feat_max[1]) << "\n";
  const auto emit_class = [&](const char* name, const ClassGaussian& g) {
    out << name << ".mu1 = " << format_value(g.mu1) << "\n";
    out << name << ".mu2 = " << format_value(g.mu2) << "\n";
    out << name << ".sigma1 = " << format_value(g.sigma1) << "\n";
    out << name << ".sigma2 = " << format_value(g.sigma2) << "\n";
    out << name << ".rho = " << format_value(g.rho) << "\n";
    out << name << ".prior = " << format_value(g.prior) << "\n";
  };
  emit_class("noi", model.noisy);
  emit_class("dnoi", model.clean);
  return out.str();
}

NoiseModel model_from_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("model parse error at line " + std::to_string(lineno) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
      while (!s.empty() && is_space(s.front())) s.erase(s.begin());
      while (!s.empty() && is_space(s.back())) s.pop_back();
      return s;
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw Error("model parse error at line " + std::to_string(lineno) + ": empty key");
    }
    if (!kv.emplace(key, value).second) {
      throw Error("model parse error: duplicate key '" + key + "'");
    }
  }

  auto take = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error("model parse error: missing key '" + key + "'");
    const std::string value = it->second;
    kv.erase(it);
    return value;
  };
  auto take_double = [&](const std::string& key) {
    const std::string value = take(key);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0') {
      throw Error("model parse error: bad number for '" + key + "': " + value);
    }
    return v;
  };

  const std::string version = take("nirfuse_noise_model_version");
  if (version != "1") {
    throw Error("unsupported noise model version '" + version + "' (expected 1)");
  }

  NoiseModel model;
  const double bins = take_double("histogram_bins");
  model.histogram_bins = static_cast<int>(bins);
  model.feat_min[0] = take_double("feat_min.f1");
  model.feat_min[1] = take_double("feat_min.f2");
  model.feat_max[0] = take_double("feat_max.f1");
  model.feat_max[1] = take_double("feat_max.f2");
  const auto read_class = [&](const std::string& name) {
    ClassGaussian g;
    g.mu1 = take_double(name + ".mu1");
    g.mu2 = take_double(name + ".mu2");
    g.sigma1 = take_double(name + ".sigma1");
    g.sigma2 = take_double(name + ".sigma2");
    g.rho = take_double(name + ".rho");
    g.prior = take_double(name + ".prior");
    return g;
  };
  model.noisy = read_class("noi");
  model.clean = read_class("dnoi");
  if (!kv.empty()) {
    throw Error("model parse error: unknown key '" + kv.begin()->first + "'");
  }
  model.validate();
  return model;
}

void save_model(const NoiseModel& model, const std::string& path) {
  model.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("unwritable path: " + path);
  out << model_to_text(model);
  if (!out.flush()) throw Error("write failed: " + path);
}

NoiseModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("unreadable file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_text(buf.str());
}

const NoiseModel& builtin_model() {
  static const NoiseModel model = [] {
    const synthetic::TrainingCorpus corpus = synthetic::default_corpus();
    std::vector<FeatureVector> noisy, clean;
    noisy.reserve(corpus.noisy.size());
    clean.reserve(corpus.clean.size());
    for (const ImagePlanar& img : corpus.noisy) {
      noisy.push_back(extract_features(local_variance(img, 3), 100));
    }
    for (const ImagePlanar& img : corpus.clean) {
      clean.push_back(extract_features(local_variance(img, 3), 100));
    }
    return train(noisy, clean, 0.5, 100);
  }();
  return model;
}

}  // namespace nirfuse
