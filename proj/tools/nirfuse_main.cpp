#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "nirfuse/config.hpp"
#include "nirfuse/fusion.hpp"
#include "nirfuse/image_io.hpp"
#include "nirfuse/metrics.hpp"
#include "nirfuse/noise_model.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

nirfuse::ToolConfig load_config(const std::string& config_path) {
  if (config_path.empty()) return nirfuse::ToolConfig{};
  return nirfuse::parse_config_file(config_path);
}

nirfuse::NoiseModel resolve_model(const std::string& model_path) {
  if (model_path == "builtin") return nirfuse::builtin_model();
  return nirfuse::load_model(model_path);
}

nirfuse::ImagePlanar luminance(const nirfuse::ImagePlanar& img) {
  if (img.channels() == 1) return img;
  nirfuse::ImagePlanar out(img.width(), img.height(), 1);
  const double* r = img.plane(0);
  const double* g = img.plane(1);
  const double* b = img.plane(2);
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] = std::max({r[i], g[i], b[i]});
  }
  return out;
}

// Signed texture planes are stored with a +0.5 offset (files are unsigned).
nirfuse::ImagePlanar offset_texture(const nirfuse::ImagePlanar& texture) {
  nirfuse::ImagePlanar out = texture;
  for (double& v : out.data()) v += 0.5;
  return out;
}

nirfuse::FeatureVector image_features(const nirfuse::ImagePlanar& img, int window, int bins) {
  return nirfuse::extract_features(nirfuse::local_variance(luminance(img), window), bins);
}

std::vector<fs::path> list_images(const std::string& dir) {
  std::vector<fs::path> paths;
  if (!fs::is_directory(dir)) {
    throw nirfuse::Error("not a directory: " + dir);
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".png" || ext == ".pgm" || ext == ".ppm") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());  // deterministic feature order
  return paths;
}

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

int cmd_fuse(const std::string& rgb_path, const std::string& nir_path,
             const std::string& out_path, const std::string& config_path,
             const std::string& model_flag, const std::string& trace_dir) {
  nirfuse::ToolConfig config = load_config(config_path);
  const std::string model_path = model_flag.empty() ? config.fusion.model_path : model_flag;
  const nirfuse::NoiseModel model = resolve_model(model_path);

  const nirfuse::ImagePlanar rgb = nirfuse::load_image(rgb_path);
  const nirfuse::ImagePlanar nir = luminance(nirfuse::load_image(nir_path));
  const nirfuse::FusionResult result = nirfuse::fuse(rgb, nir, model, config.fusion);
  nirfuse::save_image(result.fused, out_path);

  if (!trace_dir.empty()) {
    fs::create_directories(trace_dir);
    const fs::path dir(trace_dir);
    const nirfuse::FusionTrace& t = result.trace;
    nirfuse::save_image(t.s_vis_structure, (dir / "s_vis_structure.png").string());
    nirfuse::save_image(offset_texture(t.t_vis_texture), (dir / "t_vis_texture.png").string());
    nirfuse::save_image(offset_texture(t.t_vis_denoised),
                        (dir / "t_vis_denoised.png").string());
    nirfuse::save_image(t.s_nir_structure, (dir / "s_nir_structure.png").string());
    nirfuse::save_image(offset_texture(t.t_nir_texture), (dir / "t_nir_texture.png").string());
    nirfuse::save_image(t.variance_guide, (dir / "variance_guide.png").string());
    nirfuse::save_image(t.f_v, (dir / "f_v.png").string());
    std::ofstream summary(dir / "summary.txt");
    if (!summary) throw nirfuse::Error("unwritable path: " + (dir / "summary.txt").string());
    summary << "label = " << nirfuse::to_string(t.label) << "\n"
            << "s = " << t.s_coefficient << "\n"
            << "f1 = " << t.features.f1 << "\n"
            << "f2 = " << t.features.f2 << "\n"
            << "p_noi = " << t.p_noi << "\n"
            << "p_dnoi = " << t.p_dnoi << "\n";
  }
  return 0;
}

int cmd_decompose(const std::string& img_path, const std::string& out_structure,
                  const std::string& out_texture, const std::string& config_path) {
  const nirfuse::ToolConfig config = load_config(config_path);
  const nirfuse::ImagePlanar img = luminance(nirfuse::load_image(img_path));
  const nirfuse::Decomposition dec = nirfuse::decompose(img, config.fusion.rtv_vis);
  nirfuse::save_image(dec.structure, out_structure);
  nirfuse::save_image(offset_texture(dec.texture), out_texture);
  return 0;
}

int cmd_denoise(const std::string& img_path, const std::string& out_path,
                const std::string& config_path, const std::string& model_flag) {
  nirfuse::ToolConfig config = load_config(config_path);
  const std::string model_path = model_flag.empty() ? config.fusion.model_path : model_flag;
  const nirfuse::NoiseModel model = resolve_model(model_path);

  const nirfuse::ImagePlanar img = nirfuse::load_image(img_path);
  const nirfuse::FusionConfig& fc = config.fusion;
  if (model.histogram_bins != fc.histogram_bins) {
    throw nirfuse::Error("denoise: model trained with " +
                         std::to_string(model.histogram_bins) +
                         " histogram bins but config requests " +
                         std::to_string(fc.histogram_bins));
  }

  // The standalone denoising stage: adaptive JBLF of the luminance texture,
  // recomposed with the untouched structure (and chroma for color inputs).
  const bool color = img.channels() == 3;
  const nirfuse::ImagePlanar v = luminance(img);
  const nirfuse::Decomposition dec = nirfuse::decompose(v, fc.rtv_vis);
  const nirfuse::ImagePlanar guide = nirfuse::local_variance(v, fc.variance_window);
  const nirfuse::FeatureVector features = nirfuse::extract_features(guide, fc.histogram_bins);
  const nirfuse::LikelihoodForm form = fc.standard_gaussian
                                           ? nirfuse::LikelihoodForm::standard_gaussian
                                           : nirfuse::LikelihoodForm::printed;
  const nirfuse::Classification cls = nirfuse::classify(model, features, form);
  const double s = nirfuse::smoothing_coefficient(cls.p_noi, cls.p_dnoi, fc.sigmoid);
  const nirfuse::ImagePlanar denoised = nirfuse::denoise_texture(dec.texture, guide, s, fc);

  nirfuse::ImagePlanar v_out(v.width(), v.height(), 1);
  for (std::size_t i = 0; i < v_out.data().size(); ++i) {
    v_out.data()[i] =
        std::clamp(dec.structure.data()[i] + denoised.data()[i], 0.0, 1.0);
  }
  std::cout << "label = " << nirfuse::to_string(cls.label) << ", s = " << s << "\n";
  if (color) {
    const nirfuse::HsvImage hsv = nirfuse::rgb_to_hsv(img);
    nirfuse::save_image(nirfuse::hsv_planes_to_rgb(hsv.h, hsv.s, v_out), out_path);
  } else {
    nirfuse::save_image(v_out, out_path);
  }
  return 0;
}

int cmd_train(const std::string& noisy_dir, const std::string& clean_dir,
              const std::string& model_out, const std::string& config_path) {
  const nirfuse::ToolConfig config = load_config(config_path);
  const int window = config.fusion.variance_window;
  const int bins = config.fusion.histogram_bins;

  const std::vector<fs::path> noisy_paths = list_images(noisy_dir);
  const std::vector<fs::path> clean_paths = list_images(clean_dir);
  if (noisy_paths.size() < 2 || clean_paths.size() < 2) {
    throw nirfuse::Error("train: each directory needs at least 2 readable images (noisy: " +
                         std::to_string(noisy_paths.size()) + ", clean: " +
                         std::to_string(clean_paths.size()) + ")");
  }

  std::vector<nirfuse::FeatureVector> noisy_features, clean_features;
  for (const fs::path& p : noisy_paths) {
    noisy_features.push_back(image_features(nirfuse::load_image(p.string()), window, bins));
  }
  for (const fs::path& p : clean_paths) {
    clean_features.push_back(image_features(nirfuse::load_image(p.string()), window, bins));
  }

  const nirfuse::NoiseModel model =
      nirfuse::train(noisy_features, clean_features, 0.5, bins);
  nirfuse::save_model(model, model_out);

  std::cout << "noisy images: " << noisy_features.size() << "\n"
            << "clean images: " << clean_features.size() << "\n";

  // Separability summary: p(NOI) histograms of the training samples.
  constexpr int kBins = 10;
  int hist_noisy[kBins] = {0};
  int hist_clean[kBins] = {0};
  for (const auto& f : noisy_features) {
    const auto cls = nirfuse::classify(model, f);
    hist_noisy[std::min(kBins - 1, static_cast<int>(cls.p_noi * kBins))]++;
  }
  for (const auto& f : clean_features) {
    const auto cls = nirfuse::classify(model, f);
    hist_clean[std::min(kBins - 1, static_cast<int>(cls.p_noi * kBins))]++;
  }
  std::cout << "p(NOI) score histogram, " << kBins << " bins over [0,1]:\n";
  for (int i = 0; i < kBins; ++i) {
    std::printf("  [%.1f,%.1f%s  noisy %4d | %-4d clean\n", i / 10.0, (i + 1) / 10.0,
                i == kBins - 1 ? "]" : ")", hist_noisy[i], hist_clean[i]);
  }
  std::cout << "model written to " << model_out << "\n";
  return 0;
}

int cmd_classify(const std::string& img_path, const std::string& model_path,
                 const std::string& config_path) {
  const nirfuse::ToolConfig config = load_config(config_path);
  const nirfuse::NoiseModel model = resolve_model(model_path);
  const nirfuse::ImagePlanar img = nirfuse::load_image(img_path);
  const nirfuse::FeatureVector features =
      image_features(img, config.fusion.variance_window, model.histogram_bins);
  const nirfuse::LikelihoodForm form = config.fusion.standard_gaussian
                                           ? nirfuse::LikelihoodForm::standard_gaussian
                                           : nirfuse::LikelihoodForm::printed;
  const nirfuse::Classification cls = nirfuse::classify(model, features, form);
  const double s = nirfuse::smoothing_coefficient(cls.p_noi, cls.p_dnoi, config.fusion.sigmoid);
  std::cout << "label = " << nirfuse::to_string(cls.label) << "\n"
            << "p_noi = " << cls.p_noi << "\n"
            << "p_dnoi = " << cls.p_dnoi << "\n"
            << "f1 = " << features.f1 << "\n"
            << "f2 = " << features.f2 << "\n"
            << "s = " << s << "\n";
  return 0;
}

int cmd_metrics(const std::string& rgb_path, const std::string& nir_path,
                const std::string& fused_path, const std::string& csv_path,
                const std::string& config_path) {
  const nirfuse::ToolConfig config = load_config(config_path);
  const nirfuse::ImagePlanar rgb = nirfuse::load_image(rgb_path);
  const nirfuse::ImagePlanar nir = luminance(nirfuse::load_image(nir_path));
  const nirfuse::ImagePlanar fused = nirfuse::load_image(fused_path);

  const nirfuse::QualityReport report =
      nirfuse::quality_report(rgb, nir, fused, config.ssim, config.qabf, config.viff_levels);

  const std::string image_id = fs::path(fused_path).stem().string();
  const std::string row = image_id + "," + format_score(report.ssim) + "," +
                          format_score(report.viff) + "," + format_score(report.qabf);
  std::cout << row << "\n";
  if (!csv_path.empty()) {
    const bool fresh = !fs::exists(csv_path);
    std::ofstream out(csv_path, std::ios::app);
    if (!out) throw nirfuse::Error("unwritable path: " + csv_path);
    if (fresh) out << "image_id,ssim,viff,qabf\n";
    out << row << "\n";
  }
  return 0;
}

int cmd_add_noise(const std::string& img_path, const std::string& out_path, double sigma,
                  std::uint64_t seed) {
  const nirfuse::ImagePlanar img = nirfuse::load_image(img_path);
  nirfuse::save_image(nirfuse::add_gaussian_noise(img, sigma, seed), out_path);
  return 0;
}

int cmd_bench(const std::string& rgb_path, const std::string& nir_path, int repeats,
              const std::string& config_path) {
  if (repeats < 1) throw nirfuse::Error("bench: repeats must be >= 1");
  nirfuse::ToolConfig config = load_config(config_path);
  const nirfuse::NoiseModel model = resolve_model(config.fusion.model_path);
  const nirfuse::ImagePlanar rgb = nirfuse::load_image(rgb_path);
  const nirfuse::ImagePlanar nir = luminance(nirfuse::load_image(nir_path));
  const nirfuse::FusionConfig& fc = config.fusion;

  struct Stage {
    const char* name;
    double sum = 0.0;
    double best = 1e300;
    void record(double ms) {
      sum += ms;
      best = std::min(best, ms);
    }
  };
  Stage stages[] = {{"rtv_vis"}, {"rtv_nir"}, {"variance"}, {"classify"},
                    {"jblf"},    {"color_ops"}, {"total"}};

  for (int rep = 0; rep < repeats; ++rep) {
    auto t0 = Clock::now();
    const nirfuse::FusionResult full = nirfuse::fuse(rgb, nir, model, fc);
    stages[6].record(ms_since(t0));
    (void)full;

    t0 = Clock::now();
    const nirfuse::HsvImage hsv = nirfuse::rgb_to_hsv(rgb);
    double color_ms = ms_since(t0);

    t0 = Clock::now();
    const nirfuse::Decomposition vis = nirfuse::decompose(hsv.v, fc.rtv_vis);
    stages[0].record(ms_since(t0));

    t0 = Clock::now();
    const nirfuse::Decomposition nir_dec = nirfuse::decompose(nir, fc.rtv_nir);
    stages[1].record(ms_since(t0));
    (void)nir_dec;

    t0 = Clock::now();
    const nirfuse::ImagePlanar guide = nirfuse::local_variance(hsv.v, fc.variance_window);
    stages[2].record(ms_since(t0));

    t0 = Clock::now();
    const nirfuse::FeatureVector features =
        nirfuse::extract_features(guide, fc.histogram_bins);
    const nirfuse::Classification cls = nirfuse::classify(model, features);
    const double s = nirfuse::smoothing_coefficient(cls.p_noi, cls.p_dnoi, fc.sigmoid);
    stages[3].record(ms_since(t0));

    t0 = Clock::now();
    const nirfuse::ImagePlanar denoised = nirfuse::denoise_texture(vis.texture, guide, s, fc);
    stages[4].record(ms_since(t0));

    t0 = Clock::now();
    nirfuse::ImagePlanar f_v(rgb.width(), rgb.height(), 1);
    for (std::size_t i = 0; i < f_v.data().size(); ++i) {
      f_v.data()[i] = std::clamp(
          vis.structure.data()[i] + denoised.data()[i] + nir_dec.texture.data()[i], 0.0, 1.0);
    }
    const nirfuse::ImagePlanar fused = nirfuse::hsv_planes_to_rgb(hsv.h, hsv.s, f_v);
    (void)fused;
    color_ms += ms_since(t0);
    stages[5].record(color_ms);
  }

  std::printf("%-10s %12s %12s\n", "stage", "mean_ms", "min_ms");
  for (const Stage& st : stages) {
    std::printf("%-10s %12.3f %12.3f\n", st.name, st.sum / repeats, st.best);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visible/NIR image fusion via texture-structure decomposition"};
  app.require_subcommand(1);

  std::string rgb_path, nir_path, out_path, img_path;
  std::string structure_path, texture_path, fused_path, model_out;
  std::string noisy_dir, clean_dir;
  std::string config_path, model_flag, trace_dir, csv_path;
  std::string classify_model = "builtin";
  double sigma = 0.0;
  std::uint64_t seed = 0;
  int repeats = 3;

  CLI::App* fuse = app.add_subcommand("fuse", "Fuse a registered RGB/NIR pair");
  fuse->add_option("rgb", rgb_path, "visible (RGB) image")->required();
  fuse->add_option("nir", nir_path, "near-infrared image")->required();
  fuse->add_option("out", out_path, "fused output image")->required();
  fuse->add_option("--config", config_path, "config file (flat key = value)");
  fuse->add_option("--model", model_flag, "noise model file or 'builtin'");
  fuse->add_option("--trace-dir", trace_dir, "directory for intermediate planes");

  CLI::App* dec = app.add_subcommand("decompose", "Split an image into structure + texture");
  dec->add_option("img", img_path, "input image")->required();
  dec->add_option("structure", structure_path, "structure output")->required();
  dec->add_option("texture", texture_path, "texture output (+0.5 offset encoding)")->required();
  dec->add_option("--config", config_path, "config file");

  CLI::App* den = app.add_subcommand("denoise", "Adaptive texture denoising of one image");
  den->add_option("img", img_path, "input image")->required();
  den->add_option("out", out_path, "denoised output image")->required();
  den->add_option("--config", config_path, "config file");
  den->add_option("--model", model_flag, "noise model file or 'builtin'");

  CLI::App* train = app.add_subcommand("train", "Train the noise model from image directories");
  train->add_option("noisy_dir", noisy_dir, "directory of noisy images")->required();
  train->add_option("clean_dir", clean_dir, "directory of clean images")->required();
  train->add_option("model_out", model_out, "output model file")->required();
  train->add_option("--config", config_path, "config file");

  CLI::App* cls = app.add_subcommand("classify", "Classify one image as noisy/noiseless");
  cls->add_option("img", img_path, "input image")->required();
  cls->add_option("--model", classify_model, "noise model file or 'builtin'")
      ->capture_default_str();
  cls->add_option("--config", config_path, "config file");

  CLI::App* met = app.add_subcommand("metrics", "Fusion quality metrics for a triple");
  met->add_option("rgb", rgb_path, "visible source image")->required();
  met->add_option("nir", nir_path, "NIR source image")->required();
  met->add_option("fused", fused_path, "fused image to score")->required();
  met->add_option("--csv", csv_path, "append the CSV row to this file");
  met->add_option("--config", config_path, "config file");

  CLI::App* noise = app.add_subcommand("add-noise", "Add seeded Gaussian noise to an image");
  noise->add_option("img", img_path, "input image")->required();
  noise->add_option("out", out_path, "output image")->required();
  noise->add_option("--sigma", sigma, "noise standard deviation in [0,1] units")->required();
  noise->add_option("--seed", seed, "RNG seed")->capture_default_str();

  CLI::App* bench = app.add_subcommand("bench", "Per-stage pipeline timings");
  bench->add_option("rgb", rgb_path, "visible image")->required();
  bench->add_option("nir", nir_path, "NIR image")->required();
  bench->add_option("--repeats", repeats, "number of timed repetitions")->capture_default_str();
  bench->add_option("--config", config_path, "config file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fuse->parsed()) {
      return cmd_fuse(rgb_path, nir_path, out_path, config_path, model_flag, trace_dir);
    }
    if (dec->parsed()) {
      return cmd_decompose(img_path, structure_path, texture_path, config_path);
    }
    if (den->parsed()) return cmd_denoise(img_path, out_path, config_path, model_flag);
    if (train->parsed()) return cmd_train(noisy_dir, clean_dir, model_out, config_path);
    if (cls->parsed()) return cmd_classify(img_path, classify_model, config_path);
    if (met->parsed()) {
      return cmd_metrics(rgb_path, nir_path, fused_path, csv_path, config_path);
    }
    if (noise->parsed()) return cmd_add_noise(img_path, out_path, sigma, seed);
    if (bench->parsed()) return cmd_bench(rgb_path, nir_path, repeats, config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
