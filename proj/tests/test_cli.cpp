#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nirfuse/image.hpp"
#include "nirfuse/image_io.hpp"
#include "nirfuse/noise_model.hpp"
#include "nirfuse/synthetic.hpp"

using namespace nirfuse;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(NIRFUSE_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    result.output.append(buf.data(), got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("nirfuse_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

ImagePlanar structured_rgb(int w, int h, std::uint64_t seed) {
  const ImagePlanar luma = synthetic::random_clean_plane(w, h, seed);
  ImagePlanar rgb(w, h, 3);
  for (std::size_t i = 0; i < rgb.plane_size(); ++i) {
    rgb.plane(0)[i] = luma.data()[i] * 0.95;
    rgb.plane(1)[i] = luma.data()[i] * 0.85;
    rgb.plane(2)[i] = luma.data()[i] * 0.75;
  }
  return rgb;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("fuse writes a loadable image of matching size") {
  TempDir dir;
  save_image(structured_rgb(32, 32, 1), dir.file("rgb.png"));
  save_image(synthetic::random_clean_plane(32, 32, 2), dir.file("nir.png"));

  const RunResult r =
      run_cli("fuse " + dir.file("rgb.png") + " " + dir.file("nir.png") + " " +
              dir.file("fused.png"));
  CHECK(r.exit_code == 0);
  const ImagePlanar fused = load_image(dir.file("fused.png"));
  CHECK(fused.width() == 32);
  CHECK(fused.height() == 32);
  CHECK(fused.channels() == 3);
}

TEST_CASE("fuse rejects mismatched dimensions with both sizes named") {
  TempDir dir;
  save_image(structured_rgb(32, 32, 3), dir.file("rgb.png"));
  save_image(synthetic::random_clean_plane(16, 32, 4), dir.file("nir.png"));
  const RunResult r = run_cli("fuse " + dir.file("rgb.png") + " " + dir.file("nir.png") +
                              " " + dir.file("fused.png"));
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("32x32") != std::string::npos);
  CHECK(r.output.find("16x32") != std::string::npos);
}

TEST_CASE("fuse --trace-dir writes exactly the documented set") {
  TempDir dir;
  save_image(structured_rgb(24, 24, 5), dir.file("rgb.png"));
  save_image(synthetic::random_clean_plane(24, 24, 6), dir.file("nir.png"));
  const std::string trace = dir.file("trace");
  const RunResult r = run_cli("fuse " + dir.file("rgb.png") + " " + dir.file("nir.png") +
                              " " + dir.file("fused.png") + " --trace-dir " + trace);
  CHECK(r.exit_code == 0);

  std::vector<std::string> found;
  for (const auto& entry : fs::directory_iterator(trace)) {
    found.push_back(entry.path().filename().string());
  }
  std::sort(found.begin(), found.end());
  const std::vector<std::string> expected = {
      "f_v.png",           "s_nir_structure.png", "s_vis_structure.png", "summary.txt",
      "t_nir_texture.png", "t_vis_denoised.png",  "t_vis_texture.png",
      "variance_guide.png"};
  CHECK(found == expected);
  const std::string summary = read_file(trace + "/summary.txt");
  CHECK(summary.find("label = ") != std::string::npos);
  CHECK(summary.find("s = ") != std::string::npos);
  CHECK(summary.find("f1 = ") != std::string::npos);
}

TEST_CASE("decompose offset encoding reconstructs the input") {
  TempDir dir;
  const ImagePlanar img = synthetic::random_clean_plane(32, 32, 7);
  save_image(img, dir.file("in.png"));
  const RunResult r = run_cli("decompose " + dir.file("in.png") + " " + dir.file("s.png") +
                              " " + dir.file("t.png"));
  CHECK(r.exit_code == 0);
  const ImagePlanar s = load_image(dir.file("s.png"));
  const ImagePlanar t = load_image(dir.file("t.png"));
  const ImagePlanar in = load_image(dir.file("in.png"));
  for (std::size_t i = 0; i < in.plane_size(); ++i) {
    CHECK(std::abs(s.data()[i] + (t.data()[i] - 0.5) - in.data()[i]) <= 2.0 / 255.0);
  }
}

TEST_CASE("decompose of a constant image stores uniform 0.5 texture") {
  TempDir dir;
  ImagePlanar flat(16, 16, 1);
  for (double& v : flat.data()) v = 0.6;
  save_image(flat, dir.file("flat.png"));
  const RunResult r = run_cli("decompose " + dir.file("flat.png") + " " + dir.file("s.png") +
                              " " + dir.file("t.png"));
  CHECK(r.exit_code == 0);
  const ImagePlanar t = load_image(dir.file("t.png"));
  for (double v : t.data()) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("decompose with a missing input fails") {
  TempDir dir;
  const RunResult r = run_cli("decompose " + dir.file("none.png") + " " + dir.file("s.png") +
                              " " + dir.file("t.png"));
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("error:") != std::string::npos);
}

TEST_CASE("denoise writes an output image") {
  TempDir dir;
  const ImagePlanar noisy =
      add_gaussian_noise(synthetic::random_clean_plane(32, 32, 8), 0.05, 9);
  save_image(noisy, dir.file("in.png"));
  const RunResult r = run_cli("denoise " + dir.file("in.png") + " " + dir.file("out.png"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("label = ") != std::string::npos);
  CHECK(load_image(dir.file("out.png")).same_size(noisy));
}

TEST_CASE("train writes a deterministic, loadable model") {
  TempDir dir;
  fs::create_directories(dir.file("noisy"));
  fs::create_directories(dir.file("clean"));
  for (int i = 0; i < 10; ++i) {
    const ImagePlanar clean = synthetic::random_clean_plane(48, 48, 1000 + i);
    save_image(clean, dir.file("clean/img" + std::to_string(i) + ".png"));
    save_image(add_gaussian_noise(clean, 0.05, 2000 + i),
               dir.file("noisy/img" + std::to_string(i) + ".png"));
  }
  const RunResult r = run_cli("train " + dir.file("noisy") + " " + dir.file("clean") + " " +
                              dir.file("model.nbm"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("noisy images: 10") != std::string::npos);
  CHECK(r.output.find("clean images: 10") != std::string::npos);
  CHECK(r.output.find("p(NOI) score histogram") != std::string::npos);
  const NoiseModel model = load_model(dir.file("model.nbm"));
  CHECK(model.histogram_bins == 100);

  // retraining on identical inputs gives identical bytes
  const RunResult again = run_cli("train " + dir.file("noisy") + " " + dir.file("clean") +
                                  " " + dir.file("model2.nbm"));
  CHECK(again.exit_code == 0);
  CHECK(read_file(dir.file("model.nbm")) == read_file(dir.file("model2.nbm")));
}

TEST_CASE("train fails on an empty directory") {
  TempDir dir;
  fs::create_directories(dir.file("noisy"));
  fs::create_directories(dir.file("clean"));
  const RunResult r = run_cli("train " + dir.file("noisy") + " " + dir.file("clean") + " " +
                              dir.file("model.nbm"));
  CHECK(r.exit_code != 0);
}

TEST_CASE("classify labels clean and noisy twins") {
  TempDir dir;
  const ImagePlanar clean = synthetic::random_clean_plane(64, 64, 12345);
  save_image(clean, dir.file("clean.png"));
  save_image(add_gaussian_noise(clean, 0.05, 999), dir.file("noisy.png"));

  const RunResult rc = run_cli("classify " + dir.file("clean.png"));
  CHECK(rc.exit_code == 0);
  CHECK(rc.output.find("label = DNOI") != std::string::npos);

  const RunResult rn = run_cli("classify " + dir.file("noisy.png"));
  CHECK(rn.exit_code == 0);
  CHECK(rn.output.find("label = NOI") != std::string::npos);
  CHECK(rn.output.find("s = ") != std::string::npos);
  CHECK(rn.output.find("f1 = ") != std::string::npos);
}

TEST_CASE("classify with a missing model file fails") {
  TempDir dir;
  save_image(synthetic::random_clean_plane(16, 16, 1), dir.file("img.png"));
  const RunResult r =
      run_cli("classify " + dir.file("img.png") + " --model " + dir.file("no.nbm"));
  CHECK(r.exit_code != 0);
}

TEST_CASE("metrics prints a parseable CSV row") {
  TempDir dir;
  const ImagePlanar rgb = structured_rgb(64, 64, 13);
  save_image(rgb, dir.file("rgb.png"));
  // identity triple: nir = luminance of the stored rgb, fused = rgb
  ImagePlanar luma(64, 64, 1);
  const ImagePlanar stored = load_image(dir.file("rgb.png"));
  for (std::size_t i = 0; i < luma.plane_size(); ++i) {
    luma.data()[i] = std::max({stored.plane(0)[i], stored.plane(1)[i], stored.plane(2)[i]});
  }
  save_image(luma, dir.file("nir.png"));
  fs::copy_file(dir.file("rgb.png"), dir.file("fused.png"));

  const RunResult r = run_cli("metrics " + dir.file("rgb.png") + " " + dir.file("nir.png") +
                              " " + dir.file("fused.png") + " --csv " + dir.file("out.csv"));
  CHECK(r.exit_code == 0);

  // row: image_id,ssim,viff,qabf
  std::istringstream row(r.output);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(row, field, ',')) fields.push_back(field);
  REQUIRE(fields.size() == 4);
  CHECK(fields[0] == "fused");
  CHECK(fields[1] == "1.000000");

  const std::string csv = read_file(dir.file("out.csv"));
  CHECK(csv.find("image_id,ssim,viff,qabf") != std::string::npos);
  CHECK(csv.find("fused,1.000000") != std::string::npos);
}

TEST_CASE("metrics rejects mismatched dimensions") {
  TempDir dir;
  save_image(structured_rgb(32, 32, 14), dir.file("rgb.png"));
  save_image(synthetic::random_clean_plane(16, 16, 15), dir.file("nir.png"));
  save_image(structured_rgb(32, 32, 16), dir.file("fused.png"));
  const RunResult r = run_cli("metrics " + dir.file("rgb.png") + " " + dir.file("nir.png") +
                              " " + dir.file("fused.png"));
  CHECK(r.exit_code != 0);
}

TEST_CASE("add-noise determinism and identity") {
  TempDir dir;
  save_image(synthetic::random_clean_plane(24, 24, 17), dir.file("in.png"));

  CHECK(run_cli("add-noise " + dir.file("in.png") + " " + dir.file("zero.png") +
                " --sigma 0")
            .exit_code == 0);
  CHECK(read_file(dir.file("zero.png")) == read_file(dir.file("in.png")));

  CHECK(run_cli("add-noise " + dir.file("in.png") + " " + dir.file("a.png") +
                " --sigma 0.05 --seed 7")
            .exit_code == 0);
  CHECK(run_cli("add-noise " + dir.file("in.png") + " " + dir.file("b.png") +
                " --sigma 0.05 --seed 7")
            .exit_code == 0);
  CHECK(read_file(dir.file("a.png")) == read_file(dir.file("b.png")));

  const RunResult bad =
      run_cli("add-noise " + dir.file("in.png") + " " + dir.file("c.png") + " --sigma -1");
  CHECK(bad.exit_code != 0);
}

TEST_CASE("bench reports stage accounting") {
  TempDir dir;
  save_image(structured_rgb(48, 48, 18), dir.file("rgb.png"));
  save_image(synthetic::random_clean_plane(48, 48, 19), dir.file("nir.png"));
  const RunResult r =
      run_cli("bench " + dir.file("rgb.png") + " " + dir.file("nir.png") + " --repeats 1");
  CHECK(r.exit_code == 0);

  // parse "name mean min" lines; stage means must sum to <= 1.1 * total
  std::istringstream lines(r.output);
  std::string line;
  double stage_sum = 0.0, total = 0.0;
  int stages_seen = 0;
  while (std::getline(lines, line)) {
    std::istringstream ls(line);
    std::string name;
    double mean, mn;
    if (!(ls >> name >> mean >> mn)) continue;
    if (name == "stage") continue;
    if (name == "total") {
      total = mean;
    } else {
      stage_sum += mean;
      ++stages_seen;
    }
  }
  CHECK(stages_seen == 6);
  CHECK(total > 0.0);
  CHECK(stage_sum <= total * 1.1);

  const RunResult bad = run_cli("bench missing.png also_missing.png --repeats 1");
  CHECK(bad.exit_code != 0);
}

TEST_CASE("every subcommand documents its flags") {
  for (const char* sub :
       {"fuse", "decompose", "denoise", "train", "classify", "metrics", "add-noise", "bench"}) {
    const RunResult r = run_cli(std::string(sub) + " --help");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("Usage") != std::string::npos);
  }
}
