#include <doctest.h>

#include "nirfuse/config.hpp"

using namespace nirfuse;

TEST_CASE("empty text keeps the documented defaults") {
  const ToolConfig config = parse_config_text("");
  CHECK(config.fusion.rtv_vis.lambda == 0.015);
  CHECK(config.fusion.rtv_nir.lambda == 0.01);
  CHECK(config.fusion.rtv_vis.eps == 1e-3);
  CHECK(config.fusion.rtv_vis.eps_w == 1e-2);
  CHECK(config.fusion.rtv_vis.sigma_spatial == 3.0);
  CHECK(config.fusion.rtv_vis.iterations == 4);
  CHECK(config.fusion.jblf.r_threshold == 0.2);
  CHECK(config.fusion.jblf.radius == 15);
  CHECK(config.fusion.sigmoid.alpha == 10.0);
  CHECK(config.fusion.model_path == "builtin");
  CHECK(config.ssim.c1 == 1e-4);
  CHECK(config.ssim.window_size == 11);
  CHECK(config.qabf.gamma_g == 0.9994);
  CHECK(config.qabf.kappa_a == -22.0);
  CHECK(config.viff_levels == 4);
}

TEST_CASE("values are parsed and applied") {
  const ToolConfig config = parse_config_text(
      "rtv_vis.lambda = 0.02\n"
      "rtv_nir.iterations = 2\n"
      "jblf.r_threshold = 0.3\n"
      "sigmoid.paper_literal_k = true\n"
      "variance_window = 5\n"
      "model_path = /tmp/m.nbm\n"
      "clamp_output = false\n"
      "ssim.window_sigma = 2.0\n"
      "qabf.l_exponent = 1.5\n"
      "viff.levels = 3\n");
  CHECK(config.fusion.rtv_vis.lambda == 0.02);
  CHECK(config.fusion.rtv_nir.iterations == 2);
  CHECK(config.fusion.jblf.r_threshold == 0.3);
  CHECK(config.fusion.sigmoid.paper_literal_k);
  CHECK(config.fusion.variance_window == 5);
  CHECK(config.fusion.model_path == "/tmp/m.nbm");
  CHECK_FALSE(config.fusion.clamp_output);
  CHECK(config.ssim.window_sigma == 2.0);
  CHECK(config.qabf.l_exponent == 1.5);
  CHECK(config.viff_levels == 3);
}

TEST_CASE("comments and blank lines are ignored") {
  const ToolConfig config = parse_config_text(
      "# full-line comment\n"
      "\n"
      "rtv_vis.lambda = 0.05  # trailing comment\n");
  CHECK(config.fusion.rtv_vis.lambda == 0.05);
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_WITH_AS(parse_config_text("rtv_vis.lambdaa = 1\n"),
                       doctest::Contains("unknown key"), Error);
  CHECK_THROWS_WITH_AS(parse_config_text("jblf.s = 1\n"), doctest::Contains("unknown key"),
                       Error);
}

TEST_CASE("malformed lines and values are rejected") {
  CHECK_THROWS_AS(parse_config_text("rtv_vis.lambda 0.05\n"), Error);
  CHECK_THROWS_AS(parse_config_text("rtv_vis.lambda = abc\n"), Error);
  CHECK_THROWS_AS(parse_config_text("rtv_vis.iterations = 1.5\n"), Error);
  CHECK_THROWS_AS(parse_config_text("clamp_output = yes\n"), Error);
  CHECK_THROWS_AS(parse_config_text("rtv_vis.lambda = 0.1\nrtv_vis.lambda = 0.2\n"), Error);
}

TEST_CASE("parsed values must satisfy the target invariants") {
  CHECK_THROWS_AS(parse_config_text("rtv_vis.lambda = -1\n"), Error);
  CHECK_THROWS_AS(parse_config_text("rtv_vis.eps = 0\n"), Error);
  CHECK_THROWS_AS(parse_config_text("variance_window = 4\n"), Error);
  CHECK_THROWS_AS(parse_config_text("histogram_bins = 1\n"), Error);
  CHECK_THROWS_AS(parse_config_text("sigmoid.a = 0\n"), Error);
  CHECK_THROWS_AS(parse_config_text("ssim.c1 = -0.1\n"), Error);
  CHECK_THROWS_AS(parse_config_text("qabf.gamma_g = 1.5\n"), Error);
  CHECK_THROWS_AS(parse_config_text("viff.levels = 0\n"), Error);
}

TEST_CASE("config round trips through its own serialization") {
  ToolConfig config = parse_config_text("rtv_vis.lambda = 0.021\nsigmoid.alpha = 7\n");
  const std::string text = config_to_text(config);
  const ToolConfig back = parse_config_text(text);
  CHECK(back.fusion.rtv_vis.lambda == config.fusion.rtv_vis.lambda);
  CHECK(back.fusion.sigmoid.alpha == config.fusion.sigmoid.alpha);
  CHECK(config_to_text(back) == text);
}

TEST_CASE("missing config file is an error") {
  CHECK_THROWS_AS(parse_config_file("/no/such/config.conf"), Error);
}
