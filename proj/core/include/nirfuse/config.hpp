#pragma once

#include <string>

#include "nirfuse/fusion.hpp"
#include "nirfuse/metrics.hpp"

namespace nirfuse {

/// Everything the CLI reads from a config file: the fusion tunables plus the
/// metric constants.
struct ToolConfig {
  FusionConfig fusion;
  SsimParams ssim;
  QabfParams qabf;
  int viff_levels = 4;
};

/// Parses the flat dotted-key `key = value` format. Unknown keys are
/// rejected, missing keys keep their defaults, and the resulting values must
/// satisfy the target-type invariants. `#` starts a comment; blank lines are
/// ignored.
ToolConfig parse_config_text(const std::string& text);
ToolConfig parse_config_file(const std::string& path);

/// Serializes every recognized key with its current value (the inverse of
/// parse_config_text for round-trip checks and --help documentation).
std::string config_to_text(const ToolConfig& config);

}  // namespace nirfuse
