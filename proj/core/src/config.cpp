#include "nirfuse/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace nirfuse {

namespace {

std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.erase(s.begin());
  while (!s.empty() && is_space(s.back())) s.pop_back();
  return s;
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw Error("config: bad number for '" + key + "': " + value);
  }
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw Error("config: bad integer for '" + key + "': " + value);
  }
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw Error("config: bad flag for '" + key + "' (use true or false): " + value);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct KeyEntry {
  std::string key;
  std::function<void(ToolConfig&, const std::string&)> set;
  std::function<std::string(const ToolConfig&)> get;
};

std::vector<KeyEntry> build_key_table() {
  std::vector<KeyEntry> keys;

  auto add_double = [&keys](std::string key, std::function<double&(ToolConfig&)> ref) {
    keys.push_back(
        {key,
         [key, ref](ToolConfig& c, const std::string& v) { ref(c) = parse_double(key, v); },
         [ref](const ToolConfig& c) { return format_double(ref(const_cast<ToolConfig&>(c))); }});
  };
  auto add_int = [&keys](std::string key, std::function<int&(ToolConfig&)> ref) {
    keys.push_back(
        {key, [key, ref](ToolConfig& c, const std::string& v) { ref(c) = parse_int(key, v); },
         [ref](const ToolConfig& c) {
           return std::to_string(ref(const_cast<ToolConfig&>(c)));
         }});
  };
  auto add_bool = [&keys](std::string key, std::function<bool&(ToolConfig&)> ref) {
    keys.push_back(
        {key, [key, ref](ToolConfig& c, const std::string& v) { ref(c) = parse_bool(key, v); },
         [ref](const ToolConfig& c) {
           return std::string(ref(const_cast<ToolConfig&>(c)) ? "true" : "false");
         }});
  };

  const auto add_rtv = [&](const std::string& prefix, RtvParams FusionConfig::*params) {
    add_double(prefix + ".lambda",
               [params](ToolConfig& c) -> double& { return (c.fusion.*params).lambda; });
    add_double(prefix + ".eps",
               [params](ToolConfig& c) -> double& { return (c.fusion.*params).eps; });
    add_double(prefix + ".eps_w",
               [params](ToolConfig& c) -> double& { return (c.fusion.*params).eps_w; });
    add_double(prefix + ".sigma_spatial",
               [params](ToolConfig& c) -> double& { return (c.fusion.*params).sigma_spatial; });
    add_int(prefix + ".iterations",
            [params](ToolConfig& c) -> int& { return (c.fusion.*params).iterations; });
    add_double(prefix + ".solver_tol",
               [params](ToolConfig& c) -> double& { return (c.fusion.*params).solver_tol; });
    add_int(prefix + ".solver_max_steps",
            [params](ToolConfig& c) -> int& { return (c.fusion.*params).solver_max_steps; });
  };
  add_rtv("rtv_vis", &FusionConfig::rtv_vis);
  add_rtv("rtv_nir", &FusionConfig::rtv_nir);

  add_int("jblf.radius", [](ToolConfig& c) -> int& { return c.fusion.jblf.radius; });
  add_double("jblf.r_threshold",
             [](ToolConfig& c) -> double& { return c.fusion.jblf.r_threshold; });

  add_double("sigmoid.a", [](ToolConfig& c) -> double& { return c.fusion.sigmoid.a; });
  add_double("sigmoid.b", [](ToolConfig& c) -> double& { return c.fusion.sigmoid.b; });
  add_double("sigmoid.alpha", [](ToolConfig& c) -> double& { return c.fusion.sigmoid.alpha; });
  add_bool("sigmoid.paper_literal_k",
           [](ToolConfig& c) -> bool& { return c.fusion.sigmoid.paper_literal_k; });

  add_int("variance_window", [](ToolConfig& c) -> int& { return c.fusion.variance_window; });
  add_int("histogram_bins", [](ToolConfig& c) -> int& { return c.fusion.histogram_bins; });
  keys.push_back({"model_path",
                  [](ToolConfig& c, const std::string& v) { c.fusion.model_path = v; },
                  [](const ToolConfig& c) { return c.fusion.model_path; }});
  add_bool("clamp_output", [](ToolConfig& c) -> bool& { return c.fusion.clamp_output; });
  add_bool("standard_gaussian",
           [](ToolConfig& c) -> bool& { return c.fusion.standard_gaussian; });

  add_double("ssim.c1", [](ToolConfig& c) -> double& { return c.ssim.c1; });
  add_double("ssim.c2", [](ToolConfig& c) -> double& { return c.ssim.c2; });
  add_int("ssim.window_size", [](ToolConfig& c) -> int& { return c.ssim.window_size; });
  add_double("ssim.window_sigma", [](ToolConfig& c) -> double& { return c.ssim.window_sigma; });

  add_double("qabf.gamma_g", [](ToolConfig& c) -> double& { return c.qabf.gamma_g; });
  add_double("qabf.kappa_g", [](ToolConfig& c) -> double& { return c.qabf.kappa_g; });
  add_double("qabf.sigma_g", [](ToolConfig& c) -> double& { return c.qabf.sigma_g; });
  add_double("qabf.gamma_a", [](ToolConfig& c) -> double& { return c.qabf.gamma_a; });
  add_double("qabf.kappa_a", [](ToolConfig& c) -> double& { return c.qabf.kappa_a; });
  add_double("qabf.sigma_a", [](ToolConfig& c) -> double& { return c.qabf.sigma_a; });
  add_double("qabf.l_exponent", [](ToolConfig& c) -> double& { return c.qabf.l_exponent; });

  add_int("viff.levels", [](ToolConfig& c) -> int& { return c.viff_levels; });
  return keys;
}

const std::vector<KeyEntry>& key_table() {
  static const std::vector<KeyEntry> table = build_key_table();
  return table;
}

}  // namespace

ToolConfig parse_config_text(const std::string& text) {
  ToolConfig config;
  std::map<std::string, const KeyEntry*> table;
  for (const KeyEntry& e : key_table()) table[e.key] = &e;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("config: line " + std::to_string(lineno) + " is not 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = table.find(key);
    if (it == table.end()) {
      throw Error("config: unknown key '" + key + "' at line " + std::to_string(lineno));
    }
    if (!seen.insert(key).second) {
      throw Error("config: duplicate key '" + key + "' at line " + std::to_string(lineno));
    }
    it->second->set(config, value);
  }

  config.fusion.validate();
  config.ssim.validate();
  config.qabf.validate();
  if (config.viff_levels < 1) throw Error("config: viff.levels must be >= 1");
  return config;
}

ToolConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("unreadable file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_to_text(const ToolConfig& config) {
  std::ostringstream out;
  for (const KeyEntry& e : key_table()) {
    out << e.key << " = " << e.get(config) << "\n";
  }
  return out.str();
}

}  // namespace nirfuse
