#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ddff/image.hpp"

namespace ddff::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

/// Invalid configuration; maps to exit status 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

const std::vector<std::string>& commands();

/// Empty path gives an empty object.
json load_config(const fs::path& path);

/// `key` is a dot path; bare keys other than `seed` and `manifest_dir` go to the command's section.
/// The value is parsed as JSON when possible, otherwise kept as a string.
void apply_override(json& config, const std::string& command, const std::string& key, const std::string& value);

/// Defaults merged with the user config and checked field by field. Throws ConfigError.
json resolve_config(const std::string& command, const json& config);

/// Runs one command on a resolved config and writes its run manifest. Returns the exit status.
int run_command(const std::string& command, const json& resolved, std::ostream& log);

/// Full command line: `ddff <command> [--config path] [--key value ...]`.
int main_entry(int argc, const char* const* argv, std::ostream& log, std::ostream& err);

/// Jet colormap of `values` scaled by 1 / vmax (clamped to [0,1]).
Image colorize(const Plane<double>& values, double vmax);

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};
/// Line chart rendered as an RGB image (no text; the CSV next to it carries the labels).
Image render_line_plot(const std::vector<Series>& series, int width = 640, int height = 400);

struct Whisker {
  std::string label;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};
Whisker whisker_stats(std::vector<double> values, const std::string& label);
Image render_whiskers(const std::vector<Whisker>& whiskers, int width = 640, int height = 400);

/// Hex FNV-1a 64 of the file contents, in order.
std::string hash_files(const std::vector<fs::path>& files);

}  // namespace ddff::pipeline
