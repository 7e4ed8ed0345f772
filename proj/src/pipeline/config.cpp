#include <fstream>
#include <map>
#include <functional>
#include <sstream>

#include "ddff/nn/ddffnet.hpp"
#include "ddff/classic_dff.hpp"
#include "ddff/pipeline.hpp"

namespace ddff::pipeline {

namespace {

enum class Kind { Int, Num, Str, Bool, Array };

struct Field {
  std::string key;
  Kind kind;
  json fallback;  // null: required
  std::function<std::string(const json&)> check = {};
};

std::string positive(const json& v) { return v.get<double>() > 0 ? "" : "must be positive"; }
std::string non_negative(const json& v) { return v.get<double>() >= 0 ? "" : "must be >= 0"; }
std::string unit_half_open(const json& v) {
  const double x = v.get<double>();
  return x >= 0 && x < 1 ? "" : "must be in [0,1)";
}
std::string unit_interval(const json& v) {
  const double x = v.get<double>();
  return x > 0 && x <= 1 ? "" : "must be in (0,1]";
}
std::string one_of(const json& v, std::initializer_list<const char*> xs) {
  for (const char* x : xs)
    if (v.get<std::string>() == x) return "";
  std::string msg = "must be one of";
  for (const char* x : xs) msg += std::string(" ") + x;
  return msg;
}

const std::vector<Field>& fields(const std::string& command) {
  static const std::map<std::string, std::vector<Field>> table = {
      {"synth",
       {{"output", Kind::Str, nullptr},
        {"scenes", Kind::Int, 8, positive},
        {"stacks_per_scene", Kind::Int, 1, positive},
        {"height", Kind::Int, 96, [](const json& v) { return v.get<int>() >= 32 ? "" : "must be >= 32"; }},
        {"width", Kind::Int, 96, [](const json& v) { return v.get<int>() >= 32 ? "" : "must be >= 32"; }},
        {"channels", Kind::Int, 3,
         [](const json& v) { return v.get<int>() == 1 || v.get<int>() == 3 ? "" : "must be 1 or 3"; }},
        {"grid", Kind::Int, 9,
         [](const json& v) { return v.get<int>() >= 3 && v.get<int>() % 2 ? "" : "must be an odd integer >= 3"; }},
        {"planes_min", Kind::Int, 2, positive},
        {"planes_max", Kind::Int, 3, positive},
        {"depth_near", Kind::Num, 0.5, positive},
        {"depth_far", Kind::Num, 7.0, positive},
        {"stack_size", Kind::Int, 10, [](const json& v) { return v.get<int>() >= 2 ? "" : "must be >= 2"; }},
        {"stack_near", Kind::Num, 0.28, positive},
        {"stack_far", Kind::Num, 0.02, non_negative},
        {"snap_to_stack", Kind::Bool, false},
        {"dropout_fraction", Kind::Num, 0.0, unit_half_open},
        {"groundtruth", Kind::Str, "disparity", [](const json& v) { return one_of(v, {"disparity", "depth"}); }},
        {"write_lightfield", Kind::Bool, false}}},
      {"refocus",
       {{"input", Kind::Str, nullptr},
        {"output", Kind::Str, nullptr},
        {"intrinsics_file", Kind::Str, ""},
        {"grid", Kind::Int, 9, positive},
        {"stack_size", Kind::Int, 10, positive},
        {"stack_near", Kind::Num, 0.28, positive},
        {"stack_far", Kind::Num, 0.02, non_negative}}},
      {"train",
       {{"dataset", Kind::Str, nullptr},
        {"checkpoint", Kind::Str, nullptr},
        {"variant", Kind::Str, "CC3",
         [](const json& v) { return one_of(v, {"UNPOOL", "BL", "UPCONV", "CC1", "CC2", "CC3"}); }},
        {"width_multiplier", Kind::Num, 1.0, unit_interval},
        {"dropout_p", Kind::Num, 0.5, unit_half_open},
        {"input", Kind::Str, "focal_stack", [](const json& v) { return one_of(v, {"focal_stack", "dflf"}); }},
        {"dflf_pattern", Kind::Array, json::array()},
        {"patch_size", Kind::Int, 224, [](const json& v) { return v.get<int>() >= 32 ? "" : "must be >= 32"; }},
        {"patch_stride", Kind::Int, 56, positive},
        {"max_missing", Kind::Num, 0.2,
         [](const json& v) { return v.get<double>() >= 0 && v.get<double>() <= 1 ? "" : "must be in [0,1]"; }},
        {"learning_rate", Kind::Num, 1e-3, positive},
        {"momentum", Kind::Num, 0.9, unit_half_open},
        {"batch_size", Kind::Int, 2, positive},
        {"lr_decay", Kind::Num, 0.9, unit_interval},
        {"decay_epochs", Kind::Int, 4, positive},
        {"weight_decay", Kind::Num, 5e-4, non_negative},
        {"epochs", Kind::Int, 10, positive},
        {"validation_fraction", Kind::Num, 0.2, unit_half_open}}},
      {"eval",
       {{"dataset", Kind::Str, nullptr},
        {"output", Kind::Str, nullptr},
        {"baseline", Kind::Str, "checkpoint",
         [](const json& v) { return one_of(v, {"checkpoint", "classic", "external"}); }},
        {"checkpoint", Kind::Str, ""},
        {"predictions", Kind::Str, ""},
        {"prediction_kind", Kind::Str, "disparity", [](const json& v) { return one_of(v, {"disparity", "depth"}); }},
        {"measure", Kind::Str, "modified-laplacian",
         [](const json& v) {
           try {
             parse_focus_measure(v.get<std::string>());
             return std::string();
           } catch (const std::exception& e) {
             return std::string(e.what());
           }
         }},
        {"window", Kind::Int, 9,
         [](const json& v) { return v.get<int>() >= 1 && v.get<int>() % 2 ? "" : "must be an odd positive integer"; }},
        {"taus", Kind::Array, json::array({0.07})},
        {"badpix_taus", Kind::Array, json::array()},
        {"depth_metrics", Kind::Bool, true},
        {"lytro_rescale", Kind::Bool, false}}},
      {"predict",
       {{"checkpoint", Kind::Str, nullptr},
        {"dataset", Kind::Str, nullptr},
        {"output", Kind::Str, nullptr},
        {"scene", Kind::Str, ""},
        {"stack", Kind::Int, 0, non_negative},
        {"dump_score_maps", Kind::Bool, false}}},
      {"plot", {{"manifests", Kind::Array, nullptr}, {"output", Kind::Str, nullptr}}},
  };
  const auto it = table.find(command);
  if (it == table.end()) throw ConfigError("unknown command '" + command + "'");
  return it->second;
}

bool kind_matches(const json& v, Kind k) {
  switch (k) {
    case Kind::Int: return v.is_number_integer();
    case Kind::Num: return v.is_number();
    case Kind::Str: return v.is_string();
    case Kind::Bool: return v.is_boolean();
    case Kind::Array: return v.is_array();
  }
  return false;
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Int: return "an integer";
    case Kind::Num: return "a number";
    case Kind::Str: return "a string";
    case Kind::Bool: return "a boolean";
    case Kind::Array: return "an array";
  }
  return "?";
}

std::string number_list_check(const json& arr, bool strictly_increasing) {
  double prev = 0;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number() || !(arr[i].get<double>() > 0)) return "entries must be positive numbers";
    if (strictly_increasing && i > 0 && !(arr[i].get<double>() > prev)) return "entries must be strictly increasing";
    prev = arr[i].get<double>();
  }
  return "";
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"synth", "refocus", "train", "eval", "predict", "plot"};
  return c;
}

json load_config(const fs::path& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path.string());
  try {
    json j = json::parse(is);
    if (!j.is_object()) throw ConfigError("config: top level of " + path.string() + " must be an object");
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path.string() + " is not valid JSON: " + e.what());
  }
}

void apply_override(json& config, const std::string& command, const std::string& key, const std::string& value) {
  if (key.empty()) throw ConfigError("empty override key");
  std::string path = key;
  if (key.find('.') == std::string::npos && key != "seed" && key != "manifest_dir") path = command + "." + key;
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;
  }
  json* node = &config;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (parts[i].empty()) throw ConfigError("override '" + key + "': empty path component");
    json& next = (*node)[parts[i]];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) throw ConfigError("override '" + key + "': '" + parts[i] + "' is not a section");
    node = &next;
  }
  (*node)[parts.back()] = parsed;
}

json resolve_config(const std::string& command, const json& config) {
  const auto& spec = fields(command);
  std::vector<std::string> errors;
  json section = config.contains(command) ? config.at(command) : json::object();
  if (!section.is_object()) throw ConfigError(command + ": section must be an object");

  json out;
  out["command"] = command;
  if (config.contains("seed")) {
    if (!config["seed"].is_number_integer() || config["seed"].get<long long>() < 0)
      errors.push_back("seed: expected a non-negative integer, got " + config["seed"].dump());
    else
      out["seed"] = config["seed"];
  } else if (command == "synth" || command == "train") {
    errors.push_back("seed: required for '" + command + "' (pass --seed N)");
  } else {
    out["seed"] = 0;
  }
  out["manifest_dir"] = config.value("manifest_dir", std::string("runs"));
  if (!out["manifest_dir"].is_string()) errors.push_back("manifest_dir: expected a string");

  json resolved = json::object();
  for (const auto& f : spec) {
    const std::string name = command + "." + f.key;
    if (!section.contains(f.key)) {
      if (f.fallback.is_null())
        errors.push_back(name + ": required field is missing");
      else
        resolved[f.key] = f.fallback;
      continue;
    }
    const json& v = section.at(f.key);
    if (!kind_matches(v, f.kind)) {
      errors.push_back(name + ": expected " + kind_name(f.kind) + ", got " + v.dump());
      continue;
    }
    if (f.check) {
      const std::string msg = f.check(v);
      if (!msg.empty()) {
        errors.push_back(name + ": " + msg + " (got " + v.dump() + ")");
        continue;
      }
    }
    resolved[f.key] = v;
  }
  for (const auto& [k, v] : section.items()) {
    bool known = false;
    for (const auto& f : spec) known = known || f.key == k;
    if (!known) errors.push_back(command + "." + k + ": unknown field");
  }

  if (errors.empty()) {
    if (command == "synth") {
      if (resolved["planes_min"].get<int>() > resolved["planes_max"].get<int>())
        errors.push_back("synth.planes_min: must not exceed synth.planes_max");
      if (!(resolved["depth_near"].get<double>() < resolved["depth_far"].get<double>()))
        errors.push_back("synth.depth_near: must be smaller than synth.depth_far");
      if (!(resolved["stack_near"].get<double>() > resolved["stack_far"].get<double>()))
        errors.push_back("synth.stack_near: must exceed synth.stack_far");
    } else if (command == "refocus") {
      if (!(resolved["stack_near"].get<double>() > resolved["stack_far"].get<double>()))
        errors.push_back("refocus.stack_near: must exceed refocus.stack_far");
    } else if (command == "train") {
      for (const auto& e : resolved["dflf_pattern"])
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
          errors.push_back("train.dflf_pattern: entries must be [u, v] integer pairs");
          break;
        }
    } else if (command == "eval") {
      const std::string b = resolved["baseline"];
      if (b == "checkpoint" && resolved["checkpoint"].get<std::string>().empty())
        errors.push_back("eval.checkpoint: required when eval.baseline is 'checkpoint'");
      if (b == "external" && resolved["predictions"].get<std::string>().empty())
        errors.push_back("eval.predictions: required when eval.baseline is 'external'");
      if (const auto m = number_list_check(resolved["taus"], false); !m.empty()) errors.push_back("eval.taus: " + m);
      if (resolved["taus"].empty()) errors.push_back("eval.taus: must not be empty");
      if (const auto m = number_list_check(resolved["badpix_taus"], true); !m.empty())
        errors.push_back("eval.badpix_taus: " + m);
      if (resolved["badpix_taus"].empty())
        for (int k = 1; k <= 50; ++k) resolved["badpix_taus"].push_back(0.01 * k);
    } else if (command == "plot") {
      for (const auto& e : resolved["manifests"])
        if (!e.is_string()) {
          errors.push_back("plot.manifests: entries must be path strings");
          break;
        }
      if (resolved["manifests"].empty()) errors.push_back("plot.manifests: must not be empty");
    }
  }

  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  out[command] = resolved;
  return out;
}

}  // namespace ddff::pipeline
