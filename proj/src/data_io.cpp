#include "ddff/data_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ddff/serialization.hpp"

namespace ddff {

using nlohmann::json;

void to_json(json& j, const MainLens& m) {
  j = json{{"focal_x", m.focal_x}, {"focal_y", m.focal_y}, {"center_x", m.center_x}, {"center_y", m.center_y},
           {"radius", m.radius_m},  {"K1", m.K1},           {"K2", m.K2},             {"k1", m.k1},
           {"k2", m.k2}};
}

void from_json(const json& j, MainLens& m) {
  m.focal_x = j.value("focal_x", m.focal_x);
  m.focal_y = j.value("focal_y", m.focal_y);
  m.center_x = j.value("center_x", m.center_x);
  m.center_y = j.value("center_y", m.center_y);
  m.radius_m = j.value("radius", m.radius_m);
  m.K1 = j.value("K1", m.K1);
  m.K2 = j.value("K2", m.K2);
  m.k1 = j.value("k1", m.k1);
  m.k2 = j.value("k2", m.k2);
}

void to_json(json& j, const CameraIntrinsics& c) {
  j = json{{"focal_length_px", c.focal_length_px}, {"center_u", c.center_u}, {"center_v", c.center_v},
           {"baseline_m_per_px", c.baseline_m_per_px}, {"principal_x", c.principal_x},
           {"principal_y", c.principal_y}, {"grid_u", c.grid_u}, {"grid_v", c.grid_v}};
  if (c.main_lens) j["main_lens"] = *c.main_lens;
}

void from_json(const json& j, CameraIntrinsics& c) {
  c.focal_length_px = j.value("focal_length_px", c.focal_length_px);
  c.center_u = j.value("center_u", c.center_u);
  c.center_v = j.value("center_v", c.center_v);
  c.baseline_m_per_px = j.value("baseline_m_per_px", c.baseline_m_per_px);
  c.principal_x = j.value("principal_x", c.principal_x);
  c.principal_y = j.value("principal_y", c.principal_y);
  c.grid_u = j.value("grid_u", c.grid_u);
  c.grid_v = j.value("grid_v", c.grid_v);
  if (j.contains("main_lens")) {
    MainLens m = c.main_lens.value_or(MainLens{});
    from_json(j.at("main_lens"), m);
    c.main_lens = m;
  }
}

}  // namespace ddff

namespace ddff::io {

using nlohmann::json;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw LoadError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw LoadError(path.string() + ": cannot open for writing");
  os << text;
  if (!os) throw LoadError(path.string() + ": write failed");
}

const char* kind_name(Groundtruth g) { return g == Groundtruth::Depth ? "depth" : "disparity"; }

std::string view_file_name(int u, int v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "view_%02d_%02d.png", u, v);
  return buf;
}

json stack_json(const StackEntry& s) {
  json j{{"name", s.name},
         {"slices", s.slices},
         {"focus_disparities", s.focus_disparities},
         {"groundtruth", s.groundtruth},
         {"groundtruth_kind", kind_name(s.groundtruth_kind)},
         {"intrinsics", s.intrinsics}};
  if (!s.lightfield.empty()) j["lightfield"] = s.lightfield;
  return j;
}

}  // namespace

std::string stack_dir_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "stack_%04zu", index);
  return buf;
}

std::string slice_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "slice_%02zu.png", index);
  return buf;
}

Plane<float> read_pfm(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw LoadError(path.string() + ": cannot open");
  std::string magic;
  int w = 0, h = 0;
  double scale = 0;
  is >> magic >> w >> h >> scale;
  if (!is || magic != "Pf" || w <= 0 || h <= 0 || scale == 0.0)
    throw LoadError(path.string() + ": not a single-channel PFM");
  is.get();
  Plane<float> p(h, w);
  std::vector<std::uint32_t> row(static_cast<std::size_t>(w));
  const bool swap = (scale > 0) != (std::endian::native == std::endian::big);
  for (int y = h - 1; y >= 0; --y) {
    if (!is.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(4 * w)))
      throw LoadError(path.string() + ": truncated PFM data");
    for (int x = 0; x < w; ++x) {
      std::uint32_t bits = row[x];
      if (swap) bits = __builtin_bswap32(bits);
      p(y, x) = std::bit_cast<float>(bits);
    }
  }
  return p;
}

void write_pfm(const fs::path& path, const Plane<float>& plane) {
  static_assert(std::endian::native == std::endian::little, "PFM writer assumes a little-endian host");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw LoadError(path.string() + ": cannot open for writing");
  os << "Pf\n" << plane.cols() << ' ' << plane.rows() << "\n-1.0\n";
  for (Eigen::Index y = plane.rows() - 1; y >= 0; --y)
    os.write(reinterpret_cast<const char*>(plane.data() + y * plane.cols()),
             static_cast<std::streamsize>(4 * plane.cols()));
  if (!os) throw LoadError(path.string() + ": write failed");
}

void write_disparity(const fs::path& path, const DisparityMap& d) {
  write_pfm(path, d.mask.select(d.values, 0.0).cast<float>());
}

DisparityMap read_disparity(const fs::path& path) {
  const Plane<float> p = read_pfm(path);
  if (!p.isFinite().all()) throw LoadError(path.string() + ": non-finite disparity values");
  return DisparityMap::from_positive(p.cast<double>());
}

void write_depth_png(const fs::path& path, const DepthMap& z) {
  Plane16 mm(z.height(), z.width());
  for (Eigen::Index y = 0; y < z.height(); ++y)
    for (Eigen::Index x = 0; x < z.width(); ++x) {
      const double v = z.mask(y, x) ? std::round(z.values(y, x) * 1000.0) : 0.0;
      if (!(v >= 0.0 && v <= 65535.0)) throw DomainError(path.string() + ": depth outside the 16-bit millimeter range");
      mm(y, x) = static_cast<std::uint16_t>(v);
    }
  write_png16(path, mm);
}

DepthMap read_depth_png(const fs::path& path) {
  const Plane16 mm = read_png16(path);
  return DepthMap::from_positive(mm.cast<double>() / 1000.0);
}

DatasetManifest save_dataset(const fs::path& root, std::span<const SceneData> scenes,
                             const CameraIntrinsics& default_intrinsics) {
  DatasetManifest manifest;
  manifest.default_intrinsics = default_intrinsics;
  fs::create_directories(root);
  for (const SceneData& scene : scenes) {
    if (scene.name.empty() || scene.name.find('/') != std::string::npos)
      throw ParameterError("save_dataset: invalid scene name '" + scene.name + "'");
    SceneEntry se;
    se.name = scene.name;
    for (std::size_t k = 0; k < scene.stacks.size(); ++k) {
      const StackData& sd = scene.stacks[k];
      sd.stack.validate();
      StackEntry e;
      e.name = stack_dir_name(k);
      const fs::path rel = fs::path(scene.name) / e.name;
      fs::create_directories(root / rel);
      for (std::size_t s = 0; s < sd.stack.size(); ++s) {
        const auto file = (rel / slice_file_name(s)).generic_string();
        write_png(root / file, sd.stack.slices[s]);
        e.slices.push_back(file);
      }
      e.focus_disparities = sd.stack.focus_disparities;
      e.intrinsics = sd.stack.intrinsics;
      if (sd.depth) {
        e.groundtruth = (rel / "depth.png").generic_string();
        e.groundtruth_kind = Groundtruth::Depth;
        write_depth_png(root / e.groundtruth, *sd.depth);
      } else {
        e.groundtruth = (rel / "disparity.pfm").generic_string();
        write_disparity(root / e.groundtruth, sd.disparity);
      }
      if (sd.lightfield) {
        const LightField& lf = *sd.lightfield;
        e.lightfield = (rel / "lightfield").generic_string();
        fs::create_directories(root / e.lightfield);
        for (int u = 0; u < lf.grid_u(); ++u)
          for (int v = 0; v < lf.grid_v(); ++v) write_png(root / e.lightfield / view_file_name(u, v), lf.view(u, v));
      }
      write_text(root / rel / "meta.json", stack_json(e).dump(2) + "\n");
      se.stacks.push_back(std::move(e));
    }
    manifest.scenes.push_back(std::move(se));
  }
  json j;
  j["schema_version"] = manifest.schema_version;
  j["default_intrinsics"] = manifest.default_intrinsics;
  j["scenes"] = json::array();
  for (const auto& s : manifest.scenes) {
    json stacks = json::array();
    for (const auto& e : s.stacks) stacks.push_back(stack_json(e));
    j["scenes"].push_back({{"name", s.name}, {"stacks", stacks}});
  }
  write_text(root / "manifest.json", j.dump(2) + "\n");
  return manifest;
}

Dataset Dataset::open(const fs::path& root) {
  Dataset ds;
  ds.root_ = root;
  const fs::path mpath = root / "manifest.json";
  json j;
  try {
    j = json::parse(read_text(mpath));
  } catch (const json::exception& e) {
    throw LoadError(mpath.string() + ": malformed manifest: " + e.what());
  }
  try {
    ds.manifest_.schema_version = j.at("schema_version").get<int>();
    if (ds.manifest_.schema_version != kDatasetSchemaVersion)
      throw LoadError(mpath.string() + ": schema_version " + std::to_string(ds.manifest_.schema_version) +
                      " is not supported (expected " + std::to_string(kDatasetSchemaVersion) + ")");
    if (j.contains("default_intrinsics")) from_json(j.at("default_intrinsics"), ds.manifest_.default_intrinsics);
    for (const json& sj : j.at("scenes")) {
      SceneEntry se;
      se.name = sj.at("name").get<std::string>();
      for (const json& ej : sj.at("stacks")) {
        StackEntry e;
        e.name = ej.at("name").get<std::string>();
        e.slices = ej.at("slices").get<std::vector<std::string>>();
        e.focus_disparities = ej.at("focus_disparities").get<std::vector<double>>();
        e.groundtruth = ej.at("groundtruth").get<std::string>();
        const auto kind = ej.value("groundtruth_kind", std::string("disparity"));
        if (kind != "disparity" && kind != "depth")
          throw LoadError(mpath.string() + ": unknown groundtruth_kind '" + kind + "'");
        e.groundtruth_kind = kind == "depth" ? Groundtruth::Depth : Groundtruth::Disparity;
        e.intrinsics = ds.manifest_.default_intrinsics;
        if (ej.contains("intrinsics")) from_json(ej.at("intrinsics"), e.intrinsics);
        e.lightfield = ej.value("lightfield", std::string());
        if (e.slices.size() != e.focus_disparities.size())
          throw LoadError(mpath.string() + ": " + se.name + "/" + e.name + " has " + std::to_string(e.slices.size()) +
                          " slices but " + std::to_string(e.focus_disparities.size()) + " focus disparities");
        for (std::size_t k = 1; k < e.focus_disparities.size(); ++k)
          if (!(e.focus_disparities[k] < e.focus_disparities[k - 1]))
            throw LoadError(mpath.string() + ": " + se.name + "/" + e.name + " focus disparities are not descending");
        for (const auto& f : e.slices)
          if (!fs::exists(root / f)) throw LoadError((root / f).string() + ": referenced slice is missing");
        if (!fs::exists(root / e.groundtruth))
          throw LoadError((root / e.groundtruth).string() + ": referenced groundtruth is missing");
        se.stacks.push_back(std::move(e));
      }
      ds.manifest_.scenes.push_back(std::move(se));
    }
  } catch (const json::exception& e) {
    throw LoadError(mpath.string() + ": manifest does not match the schema: " + e.what());
  }
  return ds;
}

const StackEntry& Dataset::entry(std::size_t scene, std::size_t stack) const {
  if (scene >= manifest_.scenes.size() || stack >= manifest_.scenes[scene].stacks.size())
    throw IndexError("dataset: no stack " + std::to_string(stack) + " in scene " + std::to_string(scene));
  return manifest_.scenes[scene].stacks[stack];
}

Image Dataset::load_slice(std::size_t scene, std::size_t stack, std::size_t slice) const {
  const StackEntry& e = entry(scene, stack);
  if (slice >= e.slices.size()) throw IndexError("dataset: slice index out of range");
  ++files_read_;
  return read_png(root_ / e.slices[slice]);
}

FocalStack Dataset::load_stack(std::size_t scene, std::size_t stack) const {
  const StackEntry& e = entry(scene, stack);
  FocalStack fsk;
  fsk.focus_disparities = e.focus_disparities;
  fsk.intrinsics = e.intrinsics;
  for (std::size_t s = 0; s < e.slices.size(); ++s) fsk.slices.push_back(load_slice(scene, stack, s));
  try {
    fsk.validate();
  } catch (const std::exception& ex) {
    throw LoadError((root_ / e.name).string() + ": " + ex.what());
  }
  return fsk;
}

DisparityMap Dataset::load_disparity(std::size_t scene, std::size_t stack) const {
  const StackEntry& e = entry(scene, stack);
  if (e.groundtruth_kind == Groundtruth::Depth) return disparity_from_depth(*load_depth(scene, stack), e.intrinsics);
  ++files_read_;
  return read_disparity(root_ / e.groundtruth);
}

std::optional<DepthMap> Dataset::load_depth(std::size_t scene, std::size_t stack) const {
  const StackEntry& e = entry(scene, stack);
  if (e.groundtruth_kind != Groundtruth::Depth) return std::nullopt;
  ++files_read_;
  return read_depth_png(root_ / e.groundtruth);
}

LightField Dataset::load_lightfield(std::size_t scene, std::size_t stack) const {
  const StackEntry& e = entry(scene, stack);
  if (e.lightfield.empty()) throw LoadError((root_ / e.name).string() + ": stack has no light field");
  LightField lf;
  lf.intrinsics = e.intrinsics;
  for (int u = 0; u < e.intrinsics.grid_u; ++u)
    for (int v = 0; v < e.intrinsics.grid_v; ++v) {
      ++files_read_;
      lf.views.push_back(read_png(root_ / e.lightfield / view_file_name(u, v)));
    }
  lf.validate();
  return lf;
}

DepthMap median_fuse(std::span<const DepthMap> frames) {
  if (frames.empty()) throw ParameterError("median_fuse: no frames");
  const Eigen::Index h = frames.front().height(), w = frames.front().width();
  for (const auto& f : frames)
    if (f.height() != h || f.width() != w) throw ShapeError("median_fuse: frame shapes differ");
  DepthMap out(h, w);
  std::vector<double> samples;
  samples.reserve(frames.size());
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      samples.clear();
      for (const auto& f : frames)
        if (f.mask(y, x) && f.values(y, x) > 0.0) samples.push_back(f.values(y, x));
      if (samples.empty()) {
        out.mask(y, x) = false;
        out.values(y, x) = 0.0;
        continue;
      }
      std::sort(samples.begin(), samples.end());
      const std::size_t n = samples.size();
      out.values(y, x) = n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
    }
  return out;
}

}  // namespace ddff::io
