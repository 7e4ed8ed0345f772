#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "ddff/classic_dff.hpp"
#include "ddff/data_io.hpp"
#include "ddff/metrics.hpp"
#include "ddff/nn/checkpoint.hpp"
#include "ddff/pipeline.hpp"
#include "ddff/serialization.hpp"
#include "ddff/synthgen.hpp"

#ifndef DDFF_VERSION
#define DDFF_VERSION "unknown"
#endif

namespace ddff::pipeline {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string numbered(const char* fmt, std::size_t k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, k);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw LoadError(path.string() + ": cannot open for writing");
  os << text;
}

json report_json(const MetricsReport& r) {
  json j = json::object();
  std::istringstream is(r.to_text());
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string v = line.substr(eq + 1);
    try {
      j[line.substr(0, eq)] = json::parse(v);
    } catch (const json::parse_error&) {
      j[line.substr(0, eq)] = v;
    }
  }
  return j;
}

std::string dataset_hash(const io::Dataset& ds) {
  std::vector<fs::path> files{ds.root() / "manifest.json"};
  for (const auto& s : ds.manifest().scenes)
    for (const auto& e : s.stacks) {
      for (const auto& f : e.slices) files.push_back(ds.root() / f);
      files.push_back(ds.root() / e.groundtruth);
    }
  return hash_files(files);
}

nn::StackBatch network_input(const io::Dataset& ds, std::size_t scene, std::size_t stack,
                             const nn::TrainingMetadata& meta) {
  if (meta.input == "dflf") {
    const LightField lf = ds.load_lightfield(scene, stack);
    const auto views = nn::dflf_input(lf, meta.dflf_pattern);
    return nn::to_batch(std::span<const Image>(views));
  }
  return nn::to_batch(ds.load_stack(scene, stack));
}

void run_synth(const json& cfg, std::uint64_t seed, json& record, std::ostream& log) {
  const json& c = cfg.at("synth");
  const CameraIntrinsics intr = lytro_illum_intrinsics(c["grid"].get<int>());
  const int S = c["stack_size"];
  const double near = c["stack_near"], far = c["stack_far"];
  const auto disparities = linear_disparities(near, far, S);

  RandomSceneOptions opts;
  opts.height = c["height"].get<int>();
  opts.width = c["width"].get<int>();
  opts.channels = c["channels"].get<std::size_t>();
  opts.dropout_fraction = c["dropout_fraction"];
  if (c["snap_to_stack"].get<bool>()) opts.disparity_choices = disparities;
  const bool depth_gt = c["groundtruth"] == "depth";

  const fs::path root = c["output"].get<std::string>();
  std::vector<std::string> scene_names;
  const int n_scenes = c["scenes"], n_stacks = c["stacks_per_scene"];
  for (int i = 0; i < n_scenes; ++i) {
    io::SceneData sd;
    sd.name = numbered("scene_%03zu", static_cast<std::size_t>(i));
    for (int j = 0; j < n_stacks; ++j) {
      const std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(i) * 100003ULL + static_cast<std::uint64_t>(j));
      std::mt19937_64 rng(s);
      const int planes = std::uniform_int_distribution<int>(c["planes_min"].get<int>(), c["planes_max"].get<int>())(rng);
      const SceneSpec spec = make_random_scene(s, planes, {c["depth_near"].get<double>(), c["depth_far"].get<double>()},
                                               intr, opts);
      RenderedScene rs = render_lightfield(spec);
      io::StackData st;
      st.stack = synthesize_stack(rs.lightfield, near, far, S);
      st.disparity = rs.disparity;
      st.disparity.values = st.disparity.values.cast<float>().cast<double>();
      if (depth_gt) st.depth = depth_from_disparity(st.disparity, intr);
      if (c["write_lightfield"].get<bool>()) st.lightfield = std::move(rs.lightfield);
      sd.stacks.push_back(std::move(st));
    }
    log << "synth: " << sd.name << " (" << n_stacks << " stack" << (n_stacks == 1 ? "" : "s") << ")\n";
    // Scenes are written as they are produced so memory stays bounded by one scene.
    io::save_dataset(root, std::span<const io::SceneData>(&sd, 1), intr);
    scene_names.push_back(sd.name);
  }
  // save_dataset wrote a one-scene manifest each time; the final one lists every scene.
  json manifest;
  manifest["schema_version"] = io::kDatasetSchemaVersion;
  manifest["default_intrinsics"] = intr;
  manifest["scenes"] = json::array();
  for (const auto& name : scene_names) {
    json stacks = json::array();
    for (int j = 0; j < n_stacks; ++j) {
      std::ifstream is(root / name / io::stack_dir_name(static_cast<std::size_t>(j)) / "meta.json");
      stacks.push_back(json::parse(is));
    }
    manifest["scenes"].push_back({{"name", name}, {"stacks", stacks}});
  }
  write_text(root / "manifest.json", manifest.dump(2) + "\n");
  record["outputs"] = {root.string()};
  record["input_dataset_hash"] = nullptr;
}

void run_refocus(const json& cfg, json& record, std::ostream& log) {
  const json& c = cfg.at("refocus");
  CameraIntrinsics intr = lytro_illum_intrinsics(c["grid"].get<int>());
  const std::string ifile = c["intrinsics_file"];
  if (!ifile.empty()) {
    std::ifstream is(ifile);
    if (!is) throw LoadError(ifile + ": cannot open intrinsics file");
    json j = json::parse(is);
    from_json(j.contains("intrinsics") ? j.at("intrinsics") : j, intr);
  }
  const fs::path in = c["input"].get<std::string>(), out = c["output"].get<std::string>();
  LightField lf;
  lf.intrinsics = intr;
  std::vector<fs::path> inputs;
  for (int u = 0; u < intr.grid_u; ++u)
    for (int v = 0; v < intr.grid_v; ++v) {
      char name[32];
      std::snprintf(name, sizeof name, "view_%02d_%02d.png", u, v);
      inputs.push_back(in / name);
      lf.views.push_back(io::read_png(inputs.back()));
    }
  lf.validate();
  const FocalStack st = synthesize_stack(lf, c["stack_near"].get<double>(), c["stack_far"].get<double>(),
                                         c["stack_size"].get<int>());
  fs::create_directories(out);
  json outputs = json::array();
  for (std::size_t s = 0; s < st.size(); ++s) {
    const fs::path p = out / io::slice_file_name(s);
    io::write_png(p, st.slices[s]);
    outputs.push_back(p.string());
  }
  write_text(out / "stack.json",
             json{{"focus_disparities", st.focus_disparities}, {"intrinsics", intr}}.dump(2) + "\n");
  log << "refocus: wrote " << st.size() << " slices to " << out.string() << "\n";
  record["outputs"] = outputs;
  record["input_dataset_hash"] = hash_files(inputs);
}

void run_train(const json& cfg, std::uint64_t seed, json& record, std::ostream& log) {
  const json& c = cfg.at("train");
  const io::Dataset ds = io::Dataset::open(c["dataset"].get<std::string>());
  record["input_dataset_hash"] = dataset_hash(ds);

  nn::TrainingMetadata meta;
  meta.input = c["input"];
  if (meta.input == "dflf") {
    for (const auto& e : c["dflf_pattern"]) meta.dflf_pattern.emplace_back(e[0].get<int>(), e[1].get<int>());
    if (meta.dflf_pattern.empty()) {
      const int grid = ds.entry(0, 0).intrinsics.grid_u;
      meta.dflf_pattern = nn::default_dflf_pattern(grid);
    }
  }

  std::vector<nn::PatchSet> sets;
  std::size_t source = 0;
  for (std::size_t i = 0; i < ds.manifest().scenes.size(); ++i)
    for (std::size_t j = 0; j < ds.manifest().scenes[i].stacks.size(); ++j, ++source) {
      const DisparityMap gt = ds.load_disparity(i, j);
      nn::PatchSet set;
      if (meta.input == "dflf") {
        const auto views = nn::dflf_input(ds.load_lightfield(i, j), meta.dflf_pattern);
        set = nn::crop_patches(std::span<const Image>(views), gt, c["patch_size"], c["patch_stride"], c["max_missing"],
                               source);
      } else {
        set = nn::crop_patches(ds.load_stack(i, j), gt, c["patch_size"], c["patch_stride"], c["max_missing"], source);
      }
      sets.push_back(std::move(set));
    }
  if (sets.empty()) throw ParameterError("train: dataset has no stacks");

  nn::NetworkSpec spec;
  spec.variant = nn::parse_variant(c["variant"]);
  spec.stack_size = sets.front().slices;
  spec.input_channels = sets.front().channels;
  spec.width_multiplier = c["width_multiplier"];
  spec.dropout_p = c["dropout_p"];
  nn::DDFFNet model(spec, seed);

  nn::TrainConfig tc;
  tc.learning_rate = c["learning_rate"];
  tc.momentum = c["momentum"];
  tc.batch_size = c["batch_size"];
  tc.lr_decay = c["lr_decay"];
  tc.decay_epochs = c["decay_epochs"];
  tc.weight_decay = c["weight_decay"];
  tc.epochs = c["epochs"];
  tc.seed = seed;
  tc.validation_fraction = c["validation_fraction"];

  json epochs = json::array();
  const auto curve = nn::train(model, sets, tc, &meta, [&](const nn::EpochLog& e) {
    log << "epoch " << e.epoch << " lr " << e.learning_rate << " train " << e.train_loss << " (data "
        << e.train_data_loss << ") val "
        << e.validation_loss << (e.batches_without_valid_pixels ? " (batches without valid pixels)" : "") << "\n";
    epochs.push_back({{"epoch", e.epoch},
                      {"learning_rate", e.learning_rate},
                      {"train_loss", e.train_loss},
                      {"train_data_loss", e.train_data_loss},
                      {"validation_loss", std::isfinite(e.validation_loss) ? json(e.validation_loss) : json(nullptr)},
                      {"batches_without_valid_pixels", e.batches_without_valid_pixels},
                      {"seconds", e.seconds}});
  });
  const fs::path ckpt = c["checkpoint"].get<std::string>();
  if (ckpt.has_parent_path()) fs::create_directories(ckpt.parent_path());
  nn::save_checkpoint(ckpt, model, meta);
  std::ostringstream csv;
  csv << "epoch,learning_rate,train_loss,train_data_loss,validation_loss\n";
  for (const auto& e : curve) {
    char line[160];
    std::snprintf(line, sizeof line, "%d,%.9g,%.9g,%.9g,%.9g\n", e.epoch, e.learning_rate, e.train_loss,
                  e.train_data_loss, e.validation_loss);
    csv << line;
  }
  const fs::path curve_path = ckpt.string() + ".loss.csv";
  write_text(curve_path, csv.str());
  record["epochs"] = epochs;
  record["best_epoch"] = meta.best_epoch;
  record["outputs"] = {ckpt.string(), curve_path.string()};
}

void run_eval(const json& cfg, json& record, std::ostream& log) {
  const json& c = cfg.at("eval");
  const io::Dataset ds = io::Dataset::open(c["dataset"].get<std::string>());
  record["input_dataset_hash"] = dataset_hash(ds);
  const std::string baseline = c["baseline"];
  std::optional<nn::TrainedModel> tm;
  if (baseline == "checkpoint") tm = nn::load_checkpoint(c["checkpoint"].get<std::string>());
  const auto taus = c["taus"].get<std::vector<double>>();
  const auto bp_taus = c["badpix_taus"].get<std::vector<double>>();
  const FocusMeasure measure = parse_focus_measure(c["measure"]);
  const bool ext_depth = c["prediction_kind"] == "depth";

  std::vector<MetricsReport> disp_reports, depth_reports;
  std::vector<double> curve_sum(bp_taus.size(), 0.0);
  json stacks = json::array(), whiskers = json::array();
  std::ostringstream reports_txt;
  std::ostringstream whisker_csv;
  whisker_csv << "scene,series,min,q1,median,q3,max\n";
  for (std::size_t i = 0; i < ds.manifest().scenes.size(); ++i) {
    const auto& scene = ds.manifest().scenes[i];
    std::vector<double> pred_vals, gt_vals;
    for (std::size_t j = 0; j < scene.stacks.size(); ++j) {
      const auto& e = scene.stacks[j];
      const DisparityMap gt = ds.load_disparity(i, j);
      const auto gt_depth = ds.load_depth(i, j);
      DisparityMap pred;
      std::optional<DepthMap> pred_depth;
      if (baseline == "checkpoint") {
        pred = nn::to_disparity(nn::predict(*tm->model, network_input(ds, i, j, tm->metadata)));
      } else if (baseline == "classic") {
        pred = argmax_disparity(ds.load_stack(i, j), measure, c["window"].get<int>());
      } else {
        const fs::path p = fs::path(c["predictions"].get<std::string>()) / scene.name / (e.name + ".pfm");
        const Plane<double> v = io::read_pfm(p).cast<double>();
        if (ext_depth) {
          pred_depth = DepthMap::from_positive(v);
          pred = disparity_from_depth(*pred_depth, e.intrinsics);
        } else {
          pred = DisparityMap(v, Mask::Constant(v.rows(), v.cols(), true));
        }
      }
      if (pred.height() != gt.height() || pred.width() != gt.width())
        throw ShapeError(scene.name + "/" + e.name + ": prediction shape differs from groundtruth");

      const MetricsReport rd = compute_metrics(pred, gt, taus);
      disp_reports.push_back(rd);
      const auto curve = badpix_curve(pred, gt, bp_taus);
      for (std::size_t k = 0; k < curve.size(); ++k) curve_sum[k] += curve[k].second;
      json sj{{"scene", scene.name}, {"stack", e.name}, {"disparity", report_json(rd)}};
      reports_txt << "[" << scene.name << "/" << e.name << " disparity]\n" << rd.to_text();

      if (c["depth_metrics"].get<bool>() && gt_depth) {
        DepthMap pz = pred_depth ? *pred_depth : depth_from_disparity(pred, e.intrinsics);
        if (c["lytro_rescale"].get<bool>()) {
          auto [k, scaled] = lytro_rescale(pz, *gt_depth);
          sj["lytro_k"] = k;
          pz = std::move(scaled);
        }
        const MetricsReport rz = compute_metrics(pz, *gt_depth, taus);
        depth_reports.push_back(rz);
        sj["depth"] = report_json(rz);
        reports_txt << "[" << scene.name << "/" << e.name << " depth]\n" << rz.to_text();
      }
      for (Eigen::Index y = 0; y < gt.height(); ++y)
        for (Eigen::Index x = 0; x < gt.width(); ++x)
          if (gt.mask(y, x) && std::isfinite(pred.values(y, x))) {
            pred_vals.push_back(pred.values(y, x));
            gt_vals.push_back(gt.values(y, x));
          }
      stacks.push_back(sj);
      log << "eval: " << scene.name << "/" << e.name << " mse " << rd.mse << " badpix " << rd.badpix.begin()->second
          << "\n";
    }
    for (const auto& [series, vals] : {std::pair{"prediction", &pred_vals}, std::pair{"groundtruth", &gt_vals}}) {
      const Whisker w = whisker_stats(*vals, scene.name + " " + series);
      whiskers.push_back({{"scene", scene.name}, {"series", series}, {"min", w.min}, {"q1", w.q1},
                          {"median", w.median}, {"q3", w.q3}, {"max", w.max}});
      char line[256];
      std::snprintf(line, sizeof line, "%s,%s,%.9g,%.9g,%.9g,%.9g,%.9g\n", scene.name.c_str(), series, w.min, w.q1,
                    w.median, w.q3, w.max);
      whisker_csv << line;
    }
  }
  if (disp_reports.empty()) throw ParameterError("eval: dataset has no stacks");

  const MetricsReport agg = aggregate(disp_reports);
  json curve = json::array();
  std::ostringstream csv;
  csv << "tau,badpix\n";
  for (std::size_t k = 0; k < bp_taus.size(); ++k) {
    const double v = curve_sum[k] / static_cast<double>(disp_reports.size());
    curve.push_back({bp_taus[k], v});
    char line[64];
    std::snprintf(line, sizeof line, "%.9g,%.9g\n", bp_taus[k], v);
    csv << line;
  }
  const fs::path out = c["output"].get<std::string>();
  fs::create_directories(out);
  std::string agg_txt = "[disparity]\n" + agg.to_text();
  record["aggregate"] = {{"disparity", report_json(agg)}};
  if (!depth_reports.empty()) {
    const MetricsReport aggz = aggregate(depth_reports);
    agg_txt += "[depth]\n" + aggz.to_text();
    record["aggregate"]["depth"] = report_json(aggz);
  }
  write_text(out / "reports.txt", reports_txt.str());
  write_text(out / "aggregate.txt", agg_txt);
  write_text(out / "badpix.csv", csv.str());
  write_text(out / "whiskers.csv", whisker_csv.str());
  record["label"] = baseline == "checkpoint" ? c["checkpoint"].get<std::string>() : baseline;
  record["stacks"] = stacks;
  record["badpix_curve"] = curve;
  record["whiskers"] = whiskers;
  record["outputs"] = {(out / "reports.txt").string(), (out / "aggregate.txt").string(), (out / "badpix.csv").string(),
                       (out / "whiskers.csv").string()};
  log << "eval: aggregate mse " << agg.mse << " over " << disp_reports.size() << " stacks\n";
}

void run_predict(const json& cfg, json& record, std::ostream& log) {
  const json& c = cfg.at("predict");
  const io::Dataset ds = io::Dataset::open(c["dataset"].get<std::string>());
  record["input_dataset_hash"] = dataset_hash(ds);
  nn::TrainedModel tm = nn::load_checkpoint(c["checkpoint"].get<std::string>());
  std::size_t scene = 0;
  const std::string name = c["scene"];
  if (!name.empty()) {
    scene = ds.manifest().scenes.size();
    for (std::size_t i = 0; i < ds.manifest().scenes.size(); ++i)
      if (ds.manifest().scenes[i].name == name) scene = i;
    if (scene == ds.manifest().scenes.size()) throw ParameterError("predict: no scene named '" + name + "'");
  }
  const std::size_t stack = c["stack"];
  const io::StackEntry& e = ds.entry(scene, stack);

  const nn::StackBatch input = network_input(ds, scene, stack, tm.metadata);
  const nn::Tensor out = nn::predict(*tm.model, input);
  const DisparityMap pred = nn::to_disparity(out);
  const std::string prefix = c["output"];
  if (fs::path(prefix).has_parent_path()) fs::create_directories(fs::path(prefix).parent_path());
  io::write_disparity(prefix + ".pfm", pred);
  const double vmax = *std::max_element(e.focus_disparities.begin(), e.focus_disparities.end());
  io::write_png(prefix + ".png", colorize(pred.values, vmax));
  json outputs = {prefix + ".pfm", prefix + ".png"};
  json maps = json::array();
  if (c["dump_score_maps"].get<bool>()) {
    const nn::Tensor& sm = tm.model->slice_maps();
    for (int s = 0; s < sm.n(); ++s) {
      Plane<float> p(input.height, input.width);
      for (int y = 0; y < input.height; ++y)
        for (int x = 0; x < input.width; ++x) p(y, x) = sm.at(s, 0, y, x);
      const std::string path = prefix + numbered("_slice_%02zu.pfm", static_cast<std::size_t>(s));
      io::write_pfm(path, p);
      maps.push_back(path);
      outputs.push_back(path);
    }
  }
  record["score_maps"] = maps;
  record["outputs"] = outputs;
  log << "predict: wrote " << prefix << ".pfm\n";
}

void run_plot(const json& cfg, json& record, std::ostream& log) {
  const json& c = cfg.at("plot");
  const fs::path out = c["output"].get<std::string>();
  fs::create_directories(out);
  std::vector<Series> badpix, losses;
  std::vector<Whisker> whiskers;
  std::ostringstream bp_csv, w_csv, loss_csv;
  bp_csv << "label,tau,badpix\n";
  w_csv << "label,min,q1,median,q3,max\n";
  loss_csv << "label,epoch,train_loss\n";
  json outputs = json::array();
  std::vector<fs::path> inputs;
  for (const auto& mp : c["manifests"]) {
    const fs::path path = mp.get<std::string>();
    inputs.push_back(path);
    std::ifstream is(path);
    if (!is) throw LoadError(path.string() + ": cannot open manifest");
    json m;
    try {
      m = json::parse(is);
    } catch (const json::parse_error& e) {
      throw LoadError(path.string() + ": malformed manifest: " + e.what());
    }
    const std::string cmd = m.value("command", std::string());
    const std::string label = m.value("label", path.stem().string());
    if (cmd == "eval" && m.contains("badpix_curve")) {
      Series s{label, {}};
      for (const auto& p : m["badpix_curve"]) {
        s.points.emplace_back(p[0].get<double>(), p[1].get<double>());
        char line[512];
        std::snprintf(line, sizeof line, "%s,%.9g,%.9g\n", label.c_str(), p[0].get<double>(), p[1].get<double>());
        bp_csv << line;
      }
      badpix.push_back(std::move(s));
      for (const auto& w : m["whiskers"]) {
        Whisker wk{w["scene"].get<std::string>() + " " + w["series"].get<std::string>(), w["min"], w["q1"],
                   w["median"], w["q3"], w["max"]};
        char line[512];
        std::snprintf(line, sizeof line, "%s,%.9g,%.9g,%.9g,%.9g,%.9g\n", wk.label.c_str(), wk.min, wk.q1, wk.median,
                      wk.q3, wk.max);
        w_csv << line;
        whiskers.push_back(std::move(wk));
      }
    } else if (cmd == "train" && m.contains("epochs")) {
      Series s{label, {}};
      for (const auto& e : m["epochs"]) {
        s.points.emplace_back(e["epoch"].get<double>(), e["train_loss"].get<double>());
        char line[512];
        std::snprintf(line, sizeof line, "%s,%d,%.9g\n", label.c_str(), e["epoch"].get<int>(),
                      e["train_loss"].get<double>());
        loss_csv << line;
      }
      losses.push_back(std::move(s));
    } else if (cmd == "predict" && m.contains("score_maps")) {
      std::vector<Plane<float>> maps;
      float lo = std::numeric_limits<float>::infinity(), hi = -lo;
      for (const auto& p : m["score_maps"]) {
        maps.push_back(io::read_pfm(p.get<std::string>()));
        lo = std::min(lo, maps.back().minCoeff());
        hi = std::max(hi, maps.back().maxCoeff());
      }
      for (std::size_t s = 0; s < maps.size(); ++s) {
        const fs::path png = out / (path.stem().string() + numbered("_score_%02zu.png", s));
        const double range = hi > lo ? hi - lo : 1.0;
        io::write_png(png, colorize(maps[s].cast<double>() - lo, range));
        outputs.push_back(png.string());
      }
    } else {
      log << "plot: " << path.string() << " has nothing to plot\n";
    }
  }
  auto emit = [&](const std::string& stem, const std::string& csv, const Image& img) {
    write_text(out / (stem + ".csv"), csv);
    io::write_png(out / (stem + ".png"), img);
    outputs.push_back((out / (stem + ".csv")).string());
    outputs.push_back((out / (stem + ".png")).string());
  };
  if (!badpix.empty()) emit("badpix", bp_csv.str(), render_line_plot(badpix));
  if (!whiskers.empty()) emit("whiskers", w_csv.str(), render_whiskers(whiskers));
  if (!losses.empty()) emit("loss", loss_csv.str(), render_line_plot(losses));
  record["outputs"] = outputs;
  record["input_dataset_hash"] = hash_files(inputs);
  log << "plot: wrote " << outputs.size() << " files to " << out.string() << "\n";
}

fs::path claim_manifest_path(const fs::path& dir, const std::string& command) {
  fs::create_directories(dir);
  for (std::size_t k = 0;; ++k) {
    const fs::path p = dir / (command + numbered("-%04zu.json", k));
    if (std::FILE* f = std::fopen(p.c_str(), "wx")) {
      std::fclose(f);
      return p;
    }
    if (!fs::exists(p)) throw LoadError(p.string() + ": cannot create run manifest");
  }
}

}  // namespace

int run_command(const std::string& command, const json& resolved, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  json record;
  record["command"] = command;
  record["config"] = resolved;
  record["seed"] = resolved.at("seed");
  record["code_version"] = DDFF_VERSION;
  int status = kExitOk;
  try {
    const auto seed = resolved.at("seed").get<std::uint64_t>();
    if (command == "synth")
      run_synth(resolved, seed, record, log);
    else if (command == "refocus")
      run_refocus(resolved, record, log);
    else if (command == "train")
      run_train(resolved, seed, record, log);
    else if (command == "eval")
      run_eval(resolved, record, log);
    else if (command == "predict")
      run_predict(resolved, record, log);
    else if (command == "plot")
      run_plot(resolved, record, log);
    else
      throw ConfigError("unknown command '" + command + "'");
    record["status"] = "ok";
  } catch (const std::exception& e) {
    record["status"] = "failed";
    record["error"] = e.what();
    log << "error: " << e.what() << "\n";
    status = kExitFailure;
  }
  record["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    const fs::path mp = claim_manifest_path(resolved.at("manifest_dir").get<std::string>(), command);
    write_text(mp, record.dump(2) + "\n");
    log << "manifest: " << mp.string() << "\n";
  } catch (const std::exception& e) {
    log << "error: could not write run manifest: " << e.what() << "\n";
    status = kExitFailure;
  }
  return status;
}

int main_entry(int argc, const char* const* argv, std::ostream& log, std::ostream& err) {
  CLI::App app{"Depth from focus: synthetic data, refocusing, training and evaluation", "ddff"};
  app.allow_extras();
  std::string command, config_path;
  app.add_option("command", command, "synth | refocus | train | eval | predict | plot")->required();
  app.add_option("--config", config_path, "JSON config file");
  app.footer("Any other --key value pair overrides a config field (dot paths, e.g. --train.epochs 5).");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    log << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ddff: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    if (std::find(commands().begin(), commands().end(), command) == commands().end())
      throw ConfigError("unknown command '" + command + "'");
    json config = load_config(config_path);
    const auto extras = app.remaining();
    for (std::size_t i = 0; i < extras.size(); ++i) {
      const std::string& a = extras[i];
      if (a.rfind("--", 0) != 0 || a.size() == 2) throw ConfigError("unexpected argument '" + a + "'");
      const auto eq = a.find('=');
      if (eq != std::string::npos) {
        apply_override(config, command, a.substr(2, eq - 2), a.substr(eq + 1));
      } else {
        if (i + 1 >= extras.size()) throw ConfigError("override '" + a + "' needs a value");
        apply_override(config, command, a.substr(2), extras[++i]);
      }
    }
    const json resolved = resolve_config(command, config);
    return run_command(command, resolved, log);
  } catch (const ConfigError& e) {
    err << "ddff: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace ddff::pipeline
