#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <cstring>
#include <fstream>
#include <random>

#include "ddff/data_io.hpp"
#include "ddff/nn/checkpoint.hpp"

using namespace ddff;
using namespace ddff::io;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ddff_test_data_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Image quantized_image(int h, int w, int c, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, 255);
  Image img(h, w, static_cast<std::size_t>(c));
  for (auto& p : img.channels)
    for (Eigen::Index k = 0; k < p.size(); ++k) p.data()[k] = d(rng) / 255.0;
  return img;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST(DataIO, PngRoundTrip) {
  const fs::path dir = scratch("png");
  std::mt19937_64 rng(1);
  for (int c : {1, 3}) {
    const Image img = quantized_image(7, 5, c, rng);
    write_png(dir / "a.png", img);
    const Image back = read_png(dir / "a.png");
    ASSERT_EQ(back.channel_count(), static_cast<std::size_t>(c));
    for (int ch = 0; ch < c; ++ch) EXPECT_TRUE((back[ch] == img[ch]).all());
  }
  Plane16 p(3, 4);
  for (Eigen::Index k = 0; k < p.size(); ++k) p.data()[k] = static_cast<std::uint16_t>(k * 5000 + 7);
  write_png16(dir / "b.png", p);
  EXPECT_TRUE((read_png16(dir / "b.png") == p).all());
  EXPECT_THROW(read_png(dir / "missing.png"), LoadError);
}

TEST(DataIO, PfmRoundTripAndOrientation) {
  const fs::path dir = scratch("pfm");
  Plane<float> p(3, 2);
  p << 0.25f, -1.5f, 3.0f, 1e-7f, 0.0f, 123.456f;
  write_pfm(dir / "a.pfm", p);
  EXPECT_TRUE((read_pfm(dir / "a.pfm") == p).all());
  const std::string raw = slurp(dir / "a.pfm");
  EXPECT_EQ(raw.substr(0, 3), "Pf\n");
  // first stored row is the bottom one
  const std::size_t header = raw.size() - 6 * sizeof(float);
  float first;
  std::memcpy(&first, raw.data() + header, sizeof(float));
  EXPECT_EQ(first, 0.0f);

  DisparityMap d(2, 2);
  d.values << 0.1, 0.2, 0.3, 0.4;
  d.mask(1, 0) = false;
  write_disparity(dir / "d.pfm", d);
  const DisparityMap back = read_disparity(dir / "d.pfm");
  EXPECT_FALSE(back.mask(1, 0));
  EXPECT_EQ(back.values(1, 0), 0.0);
  EXPECT_EQ(back.values(0, 1), static_cast<double>(0.2f));
}

TEST(DataIO, DepthPngMillimeters) {
  const fs::path dir = scratch("depth");
  DepthMap z(1, 3);
  z.values << 1.234, 0.5, 0.0;
  z.mask(0, 2) = false;
  write_depth_png(dir / "z.png", z);
  const Plane16 raw = read_png16(dir / "z.png");
  EXPECT_EQ(raw(0, 0), 1234);
  EXPECT_EQ(raw(0, 1), 500);
  EXPECT_EQ(raw(0, 2), 0);
  const DepthMap back = read_depth_png(dir / "z.png");
  EXPECT_DOUBLE_EQ(back.values(0, 0), 1.234);
  EXPECT_FALSE(back.mask(0, 2));
  z.values(0, 1) = 70.0;
  EXPECT_THROW(write_depth_png(dir / "bad.png", z), DomainError);
}

TEST(DataIO, DatasetRoundTripIsExact) {
  const fs::path root = scratch("dataset");
  std::mt19937_64 rng(2);
  const CameraIntrinsics intr = lytro_illum_intrinsics(9);
  SceneData scene;
  scene.name = "scene_a";
  for (int k = 0; k < 2; ++k) {
    StackData sd;
    sd.stack.intrinsics = intr;
    for (int s = 0; s < 3; ++s) {
      sd.stack.slices.push_back(quantized_image(6, 8, 3, rng));
      sd.stack.focus_disparities.push_back(0.28 - 0.13 * s);
    }
    sd.disparity = DisparityMap(6, 8);
    for (Eigen::Index i = 0; i < sd.disparity.values.size(); ++i)
      sd.disparity.values.data()[i] = static_cast<float>(0.02 + 0.005 * i);
    sd.disparity.mask(0, 0) = false;
    sd.disparity.zero_invalid();
    scene.stacks.push_back(std::move(sd));
  }
  const std::vector<SceneData> scenes = {scene};
  save_dataset(root, scenes, intr);

  const Dataset ds = Dataset::open(root);
  EXPECT_EQ(ds.files_read(), 0u);
  ASSERT_EQ(ds.manifest().scenes.size(), 1u);
  ASSERT_EQ(ds.manifest().scenes[0].stacks.size(), 2u);
  const FocalStack st = ds.load_stack(0, 1);
  EXPECT_EQ(ds.files_read(), 3u);
  ASSERT_EQ(st.size(), 3u);
  for (int s = 0; s < 3; ++s) {
    EXPECT_EQ(st.focus_disparities[s], scene.stacks[1].stack.focus_disparities[s]);
    for (int c = 0; c < 3; ++c) EXPECT_TRUE((st.slices[s][c] == scene.stacks[1].stack.slices[s][c]).all());
  }
  EXPECT_EQ(st.intrinsics.focal_length_px, intr.focal_length_px);
  EXPECT_EQ(st.intrinsics.baseline_m_per_px, intr.baseline_m_per_px);
  const DisparityMap d = ds.load_disparity(0, 1);
  EXPECT_TRUE((d.values == scene.stacks[1].disparity.values).all());
  EXPECT_TRUE((d.mask == scene.stacks[1].disparity.mask).all());
  EXPECT_FALSE(ds.load_depth(0, 1).has_value());

  // writing the same data again yields the same bytes
  const fs::path again = scratch("dataset_again");
  save_dataset(again, scenes, intr);
  EXPECT_EQ(slurp(root / "manifest.json"), slurp(again / "manifest.json"));
  EXPECT_EQ(slurp(root / ds.entry(0, 0).slices[2]), slurp(again / ds.entry(0, 0).slices[2]));
}

TEST(DataIO, DepthGroundtruthConvertsToDisparity) {
  const fs::path root = scratch("depth_dataset");
  std::mt19937_64 rng(3);
  const CameraIntrinsics intr = lytro_illum_intrinsics(9);
  SceneData scene;
  scene.name = "s";
  StackData sd;
  sd.stack.intrinsics = intr;
  sd.stack.slices = {quantized_image(4, 4, 1, rng), quantized_image(4, 4, 1, rng)};
  sd.stack.focus_disparities = {0.28, 0.02};
  DepthMap z(4, 4);
  z.values.setConstant(0.5);
  z.values(2, 2) = 0.0;
  z.mask(2, 2) = false;
  sd.depth = z;
  scene.stacks.push_back(sd);
  save_dataset(root, std::vector<SceneData>{scene}, intr);
  const Dataset ds = Dataset::open(root);
  const DisparityMap d = ds.load_disparity(0, 0);
  EXPECT_NEAR(d.values(0, 0), intr.baseline_m_per_px * intr.focal_length_px / 0.5, 1e-12);
  EXPECT_FALSE(d.mask(2, 2));
  ASSERT_TRUE(ds.load_depth(0, 0).has_value());
}

TEST(DataIO, MissingFileNamesThePath) {
  const fs::path root = scratch("missing");
  std::mt19937_64 rng(4);
  SceneData scene;
  scene.name = "s";
  StackData sd;
  sd.stack.intrinsics = lytro_illum_intrinsics(9);
  sd.stack.slices = {quantized_image(4, 4, 1, rng), quantized_image(4, 4, 1, rng)};
  sd.stack.focus_disparities = {0.28, 0.02};
  sd.disparity = DisparityMap(4, 4);
  sd.disparity.values.setConstant(0.1);
  scene.stacks.push_back(sd);
  save_dataset(root, std::vector<SceneData>{scene}, sd.stack.intrinsics);
  const fs::path victim = root / "s" / stack_dir_name(0) / slice_file_name(1);
  ASSERT_TRUE(fs::exists(victim));
  fs::remove(victim);
  try {
    Dataset::open(root);
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    EXPECT_NE(std::string(e.what()).find(slice_file_name(1)), std::string::npos) << e.what();
  }
  EXPECT_THROW(Dataset::open(root / "nowhere"), LoadError);
}

TEST(DataIO, MedianFuse) {
  auto frame = [](double a, double b, double c) {
    DepthMap z(1, 3);
    z.values << a, b, c;
    z.mask = z.values > 0.0;
    return z;
  };
  std::vector<DepthMap> frames = {frame(1, 0, 3), frame(2, 0, 0), frame(5, 0, 4)};
  const DepthMap m = median_fuse(frames);
  EXPECT_DOUBLE_EQ(m.values(0, 0), 2.0);
  EXPECT_FALSE(m.mask(0, 1));
  EXPECT_EQ(m.values(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(m.values(0, 2), 3.5);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.0, 2.0);
  std::vector<DepthMap> many;
  for (int k = 0; k < 7; ++k) many.push_back(frame(d(rng), d(rng) > 1.0 ? d(rng) : 0.0, d(rng)));
  const DepthMap ref = median_fuse(many);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(many.begin(), many.end(), rng);
    const DepthMap p = median_fuse(many);
    EXPECT_TRUE((p.values == ref.values).all());
  }
  frames.push_back(DepthMap(2, 2));
  EXPECT_THROW(median_fuse(frames), ShapeError);
}

TEST(DataIO, CheckpointRoundTrip) {
  const fs::path dir = scratch("ckpt");
  nn::NetworkSpec spec;
  spec.stack_size = 3;
  spec.width_multiplier = 1.0 / 32;
  spec.variant = nn::Variant::CC2;
  nn::DDFFNet net(spec, 9);
  net.normalization().mean = {0.1f, 0.2f, 0.3f};
  // move the BN running statistics off their defaults
  nn::StackBatch x(1, 3, 32, 32, 3);
  std::mt19937_64 rng(6);
  for (float& v : x.data) v = std::uniform_real_distribution<float>(0, 1)(rng);
  nn::Context ctx;
  ctx.training = true;
  ctx.rng = &net.rng();
  net.forward(x, ctx);
  nn::TrainingMetadata meta;
  meta.epochs = 7;
  meta.final_loss = 0.125;
  meta.seed = 99;
  meta.best_epoch = 5;
  meta.input = "dflf";
  meta.dflf_pattern = {{1, 2}, {3, 4}};
  nn::save_checkpoint(dir / "m.ckpt", net, meta);

  const nn::TrainedModel back = nn::load_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(back.model->spec().variant, nn::Variant::CC2);
  EXPECT_EQ(back.model->spec().stack_size, 3);
  EXPECT_EQ(back.metadata.epochs, 7);
  EXPECT_EQ(back.metadata.seed, 99u);
  EXPECT_EQ(back.metadata.best_epoch, 5);
  EXPECT_EQ(back.metadata.dflf_pattern, meta.dflf_pattern);
  EXPECT_EQ(back.model->normalization().mean, net.normalization().mean);
  const auto pa = net.parameters();
  const auto pb = back.model->parameters();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i]->value, pb[i]->value) << pa[i]->name;
  const auto ba = net.buffers();
  const auto bb = back.model->buffers();
  for (std::size_t i = 0; i < ba.size(); ++i) EXPECT_EQ(ba[i]->value, bb[i]->value) << ba[i]->name;
  EXPECT_EQ(nn::predict(net, x).storage(), nn::predict(*back.model, x).storage());

  std::string raw = slurp(dir / "m.ckpt");
  {
    std::ofstream out(dir / "short.ckpt", std::ios::binary);
    out.write(raw.data(), static_cast<std::streamsize>(raw.size() - 8));
  }
  EXPECT_THROW(nn::load_checkpoint(dir / "short.ckpt"), LoadError);
  raw[0] = 'X';
  {
    std::ofstream out(dir / "magic.ckpt", std::ios::binary);
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  }
  EXPECT_THROW(nn::load_checkpoint(dir / "magic.ckpt"), LoadError);
}
