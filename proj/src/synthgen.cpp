#include "ddff/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ddff/fft.hpp"
#include "ddff/refocus.hpp"

namespace ddff {
namespace {

using IndexPlane = Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Plane<double> band_limited_noise(std::mt19937_64& rng, Eigen::Index h, Eigen::Index w,
                                 const ProceduralTexture& tex) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::ArrayXd fy = fft_frequencies(h), fx = fft_frequencies(w);
  const double f_lo = 1.0 / tex.max_wavelength_px, f_hi = 1.0 / tex.min_wavelength_px;
  ComplexPlane spectrum(h, w);
  for (Eigen::Index k = 0; k < h; ++k)
    for (Eigen::Index l = 0; l < w; ++l) {
      const double re = normal(rng), im = normal(rng);
      const double r = std::hypot(fy(k), fx(l));
      // Nyquist rows/columns stay empty: their real-valued shift is not invertible.
      const bool in_band = r >= f_lo && r <= f_hi && std::abs(fy(k)) < 0.5 && std::abs(fx(l)) < 0.5;
      spectrum(k, l) = in_band ? std::complex<double>(re, im) / std::sqrt(r) : 0.0;
    }
  Plane<double> p = ifft2(spectrum).real();
  const double mn = p.minCoeff(), mx = p.maxCoeff();
  if (mx - mn <= 0.0) return Plane<double>::Constant(h, w, 0.5 * (tex.low + tex.high));
  return tex.low + (p - mn) / (mx - mn) * (tex.high - tex.low);
}

Mask shifted_region(const Region& region, const Mask& base, double sx, double sy) {
  if (std::holds_alternative<FullFrame>(region)) return base;
  const Eigen::Index h = base.rows(), w = base.cols();
  const auto ox = static_cast<Eigen::Index>(std::lround(sx));
  const auto oy = static_cast<Eigen::Index>(std::lround(sy));
  Mask out = Mask::Constant(h, w, false);
  for (Eigen::Index y = 0; y < h; ++y) {
    const Eigen::Index yy = y + oy;
    if (yy < 0 || yy >= h) continue;
    for (Eigen::Index x = 0; x < w; ++x) {
      const Eigen::Index xx = x + ox;
      if (xx >= 0 && xx < w) out(y, x) = base(yy, xx);
    }
  }
  return out;
}

IndexPlane visible_index(const std::vector<Mask>& masks, Eigen::Index h, Eigen::Index w) {
  IndexPlane idx = IndexPlane::Constant(h, w, -1);
  for (int k = static_cast<int>(masks.size()) - 1; k >= 0; --k) idx = masks[static_cast<std::size_t>(k)].select(k, idx);
  return idx;
}

}  // namespace

void SceneSpec::validate() const {
  intrinsics.validate();
  if (planes.empty()) throw DomainError("scene: at least one plane required");
  if (height < 1 || width < 1 || channels < 1) throw DomainError("scene: frame must be non-empty");
  for (std::size_t k = 0; k < planes.size(); ++k) {
    if (!(planes[k].depth_m > 0.0)) throw DomainError("scene: plane depths must be positive");
    if (k > 0 && !(planes[k].depth_m > planes[k - 1].depth_m))
      throw DomainError("scene: plane depths must be strictly increasing (near to far)");
    if (const auto* img = std::get_if<Image>(&planes[k].texture)) {
      if (img->height() < height || img->width() < width)
        throw DomainError("scene: texture smaller than the frame");
      if (img->channel_count() != channels && img->channel_count() != 1)
        throw DomainError("scene: texture channel count does not match the frame");
    }
    if (const auto* m = std::get_if<Mask>(&planes[k].region))
      if (m->rows() != height || m->cols() != width) throw DomainError("scene: region mask must match the frame");
  }
  if (dropout_fraction < 0.0 || dropout_fraction >= 1.0) throw DomainError("scene: dropout_fraction must be in [0,1)");
}

Mask region_mask(const Region& region, Eigen::Index height, Eigen::Index width) {
  if (std::holds_alternative<FullFrame>(region)) return Mask::Constant(height, width, true);
  if (const auto* m = std::get_if<Mask>(&region)) return *m;
  const auto& r = std::get<RectRegion>(region);
  Mask m = Mask::Constant(height, width, false);
  const Eigen::Index top = std::clamp<Eigen::Index>(r.top, 0, height), left = std::clamp<Eigen::Index>(r.left, 0, width);
  const Eigen::Index bottom = std::clamp<Eigen::Index>(r.top + r.height, 0, height);
  const Eigen::Index right = std::clamp<Eigen::Index>(r.left + r.width, 0, width);
  if (bottom > top && right > left) m.block(top, left, bottom - top, right - left) = true;
  return m;
}

Image plane_texture(const ScenePlane& plane, Eigen::Index height, Eigen::Index width, std::size_t channels) {
  if (const auto* img = std::get_if<Image>(&plane.texture)) {
    Image out = crop(*img, 0, 0, height, width);
    while (out.channel_count() < channels) out.channels.push_back(out.channels.front());
    return out;
  }
  const auto& tex = std::get<ProceduralTexture>(plane.texture);
  std::mt19937_64 rng(tex.seed);
  Image out;
  // A shared luminance pattern with weaker per-channel variation keeps the views colored but correlated.
  const Plane<double> base = band_limited_noise(rng, height, width, tex);
  for (std::size_t c = 0; c < channels; ++c) {
    const Plane<double> tint = band_limited_noise(rng, height, width, tex);
    out.channels.push_back(channels == 1 ? base : Plane<double>(0.75 * base + 0.25 * tint));
  }
  return out;
}

IndexPlane visible_plane_index(const SceneSpec& spec) {
  std::vector<Mask> masks;
  for (const auto& p : spec.planes) masks.push_back(region_mask(p.region, spec.height, spec.width));
  return visible_index(masks, spec.height, spec.width);
}

RenderedScene render_lightfield(const SceneSpec& spec) {
  spec.validate();
  const Eigen::Index h = spec.height, w = spec.width;
  const auto& intr = spec.intrinsics;

  std::vector<std::vector<ComplexPlane>> spectra;
  std::vector<Mask> masks;
  std::vector<double> disparities;
  for (const auto& plane : spec.planes) {
    const Image tex = plane_texture(plane, h, w, spec.channels);
    std::vector<ComplexPlane> s;
    for (const auto& ch : tex.channels) s.push_back(fft2(ch));
    spectra.push_back(std::move(s));
    masks.push_back(region_mask(plane.region, h, w));
    disparities.push_back(disparity_from_depth(plane.depth_m, intr));
  }

  RenderedScene out;
  out.lightfield.intrinsics = intr;
  out.lightfield.views.reserve(static_cast<std::size_t>(intr.grid_u * intr.grid_v));
  for (int u = 0; u < intr.grid_u; ++u)
    for (int v = 0; v < intr.grid_v; ++v) {
      Image view(h, w, spec.channels, 0.0);
      Mask filled = Mask::Constant(h, w, false);
      for (std::size_t k = 0; k < spec.planes.size(); ++k) {
        const double sx = -disparities[k] * (intr.center_u - u);
        const double sy = -disparities[k] * (intr.center_v - v);
        const Mask need = shifted_region(spec.planes[k].region, masks[k], sx, sy) && !filled;
        if (!need.any()) continue;
        for (std::size_t c = 0; c < spec.channels; ++c) {
          ComplexPlane s = spectra[k][c];
          detail::apply_shift(s, sx, sy);
          view[c] = need.select(ifft2(s).real(), view[c]);
        }
        filled = filled || need;
      }
      out.lightfield.views.push_back(std::move(view));
    }

  // Band-limited shifts can overshoot the texture range; a global affine map restores [0,1]
  // without disturbing the refocus relation (refocusing is linear and preserves constants).
  double mn = 0.0, mx = 1.0;
  for (const auto& v : out.lightfield.views)
    for (const auto& p : v.channels) {
      mn = std::min(mn, p.minCoeff());
      mx = std::max(mx, p.maxCoeff());
    }
  if (mn < 0.0 || mx > 1.0)
    for (auto& v : out.lightfield.views)
      for (auto& p : v.channels) p = (p - mn) / (mx - mn);

  const IndexPlane idx = visible_index(masks, h, w);
  out.disparity = DisparityMap(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      const int k = idx(y, x);
      out.disparity.mask(y, x) = k >= 0;
      out.disparity.values(y, x) = k >= 0 ? disparities[static_cast<std::size_t>(k)] : 0.0;
    }
  if (spec.dropout_fraction > 0.0) {
    std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    std::bernoulli_distribution drop(spec.dropout_fraction);
    constexpr Eigen::Index block = 8;
    for (Eigen::Index by = 0; by < h; by += block)
      for (Eigen::Index bx = 0; bx < w; bx += block)
        if (drop(rng)) out.disparity.mask.block(by, bx, std::min(block, h - by), std::min(block, w - bx)) = false;
  }
  out.disparity.zero_invalid();
  return out;
}

SceneSpec make_random_scene(std::uint64_t seed, int n_planes, std::pair<double, double> depth_range_m,
                            const CameraIntrinsics& intrinsics, const RandomSceneOptions& options) {
  const auto [z_min, z_max] = depth_range_m;
  if (n_planes < 1) throw DomainError("make_random_scene: n_planes must be >= 1");
  if (!(z_min > 0.0) || !(z_max > z_min) || !std::isfinite(z_max))
    throw DomainError("make_random_scene: depth range must satisfy 0 < min < max < inf");
  intrinsics.validate();

  std::mt19937_64 rng(seed);
  const double d_far = disparity_from_depth(z_max, intrinsics), d_near = disparity_from_depth(z_min, intrinsics);

  std::vector<double> disparities;
  if (!options.disparity_choices.empty()) {
    std::vector<double> pool;
    for (double d : options.disparity_choices)
      if (d >= d_far - 1e-12 && d <= d_near + 1e-12 && d > 0.0) pool.push_back(d);
    if (pool.size() < static_cast<std::size_t>(n_planes))
      throw GenerationError("make_random_scene: not enough disparity choices inside the depth range");
    std::shuffle(pool.begin(), pool.end(), rng);
    disparities.assign(pool.begin(), pool.begin() + n_planes);
  } else {
    std::uniform_real_distribution<double> pick(d_far, d_near);
    const double min_gap = (d_near - d_far) / (4.0 * n_planes);
    for (int attempt = 0;; ++attempt) {
      if (attempt >= options.max_retries) throw GenerationError("make_random_scene: could not separate plane depths");
      disparities.clear();
      for (int k = 0; k < n_planes; ++k) disparities.push_back(pick(rng));
      std::sort(disparities.begin(), disparities.end());
      bool ok = true;
      for (std::size_t k = 1; k < disparities.size(); ++k) ok = ok && disparities[k] - disparities[k - 1] >= min_gap;
      if (ok) break;
    }
  }
  std::sort(disparities.begin(), disparities.end(), std::greater<>());

  SceneSpec spec;
  spec.intrinsics = intrinsics;
  spec.seed = seed;
  spec.height = options.height;
  spec.width = options.width;
  spec.channels = options.channels;
  spec.dropout_fraction = options.dropout_fraction;
  for (double d : disparities) {
    ScenePlane plane;
    plane.depth_m = std::clamp(depth_from_disparity(d, intrinsics), z_min, z_max);
    ProceduralTexture tex;
    tex.seed = rng();
    plane.texture = tex;
    spec.planes.push_back(std::move(plane));
  }
  if (n_planes == 1) return spec;

  const Eigen::Index h = options.height, w = options.width;
  const double min_visible = 0.05 * static_cast<double>(h * w);
  std::uniform_real_distribution<double> frac(0.25, 0.6), pos(0.0, 1.0);
  for (int attempt = 0;; ++attempt) {
    if (attempt >= options.max_retries)
      throw GenerationError("make_random_scene: could not pack visible regions after " +
                            std::to_string(options.max_retries) + " attempts");
    for (int k = 0; k + 1 < n_planes; ++k) {
      RectRegion r;
      r.height = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(frac(rng) * h));
      r.width = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(frac(rng) * w));
      r.top = static_cast<Eigen::Index>(pos(rng) * static_cast<double>(h - r.height));
      r.left = static_cast<Eigen::Index>(pos(rng) * static_cast<double>(w - r.width));
      spec.planes[static_cast<std::size_t>(k)].region = r;
    }
    spec.planes.back().region = FullFrame{};
    const IndexPlane idx = visible_plane_index(spec);
    bool ok = true;
    for (int k = 0; k < n_planes; ++k) ok = ok && static_cast<double>((idx == k).count()) >= min_visible;
    if (ok) return spec;
  }
}

}  // namespace ddff
