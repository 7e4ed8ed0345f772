#include "ddff/nn/patches.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace ddff::nn {

std::vector<int> patch_offsets(int extent, int size, int stride) {
  if (size <= 0 || stride <= 0) throw ParameterError("patch size and stride must be positive");
  if (extent < size) throw ParameterError("frame extent " + std::to_string(extent) + " smaller than patch " +
                                          std::to_string(size));
  std::vector<int> out;
  for (int o = 0; o + size < extent; o += stride) out.push_back(o);
  if (out.empty() || out.back() != extent - size) out.push_back(extent - size);
  return out;
}

PatchSet crop_patches(std::span<const Image> slices, const DisparityMap& disparity, int size, int stride,
                      double max_missing, std::size_t source) {
  if (slices.empty()) throw ParameterError("crop_patches: empty stack");
  const int h = static_cast<int>(slices.front().height()), w = static_cast<int>(slices.front().width());
  const int c = static_cast<int>(slices.front().channel_count());
  if (disparity.height() != h || disparity.width() != w) throw ShapeError("crop_patches: disparity/stack shape mismatch");
  const auto rows = patch_offsets(h, size, stride);
  const auto cols = patch_offsets(w, size, stride);

  PatchSet set;
  set.size = size;
  set.slices = static_cast<int>(slices.size());
  set.channels = c;
  set.candidates = rows.size() * cols.size();
  const std::size_t area = static_cast<std::size_t>(size) * size;
  for (int top : rows)
    for (int left : cols) {
      const auto m = disparity.mask.block(top, left, size, size);
      const double missing = 1.0 - static_cast<double>(m.count()) / static_cast<double>(area);
      if (missing > max_missing) continue;
      Patch p;
      p.top = top;
      p.left = left;
      p.source = source;
      p.disparity.resize(area);
      p.mask.resize(area);
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
          const std::size_t k = static_cast<std::size_t>(y) * size + x;
          p.mask[k] = m(y, x) ? 1 : 0;
          p.disparity[k] = m(y, x) ? static_cast<float>(disparity.values(top + y, left + x)) : 0.0f;
        }
      p.stack.resize(slices.size() * area * c);
      std::size_t k = 0;
      for (const auto& slice : slices)
        for (int y = 0; y < size; ++y)
          for (int x = 0; x < size; ++x)
            for (int ch = 0; ch < c; ++ch) p.stack[k++] = static_cast<float>(slice[ch](top + y, left + x));
      set.patches.push_back(std::move(p));
    }
  return set;
}

PatchSet crop_patches(const FocalStack& stack, const DisparityMap& disparity, int size, int stride, double max_missing,
                      std::size_t source) {
  return crop_patches(std::span<const Image>(stack.slices), disparity, size, stride, max_missing, source);
}

std::vector<std::pair<int, int>> default_dflf_pattern(int grid) {
  // below 5x5 the neighbors of the center coincide with the border views
  if (grid < 5) throw ParameterError("DFLF pattern needs a grid of at least 5x5");
  const int c = (grid - 1) / 2, e = grid - 1;
  return {{c, c}, {0, c}, {e, c}, {c, 0}, {c, e}, {0, 0}, {0, e}, {e, 0}, {e, e}, {c - 1, c}, {c + 1, c}};
}

std::vector<Image> dflf_input(const LightField& lf, const std::vector<std::pair<int, int>>& pattern) {
  std::set<std::pair<int, int>> seen;
  std::vector<Image> out;
  out.reserve(pattern.size());
  for (const auto& [u, v] : pattern) {
    if (u < 0 || u >= lf.grid_u() || v < 0 || v >= lf.grid_v())
      throw ParameterError("DFLF pattern index (" + std::to_string(u) + ", " + std::to_string(v) + ") outside the grid");
    if (!seen.insert({u, v}).second)
      throw ParameterError("DFLF pattern repeats (" + std::to_string(u) + ", " + std::to_string(v) + ")");
    out.push_back(lf.view(u, v));
  }
  return out;
}

StackBatch to_batch(std::span<const Image> slices) {
  if (slices.empty()) throw ShapeError("to_batch: empty stack");
  const int h = static_cast<int>(slices.front().height()), w = static_cast<int>(slices.front().width());
  const int c = static_cast<int>(slices.front().channel_count());
  StackBatch b(1, static_cast<int>(slices.size()), h, w, c);
  for (int s = 0; s < b.slices; ++s) {
    const auto& img = slices[static_cast<std::size_t>(s)];
    if (img.height() != h || img.width() != w || static_cast<int>(img.channel_count()) != c)
      throw ShapeError("to_batch: slices differ in shape");
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int ch = 0; ch < c; ++ch) b.at(0, s, y, x, ch) = static_cast<float>(img[ch](y, x));
  }
  return b;
}

StackBatch to_batch(const FocalStack& stack) { return to_batch(std::span<const Image>(stack.slices)); }

Batch make_batch(const PatchSet& set, std::span<const std::size_t> indices) {
  const int n = static_cast<int>(indices.size());
  Batch b;
  b.input = StackBatch(n, set.slices, set.size, set.size, set.channels);
  b.target = Tensor(n, 1, set.size, set.size);
  const std::size_t area = static_cast<std::size_t>(set.size) * set.size;
  b.mask.resize(area * n);
  for (int i = 0; i < n; ++i) {
    const Patch& p = set.patches.at(indices[static_cast<std::size_t>(i)]);
    std::copy(p.stack.begin(), p.stack.end(), b.input.data.begin() + static_cast<std::ptrdiff_t>(i * p.stack.size()));
    std::copy(p.disparity.begin(), p.disparity.end(), b.target.sample(i));
    std::copy(p.mask.begin(), p.mask.end(), b.mask.begin() + static_cast<std::ptrdiff_t>(i * area));
  }
  return b;
}

DisparityMap to_disparity(const Tensor& out, int b) {
  DisparityMap m(out.h(), out.w());
  for (int y = 0; y < out.h(); ++y)
    for (int x = 0; x < out.w(); ++x) m.values(y, x) = out.at(b, 0, y, x);
  return m;
}

}  // namespace ddff::nn
