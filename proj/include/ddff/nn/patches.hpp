#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ddff/image.hpp"
#include "ddff/lightfield.hpp"
#include "ddff/nn/tensor.hpp"
#include "ddff/refocus.hpp"

namespace ddff::nn {

struct Patch {
  std::vector<float> stack;  // (S, size, size, C)
  std::vector<float> disparity;
  std::vector<std::uint8_t> mask;
  int top = 0, left = 0;
  std::size_t source = 0;
};

struct PatchSet {
  int size = 0, slices = 0, channels = 0;
  std::size_t candidates = 0;
  std::vector<Patch> patches;
};

/// 0, stride, 2·stride, … below extent − size, then extent − size itself.
std::vector<int> patch_offsets(int extent, int size, int stride);

/// Tiles the frame with size×size patches and drops those whose invalid fraction exceeds max_missing.
PatchSet crop_patches(std::span<const Image> slices, const DisparityMap& disparity, int size = 224, int stride = 56,
                      double max_missing = 0.20, std::size_t source = 0);
PatchSet crop_patches(const FocalStack& stack, const DisparityMap& disparity, int size = 224, int stride = 56,
                      double max_missing = 0.20, std::size_t source = 0);

/// Default 11-view pattern, (u, v) pairs on a grid of the given size: center, the ends of the central row
/// and column, the four corners, and both horizontal neighbors of the center.
std::vector<std::pair<int, int>> default_dflf_pattern(int grid = 9);

/// Sub-aperture views in pattern order, usable as an S = pattern.size() input.
std::vector<Image> dflf_input(const LightField& lf, const std::vector<std::pair<int, int>>& pattern);

/// Whole frames as a single-sample batch.
StackBatch to_batch(std::span<const Image> slices);
StackBatch to_batch(const FocalStack& stack);

struct Batch {
  StackBatch input;
  Tensor target;  // (B, 1, size, size)
  std::vector<std::uint8_t> mask;
};

Batch make_batch(const PatchSet& set, std::span<const std::size_t> indices);

/// Batch output (b, 0, ·, ·) as a disparity map.
DisparityMap to_disparity(const Tensor& out, int b = 0);

}  // namespace ddff::nn
