#pragma once

#include <filesystem>

#include "ddff/nn/train.hpp"

namespace ddff::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Single-file archive: magic, version, JSON header, raw little-endian float32 tensors.
/// See docs/checkpoint-format.md.
void save_checkpoint(const std::filesystem::path& path, const DDFFNet& model, const TrainingMetadata& metadata);
TrainedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace ddff::nn
