#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ddff/nn/ddffnet.hpp"
#include "ddff/nn/loss.hpp"
#include "ddff/nn/patches.hpp"

namespace ddff::nn {

struct TrainConfig {
  double learning_rate = 1e-3;
  double momentum = 0.9;
  int batch_size = 2;
  double lr_decay = 0.9;
  int decay_epochs = 4;
  double weight_decay = 5e-4;
  int epochs = 1;
  std::uint64_t seed = 0;
  double validation_fraction = 0.2;
  /// Replace the model's input normalization with per-channel statistics of the training patches.
  bool fit_normalization = true;

  void validate() const;
};

/// Learning rate for a 0-based epoch.
double learning_rate_at(const TrainConfig& cfg, int epoch);

struct EpochLog {
  int epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;
  /// Masked mean squared error alone, without the weight penalty.
  double train_data_loss = 0.0;
  /// NaN without a validation split.
  double validation_loss = 0.0;
  int batches_without_valid_pixels = 0;
  double seconds = 0.0;
};

struct TrainingMetadata {
  int epochs = 0;
  double final_loss = 0.0;
  std::uint64_t seed = 0;
  int best_epoch = -1;
  /// "focal_stack", or "dflf" with the sub-aperture pattern used to build the input.
  std::string input = "focal_stack";
  std::vector<std::pair<int, int>> dflf_pattern;
};

struct TrainedModel {
  std::unique_ptr<DDFFNet> model;
  TrainingMetadata metadata;
  std::vector<EpochLog> curve;
};

/// SGD with momentum: v ← μ·v + g, w ← w − lr·v.
class SGD {
 public:
  SGD(std::vector<Parameter*> params, double momentum);
  void step(double learning_rate);

 private:
  std::vector<Parameter*> params_;
  std::vector<std::vector<float>> velocity_;
  float momentum_;
};

/// One forward/backward/update on a batch; returns the loss before the update.
LossResult<float> train_step(DDFFNet& model, SGD& opt, const Batch& batch, double learning_rate, double weight_decay);

/// Mean loss over a patch set in inference mode.
double evaluate_loss(DDFFNet& model, const PatchSet& set, int batch_size, double weight_decay);

/// Per-channel mean and standard deviation of all stack samples.
InputNormalization fit_normalization(const std::vector<const PatchSet*>& sets, int channels);

/// Trains `model` in place on per-stack patch sets. Whole stacks are held out for validation; the model is left
/// at the epoch with the lowest validation loss (training loss when no stack is held out).
std::vector<EpochLog> train(DDFFNet& model, const std::vector<PatchSet>& stacks, const TrainConfig& cfg,
                            TrainingMetadata* metadata = nullptr,
                            const std::function<void(const EpochLog&)>& on_epoch = {});

}  // namespace ddff::nn
