#include "ddff/nn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <tuple>

namespace ddff::nn {

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw ParameterError("train.learning_rate must be positive");
  if (!(momentum >= 0 && momentum < 1)) throw ParameterError("train.momentum must be in [0,1)");
  if (batch_size < 1) throw ParameterError("train.batch_size must be >= 1");
  if (!(lr_decay > 0 && lr_decay <= 1)) throw ParameterError("train.lr_decay must be in (0,1]");
  if (decay_epochs < 1) throw ParameterError("train.decay_epochs must be >= 1");
  if (!(weight_decay >= 0)) throw ParameterError("train.weight_decay must be >= 0");
  if (epochs < 1) throw ParameterError("train.epochs must be >= 1");
  if (!(validation_fraction >= 0 && validation_fraction < 1))
    throw ParameterError("train.validation_fraction must be in [0,1)");
}

double learning_rate_at(const TrainConfig& cfg, int epoch) {
  return cfg.learning_rate * std::pow(cfg.lr_decay, epoch / cfg.decay_epochs);
}

SGD::SGD(std::vector<Parameter*> params, double momentum)
    : params_(std::move(params)), momentum_(static_cast<float>(momentum)) {
  velocity_.reserve(params_.size());
  for (auto* p : params_) velocity_.emplace_back(p->size(), 0.0f);
}

void SGD::step(double learning_rate) {
  const auto lr = static_cast<float>(learning_rate);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& v = velocity_[i];
    auto& w = params_[i]->value;
    const auto& g = params_[i]->grad;
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] = momentum_ * v[k] + g[k];
      w[k] -= lr * v[k];
    }
  }
}

LossResult<float> train_step(DDFFNet& model, SGD& opt, const Batch& batch, double learning_rate, double weight_decay) {
  Context ctx;
  ctx.training = true;
  ctx.rng = &model.rng();
  model.zero_grad();
  const Tensor out = model.forward(batch.input, ctx);
  auto loss = masked_l2_loss(out, batch.target, batch.mask, model, static_cast<float>(weight_decay));
  if (!std::isfinite(loss.value)) return loss;
  Tensor grad(out.n(), 1, out.h(), out.w());
  std::copy(loss.grad.begin(), loss.grad.end(), grad.data());
  model.backward(grad);
  add_weight_decay_grad(model, static_cast<float>(weight_decay));
  opt.step(learning_rate);
  return loss;
}

double evaluate_loss(DDFFNet& model, const PatchSet& set, int batch_size, double weight_decay) {
  double sum = 0.0;
  int batches = 0;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < set.patches.size(); start += static_cast<std::size_t>(batch_size)) {
    idx.clear();
    for (std::size_t k = start; k < std::min(set.patches.size(), start + batch_size); ++k) idx.push_back(k);
    const Batch b = make_batch(set, idx);
    const Tensor out = predict(model, b.input);
    sum += masked_l2_loss(out, b.target, b.mask, model, static_cast<float>(weight_decay)).value;
    ++batches;
  }
  return batches ? sum / batches : std::numeric_limits<double>::quiet_NaN();
}

InputNormalization fit_normalization(const std::vector<const PatchSet*>& sets, int channels) {
  std::vector<double> sum(static_cast<std::size_t>(channels), 0.0), sq(sum);
  std::size_t n = 0;
  for (const auto* set : sets)
    for (const auto& p : set->patches) {
      for (std::size_t k = 0; k < p.stack.size(); ++k) {
        const double v = p.stack[k];
        sum[k % channels] += v;
        sq[k % channels] += v * v;
      }
      n += p.stack.size() / channels;
    }
  InputNormalization norm;
  for (int c = 0; c < channels; ++c) {
    const double mean = n ? sum[c] / n : 0.5;
    const double var = n ? std::max(0.0, sq[c] / n - mean * mean) : 0.0625;
    norm.mean.push_back(static_cast<float>(mean));
    norm.stddev.push_back(static_cast<float>(std::max(std::sqrt(var), 1e-3)));
  }
  return norm;
}

namespace {

struct Snapshot {
  std::vector<std::vector<float>> params, buffers;

  void take(DDFFNet& m) {
    params.clear();
    buffers.clear();
    for (auto* p : m.parameters()) params.push_back(p->value);
    for (auto* b : m.buffers()) buffers.push_back(b->value);
  }
  void restore(DDFFNet& m) const {
    auto ps = m.parameters();
    auto bs = m.buffers();
    for (std::size_t i = 0; i < ps.size(); ++i) ps[i]->value = params[i];
    for (std::size_t i = 0; i < bs.size(); ++i) bs[i]->value = buffers[i];
  }
};

bool parameters_finite(const DDFFNet& m) {
  for (const auto* p : m.parameters())
    for (float v : p->value)
      if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

std::vector<EpochLog> train(DDFFNet& model, const std::vector<PatchSet>& stacks, const TrainConfig& cfg,
                            TrainingMetadata* metadata, const std::function<void(const EpochLog&)>& on_epoch) {
  cfg.validate();
  std::mt19937_64 data_rng(cfg.seed ^ 0x5DEECE66DULL);

  std::vector<std::size_t> order(stacks.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), data_rng);
  const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(stacks.size()) * cfg.validation_fraction));

  PatchSet train_set, val_set;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const PatchSet& s = stacks[order[k]];
    PatchSet& dst = k < n_val ? val_set : train_set;
    if (dst.size == 0) {
      dst.size = s.size;
      dst.slices = s.slices;
      dst.channels = s.channels;
    } else if (dst.size != s.size || dst.slices != s.slices || dst.channels != s.channels) {
      throw ShapeError("train: patch sets differ in geometry");
    }
    dst.candidates += s.candidates;
    dst.patches.insert(dst.patches.end(), s.patches.begin(), s.patches.end());
  }
  if (train_set.patches.empty()) throw ParameterError("train: empty training split");
  std::sort(train_set.patches.begin(), train_set.patches.end(),
            [](const Patch& a, const Patch& b) { return std::tie(a.source, a.top, a.left) < std::tie(b.source, b.top, b.left); });

  if (cfg.fit_normalization) model.normalization() = fit_normalization({&train_set}, train_set.channels);

  SGD opt(model.parameters(), cfg.momentum);
  std::vector<EpochLog> curve;
  Snapshot best;
  double best_loss = std::numeric_limits<double>::infinity();
  int best_epoch = -1;
  std::vector<std::size_t> perm(train_set.patches.size());
  std::iota(perm.begin(), perm.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    EpochLog log;
    log.epoch = epoch;
    log.learning_rate = learning_rate_at(cfg, epoch);
    std::shuffle(perm.begin(), perm.end(), data_rng);
    double sum = 0.0, data_sum = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < perm.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(perm.size(), start + cfg.batch_size);
      const Batch b = make_batch(train_set, std::span<const std::size_t>(perm.data() + start, end - start));
      const auto loss = train_step(model, opt, b, log.learning_rate, cfg.weight_decay);
      if (!std::isfinite(loss.value))
        throw DivergenceError("training diverged: loss is " + std::to_string(loss.value) + " at epoch " +
                              std::to_string(epoch) + ", batch " + std::to_string(batches));
      if (loss.no_valid_pixels) ++log.batches_without_valid_pixels;
      sum += loss.value;
      data_sum += loss.data_term;
      ++batches;
    }
    if (!parameters_finite(model))
      throw DivergenceError("training diverged: non-finite parameters after epoch " + std::to_string(epoch));
    log.train_loss = sum / batches;
    log.train_data_loss = data_sum / batches;
    log.validation_loss = val_set.patches.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                  : evaluate_loss(model, val_set, cfg.batch_size, cfg.weight_decay);
    log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double criterion = val_set.patches.empty() ? log.train_loss : log.validation_loss;
    if (criterion < best_loss) {
      best_loss = criterion;
      best_epoch = epoch;
      best.take(model);
    }
    curve.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  if (!best.params.empty()) best.restore(model);
  if (metadata) {
    metadata->epochs = cfg.epochs;
    metadata->final_loss = curve.back().train_loss;
    metadata->seed = cfg.seed;
    metadata->best_epoch = best_epoch;
  }
  return curve;
}

}  // namespace ddff::nn
