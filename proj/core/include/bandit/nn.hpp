#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bandit/matrix.hpp"
#include "bandit/random.hpp"

namespace bandit {

enum class Activation { kRelu, kSigmoid, kIdentity };
enum class DropoutMode { kNone, kBernoulliFixed, kConcreteLearned };

// Numerically stable scalar helpers.
inline double logistic(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// Uniform variates at exactly 0 or 1 would give an infinite logit.
inline constexpr double kNoiseEps = 1e-7;

// Concrete (continuous) relaxation of a Bernoulli drop decision.
//
// Returns the retained fraction in (0, 1): near 1 when the unit is kept
// (u -> 0), near 0 when it is dropped (u -> 1). The relaxed drop indicator
// is z = logistic((logit(p) + logit(u)) / temperature) and the mask is
// 1 - z, differentiable in p. As temperature -> 0 this sharpens to a
// Bernoulli mask that drops with probability exactly p.
double concrete_mask(double p, double u, double temperature);

struct DropoutSpec {
  DropoutMode mode = DropoutMode::kNone;
  double p = 0.0;           // drop probability, bernoulli-fixed mode
  double p_logit = 0.0;     // learnable logit of the drop probability
  double temperature = 0.1;

  // Current drop probability; 0 when dropout is off. Always in (0,1) for
  // the learned mode since it is the logistic of a finite logit.
  double rate() const {
    switch (mode) {
      case DropoutMode::kNone: return 0.0;
      case DropoutMode::kBernoulliFixed: return p;
      case DropoutMode::kConcreteLearned: return logistic(p_logit);
    }
    return 0.0;
  }
  bool active() const { return mode != DropoutMode::kNone; }
  bool learned() const { return mode == DropoutMode::kConcreteLearned; }
};

struct DenseLayer {
  Matrix weights;               // fan_in x fan_out
  std::vector<double> bias;     // fan_out
  Activation activation = Activation::kIdentity;
  DropoutSpec dropout;          // applied to this layer's output

  std::size_t fan_in() const { return weights.rows(); }
  std::size_t fan_out() const { return weights.cols(); }
};

// One uniform variate per droppable unit, fixed for the duration of one
// forward pass. Entry l is empty when layer l has no dropout.
struct NoiseDraw {
  std::vector<std::vector<double>> u;
};

struct LayerGradients {
  Matrix weights;
  std::vector<double> bias;
  double p_logit = 0.0;  // meaningful only for concrete-learned layers
};

struct Gradients {
  std::vector<LayerGradients> layers;
};

// Loss breakdown: total = bce + weight_reg + dropout_reg.
struct LossTerms {
  double total = 0.0;
  double bce = 0.0;
  double weight_reg = 0.0;   // sum_l lambda_w/(1-p) * ||W||^2
  double dropout_reg = 0.0;  // sum_l lambda_d * fan_in * (p log p + (1-p) log(1-p))
};

// Dense feed-forward network with a sigmoid scalar head, reverse-mode
// gradients, and per-layer Bernoulli or Concrete dropout.
class Network {
 public:
  Network() = default;
  explicit Network(std::vector<DenseLayer> layers, double length_scale = 0.01);

  // fan-in-scaled uniform initialization; hidden layers are ReLU with the
  // requested dropout on their outputs, the head is a 1-unit sigmoid with
  // no dropout.
  static Network mlp(std::size_t input_dim, std::span<const std::size_t> hidden,
                     DropoutMode mode, double dropout_param, double temperature,
                     Rng& init_rng, double length_scale = 0.01);

  std::size_t layer_count() const { return layers_.size(); }
  DenseLayer& layer(std::size_t i) { return layers_[i]; }
  const DenseLayer& layer(std::size_t i) const { return layers_[i]; }
  std::size_t input_dim() const { return layers_.front().fan_in(); }
  std::size_t output_dim() const { return layers_.back().fan_out(); }

  // Prior length-scale for the weight regularizer, lambda_w = l^2 / N.
  double length_scale() const { return length_scale_; }
  void set_length_scale(double l) { length_scale_ = l; }

  bool has_dropout() const;
  // Mean drop probability over layers with active dropout; NaN if none.
  double mean_dropout_rate() const;

  NoiseDraw sample_noise(Rng& rng) const;

  // Deterministic pass: no mask, no rescale.
  Matrix forward(const Matrix& input) const;
  // Stochastic pass: mask then rescale by 1/(1-p) so the expected
  // activation is preserved.
  Matrix forward(const Matrix& input, const NoiseDraw& noise) const;

  // Mean binary cross-entropy of the sigmoid head against targets in [0,1]
  // plus the dataset-size-scaled regularizers. Gradients cover weights,
  // biases and the dropout logits of concrete-learned layers.
  LossTerms loss_and_gradients(const Matrix& inputs, std::span<const double> targets,
                               std::size_t dataset_size, const NoiseDraw& noise,
                               Gradients& grads) const;

  // Loss only, same value as loss_and_gradients for the same noise.
  LossTerms loss(const Matrix& inputs, std::span<const double> targets,
                 std::size_t dataset_size, const NoiseDraw& noise) const;

  Gradients zero_gradients() const;

 private:
  struct ForwardCache;
  void forward_impl(const Matrix& input, const NoiseDraw* noise,
                    ForwardCache* cache, Matrix& out) const;
  LossTerms regularizer(std::size_t dataset_size, Gradients* grads) const;

  std::vector<DenseLayer> layers_;
  double length_scale_ = 0.01;
};

const char* to_string(Activation a);
const char* to_string(DropoutMode m);

}  // namespace bandit
