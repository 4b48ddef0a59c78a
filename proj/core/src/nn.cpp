#include "bandit/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bandit/errors.hpp"

namespace bandit {

double concrete_mask(double p, double u, double temperature) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("concrete_mask: p outside (0,1)");
  if (!(temperature > 0.0)) throw std::invalid_argument("concrete_mask: temperature <= 0");
  u = std::clamp(u, kNoiseEps, 1.0 - kNoiseEps);
  const double z = logistic((logit(p) + logit(u)) / temperature);
  return 1.0 - z;
}

Network::Network(std::vector<DenseLayer> layers, double length_scale)
    : layers_(std::move(layers)), length_scale_(length_scale) {
  if (layers_.empty()) throw std::invalid_argument("Network: no layers");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    if (layer.bias.size() != layer.fan_out())
      throw std::invalid_argument("Network: bias length != fan_out");
    if (l > 0 && layer.fan_in() != layers_[l - 1].fan_out())
      throw std::invalid_argument("Network: adjacent layer dims inconsistent");
    const DropoutSpec& d = layer.dropout;
    if (d.active() && !(d.temperature > 0.0))
      throw std::invalid_argument("Network: dropout temperature <= 0");
    if (d.mode == DropoutMode::kBernoulliFixed && !(d.p > 0.0 && d.p < 1.0))
      throw std::invalid_argument("Network: fixed dropout rate outside (0,1)");
  }
}

Network Network::mlp(std::size_t input_dim, std::span<const std::size_t> hidden,
                     DropoutMode mode, double dropout_param, double temperature,
                     Rng& init_rng, double length_scale) {
  std::vector<DenseLayer> layers;
  layers.reserve(hidden.size() + 1);
  std::size_t in = input_dim;
  auto init_layer = [&](std::size_t fan_in, std::size_t fan_out) {
    DenseLayer layer;
    layer.weights = Matrix(fan_in, fan_out);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (std::size_t i = 0; i < layer.weights.size(); ++i)
      layer.weights.data()[i] = (2.0 * init_rng.u01() - 1.0) * limit;
    layer.bias.assign(fan_out, 0.0);
    return layer;
  };
  for (std::size_t width : hidden) {
    DenseLayer layer = init_layer(in, width);
    layer.activation = Activation::kRelu;
    layer.dropout.mode = mode;
    layer.dropout.temperature = temperature;
    if (mode == DropoutMode::kBernoulliFixed) {
      layer.dropout.p = dropout_param;
    } else if (mode == DropoutMode::kConcreteLearned) {
      if (!(dropout_param > 0.0 && dropout_param < 1.0))
        throw std::invalid_argument("mlp: initial dropout rate outside (0,1)");
      layer.dropout.p_logit = logit(dropout_param);
    }
    layers.push_back(std::move(layer));
    in = width;
  }
  DenseLayer head = init_layer(in, 1);
  head.activation = Activation::kSigmoid;
  layers.push_back(std::move(head));
  return Network(std::move(layers), length_scale);
}

bool Network::has_dropout() const {
  return std::any_of(layers_.begin(), layers_.end(),
                     [](const DenseLayer& l) { return l.dropout.active(); });
}

double Network::mean_dropout_rate() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const DenseLayer& l : layers_) {
    if (l.dropout.active()) {
      sum += l.dropout.rate();
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : std::nan("");
}

NoiseDraw Network::sample_noise(Rng& rng) const {
  NoiseDraw noise;
  noise.u.resize(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (!layers_[l].dropout.active()) continue;
    auto& u = noise.u[l];
    u.resize(layers_[l].fan_out());
    for (double& v : u) v = rng.u01();
  }
  return noise;
}

struct Network::ForwardCache {
  // Per layer: post-activation H, post-dropout output O (input to the next
  // layer), retained-fraction masks and relaxed drop indicators.
  std::vector<Matrix> h;
  std::vector<Matrix> o;
  std::vector<std::vector<double>> mask;
  std::vector<std::vector<double>> zdrop;
  Matrix logits;  // pre-activation of the sigmoid head
};

void Network::forward_impl(const Matrix& input, const NoiseDraw* noise,
                           ForwardCache* cache, Matrix& out) const {
  if (input.cols() != input_dim())
    throw std::invalid_argument("forward: input cols != network input dim");
  if (noise && noise->u.size() != layers_.size())
    throw std::invalid_argument("forward: noise draw does not cover the network");

  if (cache) {
    cache->h.resize(layers_.size());
    cache->o.resize(layers_.size());
    cache->mask.assign(layers_.size(), {});
    cache->zdrop.assign(layers_.size(), {});
  }

  const std::size_t batch = input.rows();
  Matrix current;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    const Matrix& x = l == 0 ? input : current;
    Matrix z = matmul(x, layer.weights);
    for (std::size_t r = 0; r < batch; ++r) {
      auto row = z.row(r);
      for (std::size_t j = 0; j < row.size(); ++j) row[j] += layer.bias[j];
    }
    if (cache && l + 1 == layers_.size()) cache->logits = z;

    Matrix h = std::move(z);
    switch (layer.activation) {
      case Activation::kRelu:
        for (std::size_t i = 0; i < h.size(); ++i) h.data()[i] = std::max(0.0, h.data()[i]);
        break;
      case Activation::kSigmoid:
        for (std::size_t i = 0; i < h.size(); ++i) h.data()[i] = logistic(h.data()[i]);
        break;
      case Activation::kIdentity:
        break;
    }

    Matrix o;
    if (layer.dropout.active() && noise) {
      const auto& u = noise->u[l];
      if (u.size() != layer.fan_out())
        throw std::invalid_argument("forward: noise draw missing for a dropout layer");
      const double p = layer.dropout.rate();
      const double t = layer.dropout.temperature;
      std::vector<double> mask(u.size());
      std::vector<double> zdrop;
      if (layer.dropout.learned()) {
        zdrop.resize(u.size());
        for (std::size_t j = 0; j < u.size(); ++j) {
          mask[j] = concrete_mask(p, u[j], t);
          zdrop[j] = 1.0 - mask[j];
        }
      } else {
        // Bernoulli limit of the concrete mask: drop iff u > 1 - p.
        for (std::size_t j = 0; j < u.size(); ++j) mask[j] = u[j] > 1.0 - p ? 0.0 : 1.0;
      }
      const double rescale = 1.0 / (1.0 - p);
      o = Matrix(batch, layer.fan_out());
      for (std::size_t r = 0; r < batch; ++r) {
        auto hr = h.row(r);
        auto orow = o.row(r);
        for (std::size_t j = 0; j < hr.size(); ++j) orow[j] = hr[j] * mask[j] * rescale;
      }
      if (cache) {
        cache->mask[l] = std::move(mask);
        cache->zdrop[l] = std::move(zdrop);
      }
    } else {
      o = h;
    }

    if (cache) {
      cache->h[l] = std::move(h);
      cache->o[l] = o;
    }
    current = std::move(o);
  }
  out = std::move(current);
  if (!out.all_finite()) throw NumericError("forward: non-finite activation");
}

Matrix Network::forward(const Matrix& input) const {
  Matrix out;
  forward_impl(input, nullptr, nullptr, out);
  return out;
}

Matrix Network::forward(const Matrix& input, const NoiseDraw& noise) const {
  Matrix out;
  forward_impl(input, &noise, nullptr, out);
  return out;
}

Gradients Network::zero_gradients() const {
  Gradients g;
  g.layers.resize(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    g.layers[l].weights = Matrix(layers_[l].fan_in(), layers_[l].fan_out());
    g.layers[l].bias.assign(layers_[l].fan_out(), 0.0);
    g.layers[l].p_logit = 0.0;
  }
  return g;
}

LossTerms Network::regularizer(std::size_t dataset_size, Gradients* grads) const {
  const double lambda_w = length_scale_ * length_scale_ / static_cast<double>(dataset_size);
  const double lambda_d = 2.0 / static_cast<double>(dataset_size);
  LossTerms terms;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    const double p = layer.dropout.rate();
    const double keep = 1.0 - p;
    double wsq = 0.0;
    for (std::size_t i = 0; i < layer.weights.size(); ++i) {
      const double w = layer.weights.data()[i];
      wsq += w * w;
    }
    terms.weight_reg += lambda_w / keep * wsq;
    if (grads) {
      const double c = 2.0 * lambda_w / keep;
      for (std::size_t i = 0; i < layer.weights.size(); ++i)
        grads->layers[l].weights.data()[i] += c * layer.weights.data()[i];
    }
    if (layer.dropout.active()) {
      const double q = layer.dropout.learned() ? layer.dropout.p_logit : logit(p);
      const double fan_in = static_cast<double>(layer.fan_in());
      // p log p + (1-p) log(1-p) written as p*q - softplus(q); stable for
      // any finite q.
      terms.dropout_reg += lambda_d * fan_in * (p * q - softplus(q));
      if (grads && layer.dropout.learned()) {
        grads->layers[l].p_logit +=
            (lambda_w * wsq / (keep * keep) + lambda_d * fan_in * q) * p * keep;
      }
    }
  }
  return terms;
}

LossTerms Network::loss_and_gradients(const Matrix& inputs, std::span<const double> targets,
                                      std::size_t dataset_size, const NoiseDraw& noise,
                                      Gradients& grads) const {
  const std::size_t batch = inputs.rows();
  if (batch == 0) throw std::invalid_argument("loss: empty batch");
  if (targets.size() != batch) throw std::invalid_argument("loss: targets size != batch");
  if (dataset_size < batch) throw std::invalid_argument("loss: dataset_size < batch size");
  if (layers_.back().activation != Activation::kSigmoid || output_dim() != 1)
    throw std::invalid_argument("loss: network must end in a 1-unit sigmoid head");
  for (double y : targets)
    if (!(y >= 0.0 && y <= 1.0)) throw std::invalid_argument("loss: target outside [0,1]");

  ForwardCache cache;
  Matrix out;
  forward_impl(inputs, has_dropout() ? &noise : nullptr, &cache, out);

  grads = zero_gradients();
  LossTerms terms = regularizer(dataset_size, &grads);

  const double inv_batch = 1.0 / static_cast<double>(batch);
  double bce = 0.0;
  // d(loss)/d(logit) for the fused sigmoid + cross-entropy head.
  Matrix dz(batch, 1);
  for (std::size_t r = 0; r < batch; ++r) {
    const double z = cache.logits(r, 0);
    bce += softplus(z) - targets[r] * z;
    dz(r, 0) = (logistic(z) - targets[r]) * inv_batch;
  }
  bce *= inv_batch;
  terms.bce = bce;

  for (std::size_t l = layers_.size(); l-- > 0;) {
    const DenseLayer& layer = layers_[l];
    const Matrix& x = l == 0 ? inputs : cache.o[l - 1];
    {
      Matrix gw = matmul_at_b(x, dz);
      auto& acc = grads.layers[l].weights;
      for (std::size_t i = 0; i < acc.size(); ++i) acc.data()[i] += gw.data()[i];
    }
    {
      auto& gb = grads.layers[l].bias;
      for (std::size_t r = 0; r < batch; ++r) {
        auto row = dz.row(r);
        for (std::size_t j = 0; j < row.size(); ++j) gb[j] += row[j];
      }
    }
    if (l == 0) break;

    Matrix dout = matmul_a_bt(dz, layer.weights);  // gradient at prev layer's output
    const DenseLayer& prev = layers_[l - 1];
    if (prev.dropout.active()) {
      const double p = prev.dropout.rate();
      const double keep = 1.0 - p;
      const auto& mask = cache.mask[l - 1];
      const Matrix& h = cache.h[l - 1];
      if (prev.dropout.learned()) {
        const auto& zdrop = cache.zdrop[l - 1];
        const double t = prev.dropout.temperature;
        double gq = 0.0;
        for (std::size_t j = 0; j < mask.size(); ++j) {
          double s = 0.0;
          for (std::size_t r = 0; r < batch; ++r) s += dout(r, j) * h(r, j);
          // d/dq of h * mask(q) / (1-p(q)) with q the drop logit
          gq += s * (mask[j] * p - zdrop[j] * (1.0 - zdrop[j]) / t) / keep;
        }
        grads.layers[l - 1].p_logit += gq;
      }
      for (std::size_t r = 0; r < batch; ++r) {
        auto row = dout.row(r);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] *= mask[j] / keep;
      }
    }
    // chain through the previous layer's activation
    const Matrix& hprev = cache.h[l - 1];
    switch (prev.activation) {
      case Activation::kRelu:
        for (std::size_t i = 0; i < dout.size(); ++i)
          if (hprev.data()[i] <= 0.0) dout.data()[i] = 0.0;
        break;
      case Activation::kSigmoid:
        for (std::size_t i = 0; i < dout.size(); ++i) {
          const double hh = hprev.data()[i];
          dout.data()[i] *= hh * (1.0 - hh);
        }
        break;
      case Activation::kIdentity:
        break;
    }
    dz = std::move(dout);
  }

  terms.total = terms.bce + terms.weight_reg + terms.dropout_reg;
  if (!std::isfinite(terms.total)) throw NumericError("loss: non-finite loss");
  return terms;
}

LossTerms Network::loss(const Matrix& inputs, std::span<const double> targets,
                        std::size_t dataset_size, const NoiseDraw& noise) const {
  const std::size_t batch = inputs.rows();
  if (batch == 0) throw std::invalid_argument("loss: empty batch");
  if (targets.size() != batch) throw std::invalid_argument("loss: targets size != batch");
  if (dataset_size < batch) throw std::invalid_argument("loss: dataset_size < batch size");

  ForwardCache cache;
  Matrix out;
  forward_impl(inputs, has_dropout() ? &noise : nullptr, &cache, out);

  LossTerms terms = regularizer(dataset_size, nullptr);
  double bce = 0.0;
  for (std::size_t r = 0; r < batch; ++r) {
    const double z = cache.logits(r, 0);
    bce += softplus(z) - targets[r] * z;
  }
  terms.bce = bce / static_cast<double>(batch);
  terms.total = terms.bce + terms.weight_reg + terms.dropout_reg;
  if (!std::isfinite(terms.total)) throw NumericError("loss: non-finite loss");
  return terms;
}

const char* to_string(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kIdentity: return "identity";
  }
  return "?";
}

const char* to_string(DropoutMode m) {
  switch (m) {
    case DropoutMode::kNone: return "none";
    case DropoutMode::kBernoulliFixed: return "bernoulli-fixed";
    case DropoutMode::kConcreteLearned: return "concrete-learned";
  }
  return "?";
}

}  // namespace bandit
