#include "bandit/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "bandit/errors.hpp"

namespace bandit {

AdamState::AdamState(const Network& net) {
  layers_.resize(net.layer_count());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = net.layer(l);
    layers_[l].m_w = Matrix(layer.fan_in(), layer.fan_out());
    layers_[l].v_w = Matrix(layer.fan_in(), layer.fan_out());
    layers_[l].m_b.assign(layer.fan_out(), 0.0);
    layers_[l].v_b.assign(layer.fan_out(), 0.0);
  }
}

void AdamState::reset() {
  for (auto& lm : layers_) {
    std::fill(lm.m_w.data(), lm.m_w.data() + lm.m_w.size(), 0.0);
    std::fill(lm.v_w.data(), lm.v_w.data() + lm.v_w.size(), 0.0);
    std::fill(lm.m_b.begin(), lm.m_b.end(), 0.0);
    std::fill(lm.v_b.begin(), lm.v_b.end(), 0.0);
    lm.m_p = lm.v_p = 0.0;
  }
  t_ = 0;
}

void AdamState::step(Network& net, const Gradients& grads, const AdamConfig& cfg) {
  if (grads.layers.size() != layers_.size())
    throw std::invalid_argument("adam: gradient/state layer counts differ");

  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerGradients& g = grads.layers[l];
    if (g.weights.rows() != net.layer(l).fan_in() || g.weights.cols() != net.layer(l).fan_out())
      throw std::invalid_argument("adam: gradient shape mismatch");
    if (!g.weights.all_finite()) throw NumericError("adam: non-finite weight gradient");
    for (double v : g.bias)
      if (!std::isfinite(v)) throw NumericError("adam: non-finite bias gradient");
    if (net.layer(l).dropout.learned() && !std::isfinite(g.p_logit))
      throw NumericError("adam: non-finite dropout gradient");
  }

  ++t_;
  const double corr1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
  const double corr2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
  auto update = [&](double& param, double g, double& m, double& v) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
    const double mhat = m / corr1;
    const double vhat = v / corr2;
    param -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
  };

  for (std::size_t l = 0; l < layers_.size(); ++l) {
    DenseLayer& layer = net.layer(l);
    LayerMoments& lm = layers_[l];
    const LayerGradients& g = grads.layers[l];
    for (std::size_t i = 0; i < layer.weights.size(); ++i)
      update(layer.weights.data()[i], g.weights.data()[i], lm.m_w.data()[i], lm.v_w.data()[i]);
    for (std::size_t j = 0; j < layer.bias.size(); ++j)
      update(layer.bias[j], g.bias[j], lm.m_b[j], lm.v_b[j]);
    if (layer.dropout.learned())
      update(layer.dropout.p_logit, g.p_logit, lm.m_p, lm.v_p);
  }
}

}  // namespace bandit
