#pragma once

#include <cstdint>
#include <vector>

#include "bandit/matrix.hpp"
#include "bandit/nn.hpp"

namespace bandit {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over all trainable parameters of a Network: weights,
// biases, and the drop logits of concrete-learned layers. Moment shapes
// mirror the parameter shapes.
class AdamState {
 public:
  explicit AdamState(const Network& net);

  // Reset moments and the step counter (used when a retrain starts).
  void reset();

  // One update step. A non-finite gradient rejects the whole step and
  // throws NumericError; parameters are left untouched.
  void step(Network& net, const Gradients& grads, const AdamConfig& cfg);

  std::int64_t steps_taken() const { return t_; }

 private:
  struct LayerMoments {
    Matrix m_w, v_w;
    std::vector<double> m_b, v_b;
    double m_p = 0.0, v_p = 0.0;
  };
  std::vector<LayerMoments> layers_;
  std::int64_t t_ = 0;
};

}  // namespace bandit
