#pragma once

#include <span>

#include "bandit/adam.hpp"
#include "bandit/matrix.hpp"
#include "bandit/nn.hpp"
#include "bandit/random.hpp"

namespace bandit {

struct TrainConfig {
  int epochs = 64;
  int batch_size = 64;
  AdamConfig adam;
};

// Minibatch training over (inputs, targets): per epoch, shuffle rows, slice
// into batches (last partial batch kept), one fresh NoiseDraw per batch.
// dataset_size scales the regularizers and is normally inputs.rows().
// Returns the mean total loss of the last epoch. Throws NumericError on
// divergence.
double train_network(Network& net, AdamState& adam, const Matrix& inputs,
                     std::span<const double> targets, std::size_t dataset_size,
                     const TrainConfig& cfg, Rng& rng);

}  // namespace bandit
