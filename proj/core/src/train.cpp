#include "bandit/train.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace bandit {

double train_network(Network& net, AdamState& adam, const Matrix& inputs,
                     std::span<const double> targets, std::size_t dataset_size,
                     const TrainConfig& cfg, Rng& rng) {
  const std::size_t n = inputs.rows();
  if (n == 0) throw std::invalid_argument("train: empty dataset");
  if (targets.size() != n) throw std::invalid_argument("train: targets size != rows");
  if (cfg.epochs < 1 || cfg.batch_size < 1)
    throw std::invalid_argument("train: epochs and batch_size must be >= 1");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch_size = std::min<std::size_t>(cfg.batch_size, n);

  Matrix batch_x(batch_size, inputs.cols());
  std::vector<double> batch_y(batch_size);
  Gradients grads;
  double last_epoch_loss = 0.0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t count = std::min(batch_size, n - start);
      if (batch_x.rows() != count) {
        batch_x = Matrix(count, inputs.cols());
        batch_y.resize(count);
      }
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t src = order[start + i];
        std::copy(inputs.row(src).begin(), inputs.row(src).end(), batch_x.row(i).begin());
        batch_y[i] = targets[src];
      }
      const NoiseDraw noise = net.sample_noise(rng);
      const LossTerms terms =
          net.loss_and_gradients(batch_x, batch_y, dataset_size, noise, grads);
      adam.step(net, grads, cfg.adam);
      epoch_loss += terms.total;
      ++batches;
    }
    last_epoch_loss = epoch_loss / static_cast<double>(batches);
  }
  return last_epoch_loss;
}

}  // namespace bandit
