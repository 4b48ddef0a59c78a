#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "bandit/env.hpp"
#include "bandit/matrix.hpp"

namespace bandit {

// One row of the UCI agaricus-lepiota file: a class label plus 22
// single-character categorical feature codes.
struct MushroomRecord {
  bool edible = false;
  std::vector<char> features;
};

inline constexpr std::size_t kMushroomFeatureCount = 22;

// Strict reader for the UCI comma-separated format: 23 single-character
// fields per line, first field 'e' or 'p'. Parse errors carry the line
// number.
std::vector<MushroomRecord> parse_mushroom_csv(std::istream& in);

// One-hot encoding with the category vocabulary built from the data; '?'
// is a category of its own. Column order is deterministic: feature index
// first, then category code lexicographic.
class EncodedDataset {
 public:
  static EncodedDataset encode(const std::vector<MushroomRecord>& records);

  std::size_t rows() const { return contexts_.rows(); }
  std::size_t dim() const { return contexts_.cols(); }
  const Matrix& contexts() const { return contexts_; }
  bool edible(std::size_t row) const { return edible_[row]; }
  std::size_t edible_count() const;

  // Inverse of the encoding; recovers the original categorical codes.
  std::vector<char> decode_row(std::size_t row) const;

 private:
  Matrix contexts_;
  std::vector<bool> edible_;
  // vocab_[f] lists the category codes of feature f in column order.
  std::vector<std::vector<char>> vocab_;
  std::vector<std::size_t> offsets_;
};

EncodedDataset load_mushroom_dataset(std::istream& in);
EncodedDataset load_mushroom_file(const std::filesystem::path& path);

inline constexpr std::size_t kMushroomCanonicalRows = 8124;
// 23 single-char fields, 22 commas, one newline per row.
inline constexpr std::size_t kMushroomCanonicalBytes = kMushroomCanonicalRows * 46;

// Actions: 0 = eat the presented mushroom, 1 = decline. Eating an edible
// mushroom pays 1, eating a poisonous one pays 0, declining pays 1 with
// probability decline_p.
class MushroomEnv final : public Environment {
 public:
  static constexpr std::size_t kEat = 0;
  static constexpr std::size_t kDecline = 1;

  MushroomEnv(std::shared_ptr<const EncodedDataset> data, double decline_p = 0.5);

  EnvStep step(Rng& rng) const override;
  std::size_t context_dim() const override { return data_->dim(); }
  std::size_t num_actions() const override { return 2; }
  std::string_view name() const override { return "mushroom"; }

 private:
  std::shared_ptr<const EncodedDataset> data_;
  double decline_p_;
};

}  // namespace bandit
