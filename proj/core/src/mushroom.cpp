#include "bandit/mushroom.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bandit/errors.hpp"

namespace bandit {

std::vector<MushroomRecord> parse_mushroom_csv(std::istream& in) {
  std::vector<MushroomRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<char> fields;
    fields.reserve(kMushroomFeatureCount + 1);
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view field =
          std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                          : comma - start);
      if (field.size() != 1)
        throw DataError("mushroom: line " + std::to_string(line_no) +
                        ": field is not a single character");
      fields.push_back(field[0]);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != kMushroomFeatureCount + 1)
      throw DataError("mushroom: line " + std::to_string(line_no) + ": expected 23 fields, got " +
                      std::to_string(fields.size()));
    if (fields[0] != 'e' && fields[0] != 'p')
      throw DataError("mushroom: line " + std::to_string(line_no) + ": unknown class code '" +
                      std::string(1, fields[0]) + "'");

    MushroomRecord rec;
    rec.edible = fields[0] == 'e';
    rec.features.assign(fields.begin() + 1, fields.end());
    records.push_back(std::move(rec));
  }
  return records;
}

EncodedDataset EncodedDataset::encode(const std::vector<MushroomRecord>& records) {
  if (records.empty()) throw DataError("mushroom: no records to encode");
  const std::size_t num_features = records.front().features.size();
  for (const auto& r : records)
    if (r.features.size() != num_features)
      throw DataError("mushroom: records have inconsistent feature counts");

  EncodedDataset ds;
  ds.vocab_.resize(num_features);
  for (std::size_t f = 0; f < num_features; ++f) {
    std::set<char> codes;
    for (const auto& r : records) codes.insert(r.features[f]);
    ds.vocab_[f].assign(codes.begin(), codes.end());
  }
  ds.offsets_.resize(num_features + 1);
  ds.offsets_[0] = 0;
  for (std::size_t f = 0; f < num_features; ++f)
    ds.offsets_[f + 1] = ds.offsets_[f] + ds.vocab_[f].size();

  ds.contexts_ = Matrix(records.size(), ds.offsets_.back());
  ds.edible_.resize(records.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    ds.edible_[r] = records[r].edible;
    for (std::size_t f = 0; f < num_features; ++f) {
      const auto& vocab = ds.vocab_[f];
      const auto it = std::lower_bound(vocab.begin(), vocab.end(), records[r].features[f]);
      ds.contexts_(r, ds.offsets_[f] + static_cast<std::size_t>(it - vocab.begin())) = 1.0;
    }
  }
  return ds;
}

std::size_t EncodedDataset::edible_count() const {
  return static_cast<std::size_t>(std::count(edible_.begin(), edible_.end(), true));
}

std::vector<char> EncodedDataset::decode_row(std::size_t row) const {
  std::vector<char> codes(vocab_.size(), '?');
  for (std::size_t f = 0; f < vocab_.size(); ++f) {
    for (std::size_t k = 0; k < vocab_[f].size(); ++k) {
      if (contexts_(row, offsets_[f] + k) != 0.0) {
        codes[f] = vocab_[f][k];
        break;
      }
    }
  }
  return codes;
}

EncodedDataset load_mushroom_dataset(std::istream& in) {
  return EncodedDataset::encode(parse_mushroom_csv(in));
}

EncodedDataset load_mushroom_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("mushroom: cannot open dataset file: " + path.string());
  return load_mushroom_dataset(in);
}

MushroomEnv::MushroomEnv(std::shared_ptr<const EncodedDataset> data, double decline_p)
    : data_(std::move(data)), decline_p_(decline_p) {
  if (!data_ || data_->rows() == 0) throw DataError("mushroom: empty dataset");
  if (!(decline_p_ >= 0.0 && decline_p_ <= 1.0))
    throw std::invalid_argument("mushroom: decline probability outside [0,1]");
}

EnvStep MushroomEnv::step(Rng& rng) const {
  const std::size_t row = rng.uniform_index(data_->rows());
  EnvStep s;
  s.context.assign(data_->contexts().row(row).begin(), data_->contexts().row(row).end());
  const bool edible = data_->edible(row);
  s.expected_reward = {edible ? 1.0 : 0.0, decline_p_};
  s.realized_reward = {edible ? 1.0 : 0.0, rng.bernoulli(decline_p_) ? 1.0 : 0.0};
  return s;
}

}  // namespace bandit
