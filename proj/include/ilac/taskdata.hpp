#pragma once

// Seeded Gaussian-blob classification tasks that stand in for each client's local database.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace ilac::taskdata {

struct TaskSpec {
  int task_id = 0;
  std::size_t classes = 10;
  std::size_t feature_dim = 64;
  std::size_t samples_per_class = 50;
  // Minimum distance between any two class centres, in feature units.
  double separation = 6.0;
  double noise_std = 1.0;

  // Throws InvalidArgument unless classes >= 2, feature_dim >= 1,
  // samples_per_class >= 1, separation > 0 and noise_std >= 0.
  void validate() const;
};

enum class Split { all, train, validation };

const char* to_string(Split s) noexcept;

struct Record {
  std::vector<double> features;
  std::size_t label = 0;

  bool operator==(const Record&) const = default;
  auto operator<=>(const Record&) const = default;
};

struct Dataset {
  int task_id = 0;
  Split split = Split::all;
  std::size_t classes = 0;
  std::size_t feature_dim = 0;
  std::vector<Record> records;

  // Row-major copy of every feature vector (records.size() x feature_dim).
  std::vector<double> feature_matrix() const;
  std::vector<std::size_t> labels() const;

  bool operator==(const Dataset&) const = default;
};

// Class centres: directions drawn uniformly on the unit sphere, then scaled so the
// closest pair sits exactly `separation` apart. With feature_dim == 1 the centres
// are laid out on a line at spacing `separation` instead.
std::vector<std::vector<double>> class_centers(const TaskSpec& spec, std::uint64_t seed);

// classes * samples_per_class records, grouped by class in label order.
Dataset generate(const TaskSpec& spec, std::uint64_t seed);

// Stratified split: each class gives ceil(fraction * count) records to the train side
// (capped at count - 1 so validation is never empty). Throws InvalidArgument when a
// class has fewer than 2 records or fraction is outside (0, 1).
std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, std::uint64_t seed);

// CSV with header task_id,split,label,f0..f{n-1}; numbers in shortest round-trip form.
void write_csv(std::ostream& out, const Dataset& data);

}  // namespace ilac::taskdata
