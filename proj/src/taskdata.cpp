#include "ilac/taskdata.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "ilac/csv.hpp"
#include "ilac/error.hpp"
#include "ilac/rng.hpp"

namespace ilac::taskdata {

void TaskSpec::validate() const {
  if (classes < 2) throw InvalidArgument("TaskSpec: need at least 2 classes");
  if (feature_dim < 1) throw InvalidArgument("TaskSpec: feature_dim must be positive");
  if (samples_per_class < 1) throw InvalidArgument("TaskSpec: samples_per_class must be positive");
  if (!(separation > 0.0) || !std::isfinite(separation)) {
    throw InvalidArgument("TaskSpec: separation must be positive");
  }
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    throw InvalidArgument("TaskSpec: noise_std must be nonnegative");
  }
}

const char* to_string(Split s) noexcept {
  switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::all: break;
  }
  return "all";
}

std::vector<double> Dataset::feature_matrix() const {
  std::vector<double> m;
  m.reserve(records.size() * feature_dim);
  for (const auto& r : records) m.insert(m.end(), r.features.begin(), r.features.end());
  return m;
}

std::vector<std::size_t> Dataset::labels() const {
  std::vector<std::size_t> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.label);
  return out;
}

std::vector<std::vector<double>> class_centers(const TaskSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t k_count = spec.classes;
  const std::size_t n = spec.feature_dim;
  std::vector<std::vector<double>> centers(k_count, std::vector<double>(n, 0.0));

  if (n == 1) {
    // A 0-sphere has only two points; use an evenly spaced line in seeded order.
    CounterRng rng(derive_key(seed, "centers"));
    std::vector<std::size_t> slot(k_count);
    for (std::size_t k = 0; k < k_count; ++k) slot[k] = k;
    for (std::size_t i = k_count; i-- > 1;) std::swap(slot[i], slot[rng.below(i + 1)]);
    const double mid = 0.5 * static_cast<double>(k_count - 1);
    for (std::size_t k = 0; k < k_count; ++k) {
      centers[k][0] = (static_cast<double>(slot[k]) - mid) * spec.separation;
    }
    return centers;
  }

  CounterRng rng(derive_key(seed, "centers"));
  for (auto& c : centers) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& x : c) {
        x = rng.normal();
        norm2 += x * x;
      }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : c) x *= inv;
  }
  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < k_count; ++a) {
    for (std::size_t b = a + 1; b < k_count; ++b) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = centers[a][i] - centers[b][i];
        d2 += d * d;
      }
      min_dist = std::min(min_dist, std::sqrt(d2));
    }
  }
  if (!(min_dist > 0.0)) throw InvalidArgument("class_centers: coincident centre directions");
  const double radius = spec.separation / min_dist;
  for (auto& c : centers) {
    for (auto& x : c) x *= radius;
  }
  return centers;
}

Dataset generate(const TaskSpec& spec, std::uint64_t seed) {
  const auto centers = class_centers(spec, seed);
  Dataset data;
  data.task_id = spec.task_id;
  data.split = Split::all;
  data.classes = spec.classes;
  data.feature_dim = spec.feature_dim;
  data.records.reserve(spec.classes * spec.samples_per_class);
  for (std::size_t k = 0; k < spec.classes; ++k) {
    CounterRng rng(derive_key(seed, "samples", k));
    for (std::size_t s = 0; s < spec.samples_per_class; ++s) {
      Record r;
      r.label = k;
      r.features = centers[k];
      if (spec.noise_std > 0.0) {
        for (auto& x : r.features) x += spec.noise_std * rng.normal();
      }
      data.records.push_back(std::move(r));
    }
  }
  return data;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("split: train_fraction must lie in (0, 1)");
  }
  std::vector<std::vector<std::size_t>> by_class(data.classes);
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    const auto label = data.records[i].label;
    if (label >= data.classes) throw InvalidArgument("split: label out of range");
    by_class[label].push_back(i);
  }

  Dataset train{data.task_id, Split::train, data.classes, data.feature_dim, {}};
  Dataset valid{data.task_id, Split::validation, data.classes, data.feature_dim, {}};
  for (std::size_t k = 0; k < data.classes; ++k) {
    auto& idx = by_class[k];
    if (idx.size() < 2) {
      throw InvalidArgument("split: class " + std::to_string(k) + " has fewer than 2 samples");
    }
    CounterRng rng(derive_key(seed, "split", k));
    for (std::size_t i = idx.size(); i-- > 1;) std::swap(idx[i], idx[rng.below(i + 1)]);
    // The small slack keeps e.g. 0.7 * 10 from rounding up to 8.
    auto n_train = static_cast<std::size_t>(
        std::ceil(train_fraction * static_cast<double>(idx.size()) - 1e-9));
    n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      (i < n_train ? train : valid).records.push_back(data.records[idx[i]]);
    }
  }
  return {std::move(train), std::move(valid)};
}

void write_csv(std::ostream& out, const Dataset& data) {
  out << "task_id,split,label";
  for (std::size_t i = 0; i < data.feature_dim; ++i) out << ",f" << i;
  out << '\n';
  for (const auto& r : data.records) {
    out << data.task_id << ',' << to_string(data.split) << ',' << r.label;
    for (double f : r.features) out << ',' << csv::format_double(f);
    out << '\n';
  }
}

}  // namespace ilac::taskdata
