#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ilac/hdc/hypervector.hpp"

namespace ilac::hdc {

// n base hypervectors regenerated from (seed, dims, count).
// Vector i is random_hv(derive_key(seed, "item", i), dims).
class ItemMemory {
 public:
  ItemMemory(std::uint64_t seed, std::size_t dims, std::size_t count);

  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t dims() const noexcept { return dims_; }
  std::size_t count() const noexcept { return count_; }

  // Row i as a view into the packed row-major store.
  std::span<const std::int8_t> row(std::size_t i) const;
  Hypervector operator[](std::size_t i) const;
  std::span<const std::int8_t> packed() const noexcept { return rows_; }

 private:
  std::uint64_t seed_;
  std::size_t dims_;
  std::size_t count_;
  std::vector<std::int8_t> rows_;
};

// Fixed-point quantisation of real features: q = clamp(round(f * scale), -limit, limit).
// round() is round-half-away-from-zero, which is exact and platform independent.
struct FeatureQuantizer {
  double scale = 16.0;
  std::int64_t limit = 127;

  std::int64_t quantize(double f) const noexcept;
  std::vector<std::int64_t> quantize(std::span<const double> features) const;
};

// Data HV = sum_i f_i * B_i over integer (already quantised) features.
// Throws InvalidArgument when the feature count differs from base.count().
AccumulatorVector encode_record(std::span<const std::int64_t> features, const ItemMemory& base);
AccumulatorVector encode_record(std::span<const double> features, const ItemMemory& base,
                                const FeatureQuantizer& quantizer);

// HV = Data HV + {Meta HV, 0, ..., 0}. Throws InvalidArgument if meta.dims() > data.dims().
AccumulatorVector inject_metadata(const AccumulatorVector& data_hv,
                                  const AccumulatorVector& meta_hv);

// Trained HDC model: one integer class vector per class plus per-class sample counts.
class AssociativeMemory {
 public:
  AssociativeMemory(std::size_t classes, std::size_t dims);
  AssociativeMemory(std::vector<AccumulatorVector> class_vectors,
                    std::vector<std::uint64_t> sample_counts);

  std::size_t classes() const noexcept { return class_vectors_.size(); }
  std::size_t dims() const noexcept { return dims_; }
  const AccumulatorVector& class_vector(std::size_t k) const { return class_vectors_.at(k); }
  std::uint64_t sample_count(std::size_t k) const { return sample_counts_.at(k); }
  const std::vector<AccumulatorVector>& class_vectors() const noexcept { return class_vectors_; }
  const std::vector<std::uint64_t>& sample_counts() const noexcept { return sample_counts_; }

  void add(const AccumulatorVector& hv, std::size_t label);

  bool operator==(const AssociativeMemory&) const = default;

 private:
  std::size_t dims_;
  std::vector<AccumulatorVector> class_vectors_;
  std::vector<std::uint64_t> sample_counts_;
};

struct LabeledHv {
  AccumulatorVector hv;
  std::size_t label;
};

// AM_k = sum of every sample labelled k. Throws InvalidArgument on classes == 0,
// a label >= classes, or mixed dims.
AssociativeMemory train_am(std::span<const LabeledHv> samples, std::size_t classes);
AssociativeMemory train_am(std::span<const AccumulatorVector> hvs,
                           std::span<const std::size_t> labels, std::size_t classes);

struct Classification {
  std::size_t label = 0;
  std::vector<double> scores;  // -infinity for classes with an all-zero vector
};

// Cosine argmax; ties go to the lowest class index.
// Throws NoTrainedClasses if every class vector is zero, UndefinedSimilarity if the query is.
Classification classify(const AccumulatorVector& query, const AssociativeMemory& am);

// Batched labels only; same decision rule as classify().
std::vector<std::size_t> classify_batch(std::span<const AccumulatorVector> queries,
                                        const AssociativeMemory& am);

// Sign-quantised model for the binarised mode (Hamming similarity, 1 bit per element).
class BinaryAssociativeMemory {
 public:
  explicit BinaryAssociativeMemory(const AssociativeMemory& am);
  BinaryAssociativeMemory(std::vector<Hypervector> class_vectors,
                          std::vector<std::uint64_t> sample_counts);

  std::size_t classes() const noexcept { return class_vectors_.size(); }
  std::size_t dims() const noexcept { return class_vectors_.front().dims(); }
  const Hypervector& class_vector(std::size_t k) const { return class_vectors_.at(k); }
  std::uint64_t sample_count(std::size_t k) const { return sample_counts_.at(k); }
  const std::vector<std::uint64_t>& sample_counts() const noexcept { return sample_counts_; }

  bool operator==(const BinaryAssociativeMemory&) const = default;

 private:
  std::vector<Hypervector> class_vectors_;
  std::vector<std::uint64_t> sample_counts_;
};

// Hamming argmax over classes with at least one sample; ties to the lowest index.
Classification classify(const Hypervector& query, const BinaryAssociativeMemory& am);

}  // namespace ilac::hdc
