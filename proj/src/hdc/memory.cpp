#include "ilac/hdc/memory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ilac/error.hpp"
#include "ilac/hdc/kernels.hpp"
#include "ilac/hdc/ops.hpp"
#include "ilac/rng.hpp"

namespace ilac::hdc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Index of the largest score; first occurrence wins.
std::size_t argmax_lowest(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return best;
}

double cosine_from_parts(std::int64_t dot, double norm_a, double norm_b) {
  return std::clamp(static_cast<double>(dot) / (norm_a * norm_b), -1.0, 1.0);
}

}  // namespace

ItemMemory::ItemMemory(std::uint64_t seed, std::size_t dims, std::size_t count)
    : seed_(seed), dims_(dims), count_(count) {
  if (dims == 0) throw InvalidArgument("ItemMemory: dims must be positive");
  rows_.resize(dims * count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto hv = random_hv(derive_key(seed, "item", i), dims);
    std::copy(hv.values().begin(), hv.values().end(), rows_.begin() + i * dims);
  }
}

std::span<const std::int8_t> ItemMemory::row(std::size_t i) const {
  if (i >= count_) throw InvalidArgument("ItemMemory: index out of range");
  return std::span<const std::int8_t>(rows_).subspan(i * dims_, dims_);
}

Hypervector ItemMemory::operator[](std::size_t i) const {
  const auto r = row(i);
  return make_unchecked(std::vector<std::int8_t>(r.begin(), r.end()));
}

std::int64_t FeatureQuantizer::quantize(double f) const noexcept {
  const double scaled = std::round(f * scale);
  const auto lim = static_cast<double>(limit);
  return static_cast<std::int64_t>(std::clamp(scaled, -lim, lim));
}

std::vector<std::int64_t> FeatureQuantizer::quantize(std::span<const double> features) const {
  std::vector<std::int64_t> q(features.size());
  std::transform(features.begin(), features.end(), q.begin(),
                 [this](double f) { return quantize(f); });
  return q;
}

AccumulatorVector encode_record(std::span<const std::int64_t> features, const ItemMemory& base) {
  if (features.size() != base.count()) {
    throw InvalidArgument("encode_record: " + std::to_string(features.size()) +
                          " features for " + std::to_string(base.count()) + " base vectors");
  }
  AccumulatorVector out(base.dims());
  kernels::parallel::encode_batch({base.packed(), base.count(), base.dims()},
                                  {features, 1, features.size()},
                                  {out.mutable_values(), 1, base.dims()});
  return out;
}

AccumulatorVector encode_record(std::span<const double> features, const ItemMemory& base,
                                const FeatureQuantizer& quantizer) {
  const auto q = quantizer.quantize(features);
  return encode_record(q, base);
}

AccumulatorVector inject_metadata(const AccumulatorVector& data_hv,
                                  const AccumulatorVector& meta_hv) {
  if (meta_hv.dims() > data_hv.dims()) {
    throw InvalidArgument("inject_metadata: metadata segment longer than the data HV");
  }
  AccumulatorVector out = data_hv;
  kernels::parallel::add(out.mutable_values().first(meta_hv.dims()), meta_hv.values());
  return out;
}

AssociativeMemory::AssociativeMemory(std::size_t classes, std::size_t dims)
    : dims_(dims), class_vectors_(classes, AccumulatorVector(dims)), sample_counts_(classes, 0) {
  if (classes == 0) throw InvalidArgument("AssociativeMemory: need at least one class");
}

AssociativeMemory::AssociativeMemory(std::vector<AccumulatorVector> class_vectors,
                                     std::vector<std::uint64_t> sample_counts)
    : dims_(0), class_vectors_(std::move(class_vectors)), sample_counts_(std::move(sample_counts)) {
  if (class_vectors_.empty()) throw InvalidArgument("AssociativeMemory: need at least one class");
  if (sample_counts_.size() != class_vectors_.size()) {
    throw InvalidArgument("AssociativeMemory: one sample count per class required");
  }
  dims_ = class_vectors_.front().dims();
  for (const auto& v : class_vectors_) {
    if (v.dims() != dims_) throw InvalidArgument("AssociativeMemory: class dims differ");
  }
}

void AssociativeMemory::add(const AccumulatorVector& hv, std::size_t label) {
  if (label >= classes()) {
    throw InvalidArgument("train_am: label " + std::to_string(label) + " out of range for " +
                          std::to_string(classes()) + " classes");
  }
  if (hv.dims() != dims_) throw InvalidArgument("train_am: sample dimension mismatch");
  class_vectors_[label] += hv;
  ++sample_counts_[label];
}

AssociativeMemory train_am(std::span<const LabeledHv> samples, std::size_t classes) {
  if (classes == 0) throw InvalidArgument("train_am: classes must be positive");
  if (samples.empty()) throw InvalidArgument("train_am: no samples");
  AssociativeMemory am(classes, samples.front().hv.dims());
  for (const auto& s : samples) am.add(s.hv, s.label);
  return am;
}

AssociativeMemory train_am(std::span<const AccumulatorVector> hvs,
                           std::span<const std::size_t> labels, std::size_t classes) {
  if (classes == 0) throw InvalidArgument("train_am: classes must be positive");
  if (hvs.size() != labels.size()) throw InvalidArgument("train_am: one label per sample");
  if (hvs.empty()) throw InvalidArgument("train_am: no samples");
  AssociativeMemory am(classes, hvs.front().dims());
  for (std::size_t i = 0; i < hvs.size(); ++i) am.add(hvs[i], labels[i]);
  return am;
}

Classification classify(const AccumulatorVector& query, const AssociativeMemory& am) {
  if (query.dims() != am.dims()) throw InvalidArgument("classify: dimension mismatch");
  const double qn = std::sqrt(static_cast<double>(kernels::parallel::dot(query.values(), query.values())));
  if (qn == 0.0) throw UndefinedSimilarity("classify: zero query vector");
  Classification out;
  out.scores.assign(am.classes(), kNegInf);
  bool any = false;
  for (std::size_t k = 0; k < am.classes(); ++k) {
    const auto cv = am.class_vector(k).values();
    const auto cc = kernels::parallel::dot(cv, cv);
    if (cc == 0) continue;
    any = true;
    out.scores[k] = cosine_from_parts(kernels::parallel::dot(query.values(), cv), qn,
                                      std::sqrt(static_cast<double>(cc)));
  }
  if (!any) throw NoTrainedClasses("classify: every class vector is zero");
  out.label = argmax_lowest(out.scores);
  return out;
}

std::vector<std::size_t> classify_batch(std::span<const AccumulatorVector> queries,
                                        const AssociativeMemory& am) {
  const std::size_t dims = am.dims();
  const std::size_t k_count = am.classes();
  std::vector<std::int64_t> classes(k_count * dims);
  std::vector<double> class_norm(k_count, 0.0);
  bool any = false;
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto cv = am.class_vector(k).values();
    std::copy(cv.begin(), cv.end(), classes.begin() + k * dims);
    class_norm[k] = std::sqrt(static_cast<double>(kernels::parallel::dot(cv, cv)));
    any = any || class_norm[k] != 0.0;
  }
  if (!any) throw NoTrainedClasses("classify: every class vector is zero");

  std::vector<std::int64_t> flat(queries.size() * dims);
  std::vector<double> query_norm(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    if (queries[q].dims() != dims) throw InvalidArgument("classify: dimension mismatch");
    const auto qv = queries[q].values();
    std::copy(qv.begin(), qv.end(), flat.begin() + q * dims);
    query_norm[q] = std::sqrt(static_cast<double>(kernels::serial::dot(qv, qv)));
    if (query_norm[q] == 0.0) throw UndefinedSimilarity("classify: zero query vector");
  }

  std::vector<std::int64_t> dots(queries.size() * k_count);
  kernels::parallel::dot_batch({flat, queries.size(), dims}, {classes, k_count, dims}, dots);

  std::vector<std::size_t> labels(queries.size());
  std::vector<double> scores(k_count);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    for (std::size_t k = 0; k < k_count; ++k) {
      scores[k] = class_norm[k] == 0.0
                      ? kNegInf
                      : cosine_from_parts(dots[q * k_count + k], query_norm[q], class_norm[k]);
    }
    labels[q] = argmax_lowest(scores);
  }
  return labels;
}

BinaryAssociativeMemory::BinaryAssociativeMemory(const AssociativeMemory& am)
    : sample_counts_(am.sample_counts()) {
  class_vectors_.reserve(am.classes());
  for (const auto& v : am.class_vectors()) class_vectors_.push_back(sign_quantize(v));
}

BinaryAssociativeMemory::BinaryAssociativeMemory(std::vector<Hypervector> class_vectors,
                                                 std::vector<std::uint64_t> sample_counts)
    : class_vectors_(std::move(class_vectors)), sample_counts_(std::move(sample_counts)) {
  if (class_vectors_.empty()) throw InvalidArgument("BinaryAssociativeMemory: no classes");
  if (sample_counts_.size() != class_vectors_.size()) {
    throw InvalidArgument("BinaryAssociativeMemory: one sample count per class required");
  }
  for (const auto& v : class_vectors_) {
    if (v.dims() != class_vectors_.front().dims()) {
      throw InvalidArgument("BinaryAssociativeMemory: class dims differ");
    }
  }
}

Classification classify(const Hypervector& query, const BinaryAssociativeMemory& am) {
  if (query.dims() != am.dims()) throw InvalidArgument("classify: dimension mismatch");
  Classification out;
  out.scores.assign(am.classes(), kNegInf);
  bool any = false;
  for (std::size_t k = 0; k < am.classes(); ++k) {
    if (am.sample_count(k) == 0) continue;
    any = true;
    out.scores[k] = hamming_similarity(query, am.class_vector(k));
  }
  if (!any) throw NoTrainedClasses("classify: no class has samples");
  out.label = argmax_lowest(out.scores);
  return out;
}

}  // namespace ilac::hdc
