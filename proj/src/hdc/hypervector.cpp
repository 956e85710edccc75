#include "ilac/hdc/hypervector.hpp"

#include <algorithm>
#include <string>

#include "ilac/error.hpp"
#include "ilac/hdc/kernels.hpp"

namespace ilac::hdc {

Hypervector::Hypervector(std::vector<std::int8_t> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidArgument("hypervector dims must be positive");
  const auto bad = std::find_if(values_.begin(), values_.end(),
                                [](std::int8_t v) { return v != 1 && v != -1; });
  if (bad != values_.end()) {
    throw InvalidArgument("hypervector element " + std::to_string(bad - values_.begin()) +
                          " is not +1/-1");
  }
}

Hypervector Hypervector::ones(std::size_t dims) {
  if (dims == 0) throw InvalidArgument("hypervector dims must be positive");
  return Hypervector(Unchecked{}, std::vector<std::int8_t>(dims, 1));
}

Hypervector make_unchecked(std::vector<std::int8_t> values) {
  return Hypervector(Hypervector::Unchecked{}, std::move(values));
}

AccumulatorVector::AccumulatorVector(std::size_t dims) : values_(dims, 0) {
  if (dims == 0) throw InvalidArgument("accumulator dims must be positive");
}

AccumulatorVector::AccumulatorVector(std::vector<std::int64_t> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw InvalidArgument("accumulator dims must be positive");
}

AccumulatorVector::AccumulatorVector(const Hypervector& hv)
    : values_(hv.values().begin(), hv.values().end()) {}

bool AccumulatorVector::is_zero() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](std::int64_t v) { return v == 0; });
}

AccumulatorVector& AccumulatorVector::operator+=(const AccumulatorVector& other) {
  if (other.dims() != dims()) throw InvalidArgument("accumulator dimension mismatch");
  kernels::parallel::add(values_, other.values_);
  return *this;
}

AccumulatorVector& AccumulatorVector::operator*=(std::int64_t scale) noexcept {
  for (auto& v : values_) v *= scale;
  return *this;
}

}  // namespace ilac::hdc
