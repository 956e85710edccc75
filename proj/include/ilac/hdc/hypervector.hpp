#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ilac::hdc {

// Dense bipolar hypervector: every element is exactly +1 or -1.
class Hypervector {
 public:
  // Throws InvalidArgument if `values` is empty or holds anything other than +1/-1.
  explicit Hypervector(std::vector<std::int8_t> values);

  static Hypervector ones(std::size_t dims);

  std::size_t dims() const noexcept { return values_.size(); }
  std::span<const std::int8_t> values() const noexcept { return values_; }
  std::int8_t operator[](std::size_t i) const noexcept { return values_[i]; }

  bool operator==(const Hypervector&) const = default;

 private:
  struct Unchecked {};
  Hypervector(Unchecked, std::vector<std::int8_t> values) : values_(std::move(values)) {}

  std::vector<std::int8_t> values_;

  friend Hypervector make_unchecked(std::vector<std::int8_t> values);
};

// Used by kernels that produce bipolar output by construction.
Hypervector make_unchecked(std::vector<std::int8_t> values);

// Signed integer accumulator of bundled hypervectors (Data HV, Meta HV, AM_k).
//
// Elements are int64. Dot products of two accumulators are computed exactly in
// int64 as well, which holds as long as sum_i |a_i * b_i| < 2^63; with 8-bit
// quantized features this leaves room for well over 10^6 bundled samples per
// class at D = 10^4.
class AccumulatorVector {
 public:
  // All-zero accumulator. Throws InvalidArgument if dims == 0.
  explicit AccumulatorVector(std::size_t dims);
  // Throws InvalidArgument if `values` is empty.
  explicit AccumulatorVector(std::vector<std::int64_t> values);
  // Widening copy of a bipolar vector.
  explicit AccumulatorVector(const Hypervector& hv);

  std::size_t dims() const noexcept { return values_.size(); }
  std::span<const std::int64_t> values() const noexcept { return values_; }
  std::span<std::int64_t> mutable_values() noexcept { return values_; }
  std::int64_t operator[](std::size_t i) const noexcept { return values_[i]; }

  bool is_zero() const noexcept;

  AccumulatorVector& operator+=(const AccumulatorVector& other);
  AccumulatorVector& operator*=(std::int64_t scale) noexcept;

  bool operator==(const AccumulatorVector&) const = default;

 private:
  std::vector<std::int64_t> values_;
};

}  // namespace ilac::hdc
