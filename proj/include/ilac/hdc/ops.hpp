#pragma once

#include <cstdint>
#include <span>

#include "ilac/hdc/hypervector.hpp"

namespace ilac::hdc {

// Element i is bit (i % 64) of stream word i / 64 under key `seed`: 1 -> +1, 0 -> -1.
// Throws InvalidArgument if dims == 0.
Hypervector random_hv(std::uint64_t seed, std::size_t dims);

Hypervector negate(const Hypervector& a);
AccumulatorVector negate(const AccumulatorVector& a);

// Element-wise product (bipolar XOR). Self-inverse, commutative, associative.
Hypervector bind(const Hypervector& a, const Hypervector& b);
// bind(c, x) on an accumulator: element-wise product with the key c.
AccumulatorVector bind(const Hypervector& key, const AccumulatorVector& x);

// Element-wise integer sum. Throws on an empty list or mismatched dims.
AccumulatorVector bundle(std::span<const AccumulatorVector> operands);

// Cyclic rotation: out[(i + shift) mod D] = a[i]. Negative shifts rotate left.
Hypervector permute(const Hypervector& a, std::int64_t shift);

// dot(a, b) / (|a| |b|). Throws UndefinedSimilarity if either vector is zero.
double cosine_similarity(const AccumulatorVector& a, const AccumulatorVector& b);
double cosine_similarity(const Hypervector& a, const Hypervector& b);

// 1 - (differing positions) / D.
double hamming_similarity(const Hypervector& a, const Hypervector& b);

// Sign quantisation; zero maps to +1.
Hypervector sign_quantize(const AccumulatorVector& a);

}  // namespace ilac::hdc
