#include "ilac/hdc/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ilac/error.hpp"
#include "ilac/hdc/kernels.hpp"
#include "ilac/rng.hpp"

namespace ilac::hdc {

namespace {

void require_same_dims(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw InvalidArgument(std::string(op) + ": dimension mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

double norm(std::span<const std::int64_t> v) {
  return std::sqrt(static_cast<double>(kernels::parallel::dot(v, v)));
}

}  // namespace

Hypervector random_hv(std::uint64_t seed, std::size_t dims) {
  if (dims == 0) throw InvalidArgument("random_hv: dims must be positive");
  std::vector<std::int8_t> v(dims);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < dims; ++i) {
    if (i % 64 == 0) word = stream_word(seed, i / 64);
    v[i] = ((word >> (i % 64)) & 1U) != 0 ? 1 : -1;
  }
  return make_unchecked(std::move(v));
}

Hypervector negate(const Hypervector& a) {
  std::vector<std::int8_t> v(a.values().begin(), a.values().end());
  for (auto& x : v) x = static_cast<std::int8_t>(-x);
  return make_unchecked(std::move(v));
}

AccumulatorVector negate(const AccumulatorVector& a) {
  AccumulatorVector out = a;
  out *= -1;
  return out;
}

Hypervector bind(const Hypervector& a, const Hypervector& b) {
  require_same_dims(a.dims(), b.dims(), "bind");
  std::vector<std::int8_t> v(a.dims());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<std::int8_t>(a[i] * b[i]);
  return make_unchecked(std::move(v));
}

AccumulatorVector bind(const Hypervector& key, const AccumulatorVector& x) {
  require_same_dims(key.dims(), x.dims(), "bind");
  std::vector<std::int64_t> v(x.dims());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = key[i] * x[i];
  return AccumulatorVector(std::move(v));
}

AccumulatorVector bundle(std::span<const AccumulatorVector> operands) {
  if (operands.empty()) throw InvalidArgument("bundle: empty operand list");
  AccumulatorVector out(operands.front().dims());
  for (const auto& op : operands) {
    require_same_dims(out.dims(), op.dims(), "bundle");
    kernels::parallel::add(out.mutable_values(), op.values());
  }
  return out;
}

Hypervector permute(const Hypervector& a, std::int64_t shift) {
  const auto n = static_cast<std::int64_t>(a.dims());
  const auto s = static_cast<std::size_t>(((shift % n) + n) % n);
  std::vector<std::int8_t> v(a.dims());
  for (std::size_t i = 0; i < v.size(); ++i) v[(i + s) % v.size()] = a[i];
  return make_unchecked(std::move(v));
}

double cosine_similarity(const AccumulatorVector& a, const AccumulatorVector& b) {
  require_same_dims(a.dims(), b.dims(), "cosine_similarity");
  const double na = norm(a.values());
  const double nb = norm(b.values());
  if (na == 0.0 || nb == 0.0) throw UndefinedSimilarity("cosine_similarity: zero vector");
  const double c =
      static_cast<double>(kernels::parallel::dot(a.values(), b.values())) / (na * nb);
  // Rounding can push |c| a hair past 1 for parallel vectors.
  return std::clamp(c, -1.0, 1.0);
}

double cosine_similarity(const Hypervector& a, const Hypervector& b) {
  return cosine_similarity(AccumulatorVector(a), AccumulatorVector(b));
}

double hamming_similarity(const Hypervector& a, const Hypervector& b) {
  require_same_dims(a.dims(), b.dims(), "hamming_similarity");
  const auto diff = kernels::parallel::mismatches(a.values(), b.values());
  return 1.0 - static_cast<double>(diff) / static_cast<double>(a.dims());
}

Hypervector sign_quantize(const AccumulatorVector& a) {
  std::vector<std::int8_t> v(a.dims());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] < 0 ? -1 : 1;
  return make_unchecked(std::move(v));
}

}  // namespace ilac::hdc
