#pragma once

// Raw element kernels behind the hypervector operations.
//
// Two implementations with identical signatures and bit-identical results:
//   serial::   plain loops, the reference used by the tests.
//   parallel:: OpenMP versions. Reductions are over int64 so the result does
//              not depend on thread count or scheduling.
//
// The public operations in ops.hpp / memory.hpp call parallel::. Kernels that
// already sit inside an enclosing parallel region run their loop serially.

#include <cstddef>
#include <cstdint>
#include <span>

namespace ilac::hdc::kernels {

// Row-major matrix views used by the batch kernels.
struct Int8Rows {
  std::span<const std::int8_t> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

struct Int64Rows {
  std::span<const std::int64_t> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

struct MutInt64Rows {
  std::span<std::int64_t> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

namespace serial {

// acc[d] += scale * hv[d]
void axpy(std::span<std::int64_t> acc, std::span<const std::int8_t> hv, std::int64_t scale);
// acc[d] += x[d]
void add(std::span<std::int64_t> acc, std::span<const std::int64_t> x);
std::int64_t dot(std::span<const std::int64_t> a, std::span<const std::int64_t> b);
std::size_t mismatches(std::span<const std::int8_t> a, std::span<const std::int8_t> b);
// out[r] = sum_i features[r][i] * base[i]; out must be zero-initialised or hold a
// prior sum to extend.
void encode_batch(Int8Rows base, Int64Rows features, MutInt64Rows out);
// scores[q][k] = dot(queries[q], classes[k]).
void dot_batch(Int64Rows queries, Int64Rows classes, std::span<std::int64_t> scores);

}  // namespace serial

namespace parallel {

void axpy(std::span<std::int64_t> acc, std::span<const std::int8_t> hv, std::int64_t scale);
void add(std::span<std::int64_t> acc, std::span<const std::int64_t> x);
std::int64_t dot(std::span<const std::int64_t> a, std::span<const std::int64_t> b);
std::size_t mismatches(std::span<const std::int8_t> a, std::span<const std::int8_t> b);
void encode_batch(Int8Rows base, Int64Rows features, MutInt64Rows out);
void dot_batch(Int64Rows queries, Int64Rows classes, std::span<std::int64_t> scores);

}  // namespace parallel

}  // namespace ilac::hdc::kernels
