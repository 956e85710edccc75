#include <cassert>
#include <cstdlib>
#include <limits>
#include <vector>

#include "ilac/hdc/kernels.hpp"
#include "kernels_common.hpp"

namespace ilac::hdc::kernels::serial {

void axpy(std::span<std::int64_t> acc, std::span<const std::int8_t> hv, std::int64_t scale) {
  assert(acc.size() == hv.size());
  for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += scale * hv[d];
}

void add(std::span<std::int64_t> acc, std::span<const std::int64_t> x) {
  assert(acc.size() == x.size());
  for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += x[d];
}

std::int64_t dot(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  assert(a.size() == b.size());
  std::int64_t s = 0;
  for (std::size_t d = 0; d < a.size(); ++d) s += a[d] * b[d];
  return s;
}

std::size_t mismatches(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
  assert(a.size() == b.size());
  std::size_t n = 0;
  for (std::size_t d = 0; d < a.size(); ++d) n += static_cast<std::size_t>(a[d] != b[d]);
  return n;
}

void encode_batch(Int8Rows base, Int64Rows features, MutInt64Rows out) {
  assert(features.cols == base.rows && out.cols == base.cols && out.rows == features.rows);
  std::vector<std::int32_t> narrow(base.cols);
  for (std::size_t r = 0; r < features.rows; ++r) {
    detail::encode_row(base, features.data.subspan(r * features.cols, features.cols),
                       out.data.subspan(r * out.cols, out.cols), narrow);
  }
}

void dot_batch(Int64Rows queries, Int64Rows classes, std::span<std::int64_t> scores) {
  assert(queries.cols == classes.cols && scores.size() == queries.rows * classes.rows);
  for (std::size_t q = 0; q < queries.rows; ++q) {
    const auto qv = queries.data.subspan(q * queries.cols, queries.cols);
    for (std::size_t k = 0; k < classes.rows; ++k) {
      scores[q * classes.rows + k] = dot(qv, classes.data.subspan(k * classes.cols, classes.cols));
    }
  }
}

}  // namespace ilac::hdc::kernels::serial
