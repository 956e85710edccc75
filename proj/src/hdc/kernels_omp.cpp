#include <omp.h>

#include <cassert>
#include <vector>

#include "ilac/hdc/kernels.hpp"
#include "kernels_common.hpp"

namespace ilac::hdc::kernels::parallel {

namespace {
// Below this many elements the fork/join costs more than the loop.
constexpr std::size_t kMinElements = 1 << 15;
}  // namespace

void axpy(std::span<std::int64_t> acc, std::span<const std::int8_t> hv, std::int64_t scale) {
  assert(acc.size() == hv.size());
  const auto n = static_cast<std::ptrdiff_t>(acc.size());
#pragma omp parallel for schedule(static) if (acc.size() >= kMinElements)
  for (std::ptrdiff_t d = 0; d < n; ++d) acc[d] += scale * hv[d];
}

void add(std::span<std::int64_t> acc, std::span<const std::int64_t> x) {
  assert(acc.size() == x.size());
  const auto n = static_cast<std::ptrdiff_t>(acc.size());
#pragma omp parallel for schedule(static) if (acc.size() >= kMinElements)
  for (std::ptrdiff_t d = 0; d < n; ++d) acc[d] += x[d];
}

std::int64_t dot(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  assert(a.size() == b.size());
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  std::int64_t s = 0;
#pragma omp parallel for schedule(static) reduction(+ : s) if (a.size() >= kMinElements)
  for (std::ptrdiff_t d = 0; d < n; ++d) s += a[d] * b[d];
  return s;
}

std::size_t mismatches(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
  assert(a.size() == b.size());
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  std::size_t m = 0;
#pragma omp parallel for schedule(static) reduction(+ : m) if (a.size() >= kMinElements)
  for (std::ptrdiff_t d = 0; d < n; ++d) m += static_cast<std::size_t>(a[d] != b[d]);
  return m;
}

void encode_batch(Int8Rows base, Int64Rows features, MutInt64Rows out) {
  assert(features.cols == base.rows && out.cols == base.cols && out.rows == features.rows);
  const auto rows = static_cast<std::ptrdiff_t>(features.rows);
#pragma omp parallel if (features.rows > 1)
  {
    std::vector<std::int32_t> narrow(base.cols);
#pragma omp for schedule(static)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
      const auto ur = static_cast<std::size_t>(r);
      detail::encode_row(base, features.data.subspan(ur * features.cols, features.cols),
                         out.data.subspan(ur * out.cols, out.cols), narrow);
    }
  }
}

void dot_batch(Int64Rows queries, Int64Rows classes, std::span<std::int64_t> scores) {
  assert(queries.cols == classes.cols && scores.size() == queries.rows * classes.rows);
  const auto rows = static_cast<std::ptrdiff_t>(queries.rows);
#pragma omp parallel for schedule(static) if (queries.rows > 1)
  for (std::ptrdiff_t q = 0; q < rows; ++q) {
    const auto uq = static_cast<std::size_t>(q);
    const auto qv = queries.data.subspan(uq * queries.cols, queries.cols);
    for (std::size_t k = 0; k < classes.rows; ++k) {
      const auto cv = classes.data.subspan(k * classes.cols, classes.cols);
      std::int64_t s = 0;
      for (std::size_t d = 0; d < qv.size(); ++d) s += qv[d] * cv[d];
      scores[uq * classes.rows + k] = s;
    }
  }
}

}  // namespace ilac::hdc::kernels::parallel
