#pragma once

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <span>
#include <vector>

#include "ilac/hdc/kernels.hpp"

namespace ilac::hdc::kernels::detail {

// One Data HV row: out += sum_i f[i] * base[i].
// When sum_i |f[i]| fits in int32 the sum is formed in a 32-bit scratch row
// (vectorises well) and widened once; otherwise it goes straight to int64.
// Both paths are exact, so the result is identical either way.
inline void encode_row(Int8Rows base, std::span<const std::int64_t> f,
                       std::span<std::int64_t> out, std::vector<std::int32_t>& narrow) {
  std::int64_t bound = 0;
  bool fits = true;
  for (auto v : f) {
    bound += std::llabs(v);
    if (bound > std::numeric_limits<std::int32_t>::max()) {
      fits = false;
      break;
    }
  }
  const std::size_t cols = base.cols;
  if (fits) {
    narrow.assign(cols, 0);
    std::int32_t* acc = narrow.data();
    for (std::size_t i = 0; i < base.rows; ++i) {
      const auto s = static_cast<std::int32_t>(f[i]);
      if (s == 0) continue;
      const std::int8_t* hv = base.data.data() + i * cols;
      for (std::size_t d = 0; d < cols; ++d) acc[d] += s * hv[d];
    }
    for (std::size_t d = 0; d < cols; ++d) out[d] += acc[d];
  } else {
    for (std::size_t i = 0; i < base.rows; ++i) {
      const std::int64_t s = f[i];
      const std::int8_t* hv = base.data.data() + i * cols;
      for (std::size_t d = 0; d < cols; ++d) out[d] += s * hv[d];
    }
  }
}

}  // namespace ilac::hdc::kernels::detail
