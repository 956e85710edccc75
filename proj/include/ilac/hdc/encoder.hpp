#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ilac/hdc/memory.hpp"

namespace ilac::hdc {

struct HdcConfig {
  std::size_t dims = 10000;
  // Metadata segment length d; 0 selects dims / 100.
  std::size_t meta_dims = 0;
  FeatureQuantizer quantizer{};
  // Sign-quantise AMs and queries and classify by Hamming similarity.
  bool binarize = false;

  std::size_t effective_meta_dims() const noexcept {
    return meta_dims != 0 ? meta_dims : (dims / 100 > 0 ? dims / 100 : 1);
  }
};

// Record encoder: Data HV from a base item memory plus an optional Meta HV
// injected into the leading segment.
class Encoder {
 public:
  // `metadata` are the integer codes e_1..e_l (data type, bit depth, ...) shared by
  // every record this encoder sees; an empty list disables injection.
  Encoder(const HdcConfig& config, std::size_t feature_dim, std::vector<std::int64_t> metadata,
          std::uint64_t seed);

  const HdcConfig& config() const noexcept { return config_; }
  std::size_t feature_dim() const noexcept { return base_.count(); }
  const ItemMemory& base() const noexcept { return base_; }

  AccumulatorVector encode(std::span<const double> features) const;
  // One HV per row of a row-major feature matrix.
  std::vector<AccumulatorVector> encode_batch(std::span<const double> features,
                                              std::size_t rows) const;

 private:
  HdcConfig config_;
  ItemMemory base_;
  ItemMemory meta_base_;
  std::vector<std::int64_t> metadata_;
  std::vector<std::int64_t> meta_hv_;  // empty when metadata is empty
};

}  // namespace ilac::hdc
