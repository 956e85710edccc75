#include "ilac/hdc/encoder.hpp"

#include "ilac/error.hpp"
#include "ilac/hdc/kernels.hpp"
#include "ilac/rng.hpp"

namespace ilac::hdc {

Encoder::Encoder(const HdcConfig& config, std::size_t feature_dim,
                 std::vector<std::int64_t> metadata, std::uint64_t seed)
    : config_(config),
      base_(derive_key(seed, "base"), config.dims, feature_dim),
      meta_base_(derive_key(seed, "meta"), config.effective_meta_dims(), metadata.size()),
      metadata_(std::move(metadata)) {
  if (feature_dim == 0) throw InvalidArgument("Encoder: feature_dim must be positive");
  if (config_.effective_meta_dims() > config_.dims) {
    throw InvalidArgument("Encoder: metadata segment longer than the hypervector");
  }
  if (!metadata_.empty()) {
    const auto meta = encode_record(metadata_, meta_base_);
    meta_hv_.assign(meta.values().begin(), meta.values().end());
  }
}

AccumulatorVector Encoder::encode(std::span<const double> features) const {
  auto hv = encode_record(features, base_, config_.quantizer);
  if (!meta_hv_.empty()) hv = inject_metadata(hv, AccumulatorVector(meta_hv_));
  return hv;
}

std::vector<AccumulatorVector> Encoder::encode_batch(std::span<const double> features,
                                                     std::size_t rows) const {
  const std::size_t n = feature_dim();
  if (features.size() != rows * n) {
    throw InvalidArgument("Encoder::encode_batch: feature matrix is not rows x feature_dim");
  }
  std::vector<std::int64_t> q(features.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = config_.quantizer.quantize(features[i]);

  const std::size_t dims = config_.dims;
  std::vector<std::int64_t> flat(rows * dims, 0);
  if (!meta_hv_.empty()) {
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy(meta_hv_.begin(), meta_hv_.end(), flat.begin() + r * dims);
    }
  }
  kernels::parallel::encode_batch({base_.packed(), base_.count(), dims}, {q, rows, n},
                                  {flat, rows, dims});

  std::vector<AccumulatorVector> out;
  out.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    out.emplace_back(std::vector<std::int64_t>(flat.begin() + r * dims,
                                               flat.begin() + (r + 1) * dims));
  }
  return out;
}

}  // namespace ilac::hdc
