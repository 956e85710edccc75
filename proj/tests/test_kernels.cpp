#include <gtest/gtest.h>

#include <vector>

#include "ilac/hdc/kernels.hpp"
#include "ilac/rng.hpp"

using namespace ilac;
namespace k = ilac::hdc::kernels;

namespace {

std::vector<std::int8_t> bipolar(std::size_t n, std::uint64_t seed) {
  CounterRng r(seed);
  std::vector<std::int8_t> v(n);
  for (auto& x : v) x = (r.next_u64() & 1) ? 1 : -1;
  return v;
}

std::vector<std::int64_t> ints(std::size_t n, std::uint64_t seed, std::int64_t span) {
  CounterRng r(seed);
  std::vector<std::int64_t> v(n);
  for (auto& x : v) x = static_cast<std::int64_t>(r.below(2 * span + 1)) - span;
  return v;
}

}  // namespace

class KernelSizes : public ::testing::TestWithParam<std::size_t> {};

TEST_P(KernelSizes, ParallelMatchesSerial) {
  const std::size_t n = GetParam();
  const auto hv = bipolar(n, 1);
  const auto a = ints(n, 2, 1000), b = ints(n, 3, 1000);

  auto s = a, p = a;
  k::serial::axpy(s, hv, -37);
  k::parallel::axpy(p, hv, -37);
  EXPECT_EQ(s, p);

  s = a;
  p = a;
  k::serial::add(s, b);
  k::parallel::add(p, b);
  EXPECT_EQ(s, p);

  EXPECT_EQ(k::serial::dot(a, b), k::parallel::dot(a, b));
  const auto hv2 = bipolar(n, 4);
  EXPECT_EQ(k::serial::mismatches(hv, hv2), k::parallel::mismatches(hv, hv2));
}

INSTANTIATE_TEST_SUITE_P(Sizes, KernelSizes,
                         ::testing::Values(1, 7, 64, 1000, 10000, 40000, 100003));

TEST(Kernels, SerialAgainstHandLoops) {
  const std::vector<std::int64_t> a{1, -2, 3}, b{4, 5, -6};
  EXPECT_EQ(k::serial::dot(a, b), 4 - 10 - 18);
  std::vector<std::int64_t> acc{0, 0, 0};
  const std::vector<std::int8_t> hv{1, -1, 1};
  k::serial::axpy(acc, hv, 3);
  EXPECT_EQ(acc, (std::vector<std::int64_t>{3, -3, 3}));
  EXPECT_EQ(k::serial::mismatches(hv, std::vector<std::int8_t>{1, 1, -1}), 2u);
}

TEST(Kernels, EncodeBatchParallelMatchesSerial) {
  const std::size_t dims = 2048, features = 33, rows = 57;
  const auto base = bipolar(dims * features, 9);
  for (std::int64_t span : {127LL, 1LL << 40}) {
    const auto f = ints(rows * features, 10, span);
    std::vector<std::int64_t> s(rows * dims), p(rows * dims);
    k::serial::encode_batch({base, features, dims}, {f, rows, features}, {s, rows, dims});
    k::parallel::encode_batch({base, features, dims}, {f, rows, features}, {p, rows, dims});
    EXPECT_EQ(s, p);
    // Row 0, column 5 by hand.
    std::int64_t want = 0;
    for (std::size_t i = 0; i < features; ++i) want += f[i] * base[i * dims + 5];
    EXPECT_EQ(s[5], want);
  }
}

TEST(Kernels, DotBatchParallelMatchesSerial) {
  const std::size_t dims = 3000, q = 41, c = 13;
  const auto queries = ints(q * dims, 11, 500), classes = ints(c * dims, 12, 5000);
  std::vector<std::int64_t> s(q * c), p(q * c);
  k::serial::dot_batch({queries, q, dims}, {classes, c, dims}, s);
  k::parallel::dot_batch({queries, q, dims}, {classes, c, dims}, p);
  EXPECT_EQ(s, p);
  std::int64_t want = 0;
  for (std::size_t i = 0; i < dims; ++i) want += queries[2 * dims + i] * classes[3 * dims + i];
  EXPECT_EQ(s[2 * c + 3], want);
}
