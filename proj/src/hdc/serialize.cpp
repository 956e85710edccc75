#include "ilac/hdc/serialize.hpp"

#include <array>
#include <cstring>
#include <string>
#include <type_traits>
#include <istream>
#include <ostream>

#include "ilac/error.hpp"

namespace ilac::hdc {

namespace {

constexpr std::array<char, 4> kMagic{'H', 'D', 'C', 'M'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>(u & 0xFFU);
    u = static_cast<U>(u >> 8);
  }
  out.write(bytes, sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  using U = std::make_unsigned_t<T>;
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw InvalidArgument("read_am: truncated file");
  }
  U u = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) u = static_cast<U>((u << 8) | bytes[i]);
  return static_cast<T>(u);
}

void put_header(std::ostream& out, std::size_t classes, std::size_t dims, std::uint8_t bits) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(classes));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dims));
  put_le<std::uint8_t>(out, bits);
}

}  // namespace

void write_am(std::ostream& out, const AssociativeMemory& am) {
  put_header(out, am.classes(), am.dims(), 64);
  for (const auto& v : am.class_vectors()) {
    for (auto x : v.values()) put_le<std::int64_t>(out, x);
  }
  for (auto n : am.sample_counts()) put_le<std::uint64_t>(out, n);
}

void write_am(std::ostream& out, const BinaryAssociativeMemory& am) {
  put_header(out, am.classes(), am.dims(), 1);
  std::vector<char> row((am.dims() + 7) / 8);
  for (std::size_t k = 0; k < am.classes(); ++k) {
    std::fill(row.begin(), row.end(), 0);
    const auto& hv = am.class_vector(k);
    for (std::size_t i = 0; i < hv.dims(); ++i) {
      if (hv[i] > 0) row[i / 8] = static_cast<char>(row[i / 8] | (1 << (i % 8)));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  for (auto n : am.sample_counts()) put_le<std::uint64_t>(out, n);
}

std::variant<AssociativeMemory, BinaryAssociativeMemory> read_am(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw InvalidArgument("read_am: bad magic");
  }
  const auto version = get_le<std::uint16_t>(in);
  if (version != kVersion) throw InvalidArgument("read_am: unsupported version");
  const auto classes = get_le<std::uint32_t>(in);
  const auto dims = get_le<std::uint32_t>(in);
  const auto bits = get_le<std::uint8_t>(in);
  if (classes == 0 || dims == 0) throw InvalidArgument("read_am: empty model");

  auto read_counts = [&] {
    std::vector<std::uint64_t> counts(classes);
    for (auto& n : counts) n = get_le<std::uint64_t>(in);
    return counts;
  };

  if (bits == 64) {
    std::vector<AccumulatorVector> rows;
    rows.reserve(classes);
    for (std::uint32_t k = 0; k < classes; ++k) {
      std::vector<std::int64_t> v(dims);
      for (auto& x : v) x = get_le<std::int64_t>(in);
      rows.emplace_back(std::move(v));
    }
    return AssociativeMemory(std::move(rows), read_counts());
  }
  if (bits == 1) {
    std::vector<Hypervector> rows;
    rows.reserve(classes);
    std::vector<unsigned char> packed((dims + 7) / 8);
    for (std::uint32_t k = 0; k < classes; ++k) {
      if (!in.read(reinterpret_cast<char*>(packed.data()),
                   static_cast<std::streamsize>(packed.size()))) {
        throw InvalidArgument("read_am: truncated file");
      }
      std::vector<std::int8_t> v(dims);
      for (std::size_t i = 0; i < dims; ++i) v[i] = (packed[i / 8] >> (i % 8)) & 1U ? 1 : -1;
      rows.push_back(make_unchecked(std::move(v)));
    }
    return BinaryAssociativeMemory(std::move(rows), read_counts());
  }
  throw InvalidArgument("read_am: unsupported element width " + std::to_string(bits));
}

}  // namespace ilac::hdc
