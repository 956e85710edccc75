#pragma once

// Binary associative-memory files.
//
//   offset  size  field
//   0       4     magic "HDCM"
//   4       2     version, u16 LE (currently 1)
//   6       4     K, u32 LE (classes)
//   10      4     D, u32 LE (dims)
//   14      1     bits per element, u8: 64 (integer AM) or 1 (binarised AM)
//   15      ...   K class vectors, row-major
//                   bits = 64: D int64 LE per row
//                   bits = 1:  ceil(D / 8) bytes per row, element i in bit (i % 8)
//                              of byte i / 8, 1 = +1, 0 = -1, pad bits zero
//   ...     8*K   per-class sample counts, u64 LE
//
// Readers reject bad magic, unknown versions, unsupported widths, and short files.

#include <iosfwd>
#include <variant>

#include "ilac/hdc/memory.hpp"

namespace ilac::hdc {

void write_am(std::ostream& out, const AssociativeMemory& am);
void write_am(std::ostream& out, const BinaryAssociativeMemory& am);

// Returns whichever representation the file holds. Throws InvalidArgument on malformed input.
std::variant<AssociativeMemory, BinaryAssociativeMemory> read_am(std::istream& in);

}  // namespace ilac::hdc
