// src/binary_io.hpp

// Copyright 2026  The mdistill Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Little-endian primitive readers/writers shared by the checkpoint and
// corpus formats.  Internal to the library.

#ifndef MDISTILL_SRC_BINARY_IO_HPP_
#define MDISTILL_SRC_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "mdistill/error.hpp"

namespace mdistill::binio {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

inline void WriteU32(std::ostream &os, std::uint32_t v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof(v));
}
inline void WriteU64(std::ostream &os, std::uint64_t v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof(v));
}
inline void WriteF64Array(std::ostream &os, const double *v, std::size_t n) {
  os.write(reinterpret_cast<const char *>(v),
           static_cast<std::streamsize>(n * sizeof(double)));
}
inline void WriteBytes(std::ostream &os, const void *p, std::size_t n) {
  os.write(static_cast<const char *>(p), static_cast<std::streamsize>(n));
}

/// Reads exactly n bytes or throws ErrorCode::kTruncated with `what`.
inline void ReadBytes(std::istream &is, void *p, std::size_t n, const char *what) {
  is.read(static_cast<char *>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) Fail(ErrorCode::kTruncated, what);
}
inline std::uint32_t ReadU32(std::istream &is, const char *what) {
  std::uint32_t v;
  ReadBytes(is, &v, sizeof(v), what);
  return v;
}
inline std::uint64_t ReadU64(std::istream &is, const char *what) {
  std::uint64_t v;
  ReadBytes(is, &v, sizeof(v), what);
  return v;
}
inline void ReadF64Array(std::istream &is, double *v, std::size_t n, const char *what) {
  ReadBytes(is, v, n * sizeof(double), what);
}

/// True when the stream has no bytes left.
inline bool AtEnd(std::istream &is) {
  return is.peek() == std::char_traits<char>::eof();
}

}  // namespace mdistill::binio

#endif  // MDISTILL_SRC_BINARY_IO_HPP_
