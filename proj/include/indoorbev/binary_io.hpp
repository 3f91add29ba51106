#pragma once

// Little-endian primitives shared by the on-disk formats.

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>

#include "indoorbev/errors.hpp"

namespace indoorbev::binary {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b = {
      static_cast<char>(v & 0xFFu), static_cast<char>((v >> 8) & 0xFFu),
      static_cast<char>((v >> 16) & 0xFFu), static_cast<char>((v >> 24) & 0xFFu)};
  out.write(b.data(), 4);
}

inline void put_f32(std::ostream& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

inline std::uint32_t decode_u32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw DataError("unexpected end of binary stream");
  }
  return decode_u32(b.data());
}

inline float get_f32(std::istream& in) {
  return std::bit_cast<float>(get_u32(in));
}

}  // namespace indoorbev::binary
