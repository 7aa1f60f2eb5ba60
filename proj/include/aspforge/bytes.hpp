// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aspforge {

using Bytes = std::vector<uint8_t>;
using BytesView = std::span<const uint8_t>;

std::string to_hex(BytesView data);
std::optional<Bytes> from_hex(std::string_view hex);

inline BytesView as_view(const Bytes& b) { return BytesView(b.data(), b.size()); }

template <size_t N>
inline BytesView as_view(const std::array<uint8_t, N>& a) {
  return BytesView(a.data(), N);
}

inline BytesView str_view(std::string_view s) {
  return BytesView(reinterpret_cast<const uint8_t*>(s.data()), s.size());
}

inline void append(Bytes& out, BytesView data) {
  out.insert(out.end(), data.begin(), data.end());
}

inline void append_u16le(Bytes& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

inline void append_u32le(Bytes& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline void append_u64le(Bytes& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline uint16_t read_u16le(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

inline uint32_t read_u32le(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

inline void put_u32le(uint8_t* p, uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<uint8_t>(v >> (8 * i));
}

/// Comparison that always scans the full length; shape does not depend on
/// where the first mismatch sits.
bool ct_equal(BytesView a, BytesView b);

template <size_t N>
std::optional<std::array<uint8_t, N>> fixed_from_hex(std::string_view hex) {
  auto b = from_hex(hex);
  if (!b || b->size() != N) return std::nullopt;
  std::array<uint8_t, N> out{};
  std::copy(b->begin(), b->end(), out.begin());
  return out;
}

template <size_t N>
std::array<uint8_t, N> take(BytesView data, size_t offset = 0) {
  std::array<uint8_t, N> out{};
  for (size_t i = 0; i < N && offset + i < data.size(); ++i) out[i] = data[offset + i];
  return out;
}

}  // namespace aspforge
