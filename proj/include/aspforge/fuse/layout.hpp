// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

namespace aspforge::fuse {

// SMN addresses. The secret window is readable (latch permitting); the
// burner block is the only writable surface.
inline constexpr uint32_t kRegionBase = 0x5D000;
inline constexpr uint32_t kRegionSize = 0x1000;
inline constexpr uint32_t kBurnerStatus = 0x5E000;
inline constexpr uint32_t kBurnerAddrSelect = 0x5E004;
inline constexpr uint32_t kBurnerControl = 0x5E014;
inline constexpr uint32_t kMmioLimit = 0x5E018;

struct Field {
  uint32_t offset;  // relative to kRegionBase
  uint32_t size;    // bytes
};

// Secret fuse map (window-relative offsets).
inline constexpr Field kCekSeed{0x044, 32};
inline constexpr Field kPsbCommitFlags{0x06C, 1};  // 3 bits
inline constexpr Field kCustomPkDigest{0x074, 48};
inline constexpr Field kCustomPkEcc{0x0A4, 30};
inline constexpr Field kVcekSeed{0x0C4, 32};
inline constexpr Field kVcekEcc{0x0E4, 20};
inline constexpr Field kMetadataBitmap{0x0F8, 3};
inline constexpr Field kCustomPkFletcher{0x0FC, 4};
inline constexpr Field kVcekFletcher{0x100, 4};
inline constexpr Field kPsbModelId{0x108, 1};   // 4 bits
inline constexpr Field kPsbVendorId{0x109, 1};  // 8 bits
inline constexpr Field kPsbEnable{0x10C, 1};    // 1 bit

// Burner register protocol: write the arm word to control, then the bit
// selector with the trigger bit set. Any other sequence is ignored and
// logged. One burn per arm.
inline constexpr uint32_t kBurnerArmWord = 0x5A5A0001;
inline constexpr uint32_t kTriggerBit = 0x80000000u;
inline constexpr uint32_t kSelectorMask = 0x0000FFFFu;

inline constexpr uint32_t kStatusBusy = 1u << 0;
inline constexpr uint32_t kStatusLastOk = 1u << 1;
inline constexpr uint32_t kStatusRejectedWp = 1u << 2;
inline constexpr uint32_t kStatusBadSequence = 1u << 3;

// Metadata security control bitmap flags, each stored as three replicas.
enum class MetaFlag {
  PkRevocationIndex1,
  PkRevocationIndex2,
  PkRevocationIndex3,
  CustomPkRevocation,
  CustomPkEccEnable,
  CustomPkFletcherEnable,
  VcekEccEnable,
  VcekFletcherEnable,
};

struct BitPos {
  uint32_t byte;  // window-relative
  uint8_t bit;
};

std::array<BitPos, 3> meta_flag_replicas(MetaFlag flag);

enum class FuseRegion { VcekSeed, CustomPk };

}  // namespace aspforge::fuse
