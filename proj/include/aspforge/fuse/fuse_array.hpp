// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aspforge/bytes.hpp"
#include "aspforge/fuse/layout.hpp"

namespace aspforge::fuse {

enum class BurnResult {
  Ok,
  NoopAlreadySet,  // re-blow of a set bit; harmless
  Busy,
  WriteProtected,
  OutOfRange,
  BadSequence,
};

enum class ValidateStatus { Clean, Corrected, Abort };

/// One-time-programmable fuse window plus the burner register block.
/// Bits only ever go 0 -> 1; the read latch zeroes the secret window until
/// the next cold power cycle. Single-owner mutable state: callers serialize.
class FuseArray {
 public:
  /// Factory provisioning: seeds written directly (not via the burner),
  /// every enable flag left at zero.
  static FuseArray factory_fresh(BytesView vcek_seed32, BytesView cek_seed32,
                                 bool write_protect = false);

  // --- MMIO surface (what firmware and payload code sees) ---
  std::optional<uint32_t> mmio_read(uint32_t addr);
  /// Returns false only for out-of-range/misaligned addresses. Writes to
  /// anything but the burner registers are dropped and logged.
  bool mmio_write(uint32_t addr, uint32_t value);

  // --- firmware-style helpers layered on the MMIO protocol ---
  /// Full burn sequence for one bit (shadow read, busy poll, arm, trigger).
  BurnResult program_fuse_bit(uint32_t bit_index);

  bool resolve_flag(MetaFlag flag) const;

  BurnResult provision_with_redundancy(FuseRegion region, BytesView payload,
                                       bool enable_ecc, bool enable_fletcher);

  struct Validation {
    Bytes payload;
    ValidateStatus status = ValidateStatus::Clean;
  };
  /// BootROM-phase only (latch must be disengaged).
  Validation validate_region(FuseRegion region) const;

  void engage_latch();
  void cold_power_cycle();
  bool latch_engaged() const { return latch_; }

  bool write_protect_enabled() const { return write_protect_; }
  void set_write_protect(bool on) { write_protect_ = on; }
  uint64_t burn_count() const { return burn_count_; }

  /// Raw window contents, latch-independent. Test/serialization access;
  /// firmware code must go through mmio_read.
  const std::array<uint8_t, kRegionSize>& raw_window() const { return bits_; }
  Bytes raw_field(const Field& f) const;
  uint64_t popcount() const;

  const std::vector<std::string>& events() const { return events_; }
  void clear_events() { events_.clear(); }

  // Versioned JSON fuse-state file; bit-exact round-trip.
  std::string to_json() const;
  static std::optional<FuseArray> from_json(std::string_view text);

 private:
  FuseArray() = default;

  bool bit(uint32_t index) const;
  void set_bit(uint32_t index);
  static bool protected_bit(uint32_t index);
  void burn_trigger(uint32_t selector);
  void log(std::string msg);

  std::array<uint8_t, kRegionSize> bits_{};
  bool latch_ = false;
  bool write_protect_ = false;
  uint64_t burn_count_ = 0;
  uint32_t status_ = 0;
  uint32_t addr_select_ = 0;
  uint32_t control_ = 0;
  bool armed_ = false;
  std::vector<std::string> events_;
};

}  // namespace aspforge::fuse
