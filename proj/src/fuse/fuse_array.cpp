// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/fuse/fuse_array.hpp"

#include <bit>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "aspforge/crypto/fletcher32.hpp"
#include "aspforge/crypto/secded.hpp"

namespace aspforge::fuse {

namespace {

struct RegionSpec {
  Field payload;
  Field ecc;
  Field fletcher;
  MetaFlag ecc_enable;
  MetaFlag fletcher_enable;
};

RegionSpec region_spec(FuseRegion region) {
  if (region == FuseRegion::VcekSeed)
    return {kVcekSeed, kVcekEcc, kVcekFletcher, MetaFlag::VcekEccEnable,
            MetaFlag::VcekFletcherEnable};
  return {kCustomPkDigest, kCustomPkEcc, kCustomPkFletcher, MetaFlag::CustomPkEccEnable,
          MetaFlag::CustomPkFletcherEnable};
}

bool in_field(uint32_t byte_off, const Field& f) {
  return byte_off >= f.offset && byte_off < f.offset + f.size;
}

uint8_t ecc_bits_for_byte(const Bytes& ecc_field, size_t byte_index) {
  uint8_t out = 0;
  for (int j = 0; j < 5; ++j) {
    size_t bit = 5 * byte_index + j;
    if (ecc_field[bit / 8] & (1u << (bit % 8))) out |= static_cast<uint8_t>(1 << j);
  }
  return out;
}

}  // namespace

std::array<BitPos, 3> meta_flag_replicas(MetaFlag flag) {
  // Appendix bitmap: 0x5D0F8..0x5D0FA, replica slots R1/R2/R3.
  constexpr uint32_t b0 = kMetadataBitmap.offset;      // 0x0F8
  constexpr uint32_t b1 = kMetadataBitmap.offset + 1;  // 0x0F9
  constexpr uint32_t b2 = kMetadataBitmap.offset + 2;  // 0x0FA
  switch (flag) {
    case MetaFlag::PkRevocationIndex1:
      return {{{b0, 0}, {b0, 4}, {b1, 0}}};
    case MetaFlag::PkRevocationIndex2:
      return {{{b0, 1}, {b0, 5}, {b1, 1}}};
    case MetaFlag::PkRevocationIndex3:
      return {{{b0, 2}, {b0, 6}, {b1, 2}}};
    case MetaFlag::CustomPkRevocation:
      return {{{b0, 3}, {b0, 7}, {b1, 3}}};
    case MetaFlag::CustomPkEccEnable:
      return {{{b1, 4}, {b1, 5}, {b1, 6}}};
    case MetaFlag::CustomPkFletcherEnable:
      return {{{b1, 7}, {b2, 0}, {b2, 1}}};
    case MetaFlag::VcekEccEnable:
      return {{{b2, 2}, {b2, 3}, {b2, 4}}};
    case MetaFlag::VcekFletcherEnable:
      return {{{b2, 5}, {b2, 6}, {b2, 7}}};
  }
  throw std::invalid_argument("unknown metadata flag");
}

FuseArray FuseArray::factory_fresh(BytesView vcek_seed32, BytesView cek_seed32,
                                   bool write_protect) {
  if (vcek_seed32.size() != kVcekSeed.size || cek_seed32.size() != kCekSeed.size)
    throw std::invalid_argument("seed length mismatch");
  FuseArray f;
  std::copy(vcek_seed32.begin(), vcek_seed32.end(), f.bits_.begin() + kVcekSeed.offset);
  std::copy(cek_seed32.begin(), cek_seed32.end(), f.bits_.begin() + kCekSeed.offset);
  f.write_protect_ = write_protect;
  return f;
}

bool FuseArray::bit(uint32_t index) const {
  return bits_[index / 8] & (1u << (index % 8));
}

void FuseArray::set_bit(uint32_t index) { bits_[index / 8] |= (1u << (index % 8)); }

bool FuseArray::protected_bit(uint32_t index) {
  uint32_t byte_off = index / 8;
  return in_field(byte_off, kCekSeed) || in_field(byte_off, kVcekSeed) ||
         in_field(byte_off, kVcekEcc) || in_field(byte_off, kVcekFletcher) ||
         in_field(byte_off, kCustomPkDigest) || in_field(byte_off, kCustomPkEcc) ||
         in_field(byte_off, kCustomPkFletcher);
}

void FuseArray::log(std::string msg) { events_.push_back(std::move(msg)); }

std::optional<uint32_t> FuseArray::mmio_read(uint32_t addr) {
  if (addr % 4 != 0 || addr < kRegionBase || addr >= kMmioLimit) return std::nullopt;
  if (addr < kRegionBase + kRegionSize) {
    if (latch_) return 0;  // engaged latch: the window reads as null bytes
    uint32_t off = addr - kRegionBase;
    return read_u32le(bits_.data() + off);
  }
  switch (addr) {
    case kBurnerStatus:
      return status_;
    case kBurnerAddrSelect:
      return addr_select_;
    case kBurnerControl:
      return control_;
    default:
      return 0;  // reserved burner space
  }
}

bool FuseArray::mmio_write(uint32_t addr, uint32_t value) {
  if (addr % 4 != 0 || addr < kRegionBase || addr >= kMmioLimit) return false;
  if (addr < kRegionBase + kRegionSize) {
    // Data fuses have no direct write path; only the burner changes them.
    char buf[64];
    std::snprintf(buf, sizeof(buf), "mmio_write_ignored addr=0x%x", addr);
    log(buf);
    return true;
  }
  switch (addr) {
    case kBurnerControl:
      control_ = value;
      armed_ = (value == kBurnerArmWord);
      return true;
    case kBurnerAddrSelect:
      addr_select_ = value;
      if (value & kTriggerBit) burn_trigger(value & kSelectorMask);
      return true;
    case kBurnerStatus:
    default: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "mmio_write_ignored addr=0x%x", addr);
      log(buf);
      return true;
    }
  }
}

void FuseArray::burn_trigger(uint32_t selector) {
  status_ &= ~(kStatusLastOk | kStatusRejectedWp | kStatusBadSequence);
  if (!armed_) {
    status_ |= kStatusBadSequence;
    log("burn_rejected bad_sequence");
    return;
  }
  armed_ = false;  // one burn per arm
  if (selector >= kRegionSize * 8) {
    status_ |= kStatusBadSequence;
    log("burn_rejected selector_out_of_range");
    return;
  }
  if (write_protect_ && protected_bit(selector)) {
    status_ |= kStatusRejectedWp;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "burn_rejected write_protect bit=%u", selector);
    log(buf);
    return;
  }
  set_bit(selector);  // idempotent: re-blowing a set bit changes nothing
  ++burn_count_;
  status_ |= kStatusLastOk;
}

BurnResult FuseArray::program_fuse_bit(uint32_t bit_index) {
  if (bit_index >= kRegionSize * 8) return BurnResult::OutOfRange;

  // Shadow-register read to skip redundant burns. Behind the latch this
  // reads zero, so post-latch callers re-blow blindly (harmless).
  uint32_t word_addr = kRegionBase + (bit_index / 32) * 4;
  auto shadow = mmio_read(word_addr);
  if (shadow && (*shadow & (1u << (bit_index % 32)))) return BurnResult::NoopAlreadySet;

  auto status = mmio_read(kBurnerStatus);
  if (status && (*status & kStatusBusy)) return BurnResult::Busy;

  mmio_write(kBurnerControl, kBurnerArmWord);
  mmio_write(kBurnerAddrSelect, kTriggerBit | bit_index);

  status = mmio_read(kBurnerStatus);
  if (status && (*status & kStatusRejectedWp)) return BurnResult::WriteProtected;
  if (status && (*status & kStatusBadSequence)) return BurnResult::BadSequence;
  return BurnResult::Ok;
}

bool FuseArray::resolve_flag(MetaFlag flag) const {
  auto replicas = meta_flag_replicas(flag);
  int votes = 0;
  for (const auto& r : replicas)
    if (bits_[r.byte] & (1u << r.bit)) ++votes;
  return votes >= 2;
}

BurnResult FuseArray::provision_with_redundancy(FuseRegion region, BytesView payload,
                                                bool enable_ecc, bool enable_fletcher) {
  RegionSpec spec = region_spec(region);
  if (payload.size() != spec.payload.size)
    throw std::invalid_argument("provision payload size mismatch");

  std::vector<uint32_t> to_burn;
  auto add_field_bits = [&to_burn](const Field& f, BytesView data) {
    for (size_t i = 0; i < data.size(); ++i)
      for (int j = 0; j < 8; ++j)
        if (data[i] & (1u << j)) to_burn.push_back((f.offset + i) * 8 + j);
  };

  add_field_bits(spec.payload, payload);

  if (enable_ecc) {
    Bytes ecc(spec.ecc.size, 0);
    for (size_t i = 0; i < payload.size(); ++i) {
      auto w = crypto::secded_encode(payload[i]);
      for (int j = 0; j < 5; ++j) {
        if (w.check & (1u << j)) {
          size_t bitpos = 5 * i + j;
          ecc[bitpos / 8] |= static_cast<uint8_t>(1u << (bitpos % 8));
        }
      }
    }
    add_field_bits(spec.ecc, as_view(ecc));
    for (const auto& r : meta_flag_replicas(spec.ecc_enable))
      to_burn.push_back(r.byte * 8 + r.bit);
  }

  if (enable_fletcher) {
    uint32_t sum = crypto::fletcher32(payload);
    Bytes sum_le;
    append_u32le(sum_le, sum);
    add_field_bits(spec.fletcher, as_view(sum_le));
    for (const auto& r : meta_flag_replicas(spec.fletcher_enable))
      to_burn.push_back(r.byte * 8 + r.bit);
  }

  for (uint32_t bit_index : to_burn) {
    BurnResult r = program_fuse_bit(bit_index);
    if (r != BurnResult::Ok && r != BurnResult::NoopAlreadySet) return r;
  }
  return BurnResult::Ok;
}

FuseArray::Validation FuseArray::validate_region(FuseRegion region) const {
  if (latch_) throw std::logic_error("validate_region requires disengaged latch");
  RegionSpec spec = region_spec(region);

  Bytes payload(bits_.begin() + spec.payload.offset,
                bits_.begin() + spec.payload.offset + spec.payload.size);

  bool ecc_on = resolve_flag(spec.ecc_enable);
  bool fletcher_on = resolve_flag(spec.fletcher_enable);
  bool corrected = false;

  if (ecc_on) {
    Bytes ecc(bits_.begin() + spec.ecc.offset,
              bits_.begin() + spec.ecc.offset + spec.ecc.size);
    for (size_t i = 0; i < payload.size(); ++i) {
      crypto::SecdedWord w{payload[i], ecc_bits_for_byte(ecc, i)};
      auto d = crypto::secded_decode(w);
      if (d.status == crypto::SecdedStatus::Uncorrectable)
        return {std::move(payload), ValidateStatus::Abort};
      if (d.status == crypto::SecdedStatus::Corrected) corrected = true;
      payload[i] = d.data;
    }
  }

  if (fletcher_on) {
    uint32_t stored = read_u32le(bits_.data() + spec.fletcher.offset);
    if (crypto::fletcher32(as_view(payload)) != stored)
      return {std::move(payload), ValidateStatus::Abort};
  }

  return {std::move(payload),
          corrected ? ValidateStatus::Corrected : ValidateStatus::Clean};
}

void FuseArray::engage_latch() { latch_ = true; }

void FuseArray::cold_power_cycle() {
  latch_ = false;
  status_ = 0;
  addr_select_ = 0;
  control_ = 0;
  armed_ = false;
}

Bytes FuseArray::raw_field(const Field& f) const {
  return Bytes(bits_.begin() + f.offset, bits_.begin() + f.offset + f.size);
}

uint64_t FuseArray::popcount() const {
  uint64_t n = 0;
  for (uint8_t b : bits_) n += std::popcount(b);
  return n;
}

std::string FuseArray::to_json() const {
  nlohmann::json j;
  j["format_version"] = 1;
  j["bits"] = to_hex(BytesView(bits_.data(), bits_.size()));
  j["write_protect"] = write_protect_;
  return j.dump(2) + "\n";
}

std::optional<FuseArray> FuseArray::from_json(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  if (!j.contains("format_version") || j["format_version"] != 1) return std::nullopt;
  if (!j.contains("bits") || !j["bits"].is_string()) return std::nullopt;
  auto bits = from_hex(j["bits"].get<std::string>());
  if (!bits || bits->size() != kRegionSize) return std::nullopt;

  FuseArray f;
  std::copy(bits->begin(), bits->end(), f.bits_.begin());
  f.write_protect_ = j.value("write_protect", false);
  return f;
}

}  // namespace aspforge::fuse
