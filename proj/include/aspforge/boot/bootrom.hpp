// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>

#include <json.hpp>

#include "aspforge/attest/seed_chain.hpp"
#include "aspforge/crypto/ecdsa_p384.hpp"
#include "aspforge/crypto/rsa_pss.hpp"
#include "aspforge/firmware/build.hpp"
#include "aspforge/fuse/fuse_array.hpp"

namespace aspforge::boot {

/// Boot-time SRAM. Zeroed at cold boot; never cleared between verification
/// attempts within one boot, which is exactly the stale-data primitive the
/// recovery-fallback exploit rides on.
class SramModel {
 public:
  explicit SramModel(size_t size = fw::kDefaultSramSize) : mem_(size, 0) {}

  size_t size() const { return mem_.size(); }
  bool write(uint32_t addr, BytesView data);
  bool read(uint32_t addr, uint8_t* out, uint32_t len) const;
  std::optional<uint32_t> read_u32(uint32_t addr) const;
  BytesView view(uint32_t addr, uint32_t len) const;

 private:
  Bytes mem_;
};

struct BootRomConfig {
  fw::AuthScheme arch_scheme = fw::AuthScheme::Zen3Milan;
  crypto::Key128 bootrom_key{};
  std::array<uint8_t, 48> builtin_amd_pk_digest{};
  crypto::RsaKeyPair vendor_keypair;  // public part is what boot uses
  bool enforce_write_protect = false;
  bool distribute_encrypted_fw = true;  // Milan-PI-1.0.0.3 flips this off
  size_t sram_size = fw::kDefaultSramSize;
};

enum class BootStage { FuseAbort, NoBootable, BootloaderRunning, FullBoot };

const char* to_string(BootStage stage);

struct CodeExecEvent {
  uint32_t branch_target = 0;
  bool attacker_controlled = false;
};

struct SeedHandoff {
  attest::Seed32 layer1_seed{};
  std::optional<attest::Seed32> rollback_seed;  // TmpSeed_{cur-1}
  // CEK handle: the keypair computed ahead of the latch; the raw fuse
  // window is unreadable by the time anything off-chip runs.
  crypto::EcdsaP384KeyPair cek_keypair;
};

struct BootEvent {
  int step = 0;
  std::string name;
  nlohmann::json detail;
};

struct BootOutcome {
  BootStage stage = BootStage::NoBootable;
  std::optional<fw::EntryType> executed_entry;
  std::optional<CodeExecEvent> code_exec_event;
  std::optional<uint8_t> bl_svn, sevfw_svn, ucode_svn;
  std::optional<SeedHandoff> handoff;
  std::optional<attest::Seed32> derived_vcek_seed;  // present on a full chain
  bool x86_boot_ok = false;
  bool reboot_requested = false;
  Bytes dram_out;
  std::vector<BootEvent> event_log;

  nlohmann::json to_json(bool include_secrets = true) const;
  std::string event_log_ndjson() const;
};

/// Capability surface handed to attacker payloads. These calls are the only
/// channel between payload code and simulator state; fuse reads go through
/// the same latched MMIO path as everything else.
class PayloadContext {
 public:
  Bytes read_sram(uint32_t addr, uint32_t len) const;
  bool write_sram(uint32_t addr, BytesView data);
  std::optional<uint32_t> mmio_read(uint32_t addr);
  bool mmio_write(uint32_t addr, uint32_t value);
  const attest::Seed32& layer1_seed() const;
  const std::optional<attest::Seed32>& rollback_seed() const;
  const crypto::EcdsaP384KeyPair& cek_keypair() const;
  void write_dram_out(BytesView data);
  void set_skip_sevfw_verification();
  void request_reboot();
  BytesView payload_body() const { return payload_body_; }

 private:
  friend BootOutcome boot(fuse::FuseArray&, const fw::FlashImage&,
                          const BootRomConfig&,
                          const std::map<uint32_t, std::function<void(PayloadContext&)>>&);
  SramModel* sram_ = nullptr;
  fuse::FuseArray* fuses_ = nullptr;
  const SeedHandoff* handoff_ = nullptr;
  BootOutcome* outcome_ = nullptr;
  bool* skip_sevfw_ = nullptr;
  BytesView payload_body_;
};

using PayloadFn = std::function<void(PayloadContext&)>;
using PayloadRegistry = std::map<uint32_t, PayloadFn>;

/// One cold boot of the simulated part: fuse preprocessing and latch, root
/// key selection, IKEK load, primary/recovery load with scheme-dependent
/// verification, seed derivation handoff, structural control transfer, and
/// layer-2/3 chaining. Never throws for in-model failures; every outcome is
/// a BootOutcome state.
BootOutcome boot(fuse::FuseArray& fuses, const fw::FlashImage& flash,
                 const BootRomConfig& config, const PayloadRegistry& hooks = {});

}  // namespace aspforge::boot
