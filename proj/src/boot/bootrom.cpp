// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/boot/bootrom.hpp"

#include <cstring>

#include "aspforge/attest/report.hpp"
#include "aspforge/boot/branch.hpp"
#include "aspforge/crypto/sha256.hpp"
#include "aspforge/crypto/sha384.hpp"

namespace aspforge::boot {

bool SramModel::write(uint32_t addr, BytesView data) {
  if (static_cast<size_t>(addr) + data.size() > mem_.size()) return false;
  std::memcpy(mem_.data() + addr, data.data(), data.size());
  return true;
}

bool SramModel::read(uint32_t addr, uint8_t* out, uint32_t len) const {
  if (static_cast<size_t>(addr) + len > mem_.size()) return false;
  std::memcpy(out, mem_.data() + addr, len);
  return true;
}

std::optional<uint32_t> SramModel::read_u32(uint32_t addr) const {
  if (static_cast<size_t>(addr) + 4 > mem_.size()) return std::nullopt;
  return read_u32le(mem_.data() + addr);
}

BytesView SramModel::view(uint32_t addr, uint32_t len) const {
  if (static_cast<size_t>(addr) + len > mem_.size()) return {};
  return BytesView(mem_.data() + addr, len);
}

const char* to_string(BootStage stage) {
  switch (stage) {
    case BootStage::FuseAbort: return "FuseAbort";
    case BootStage::NoBootable: return "NoBootable";
    case BootStage::BootloaderRunning: return "BootloaderRunning";
    case BootStage::FullBoot: return "FullBoot";
  }
  return "?";
}

namespace {

const char* to_string(fuse::ValidateStatus s) {
  switch (s) {
    case fuse::ValidateStatus::Clean: return "Clean";
    case fuse::ValidateStatus::Corrected: return "Corrected";
    case fuse::ValidateStatus::Abort: return "Abort";
  }
  return "?";
}

const char* entry_name(fw::EntryType t) {
  switch (t) {
    case fw::EntryType::PrimaryBl: return "primary_bl";
    case fw::EntryType::SevFw: return "sev_fw";
    case fw::EntryType::RecoveryBl: return "recovery_bl";
    case fw::EntryType::Microcode: return "microcode";
    case fw::EntryType::WrappedIkek: return "wrapped_ikek";
  }
  return "?";
}

struct LoadedModule {
  fw::FirmwareModule module;
  fw::EntryType type;
};

struct BootCtx {
  fuse::FuseArray& fuses;
  const fw::FlashImage& flash;
  const BootRomConfig& config;
  SramModel sram;
  BootOutcome out;
  std::array<uint8_t, 48> expected_pk_digest{};
  std::optional<crypto::Key128> ikek;
  std::vector<std::pair<uint32_t, uint32_t>> copied;  // load_addr, size

  void event(int step, std::string name, nlohmann::json detail = nlohmann::json::object()) {
    out.event_log.push_back({step, std::move(name), std::move(detail)});
  }
};

std::optional<Bytes> decrypt_body(BootCtx& c, const fw::FirmwareModule& m, int step) {
  if (!c.ikek) {
    c.event(step, "decrypt_failed_no_ikek");
    return std::nullopt;
  }
  if (m.body.size() % 16 != 0) {
    c.event(step, "decrypt_failed_misaligned");
    return std::nullopt;
  }
  auto mek_block = crypto::aes128_decrypt_block(*c.ikek, m.wrapped_mek);
  crypto::Key128 mek;
  std::memcpy(mek.data(), mek_block.data(), 16);
  return crypto::aes128_cbc_decrypt(mek, m.iv, as_view(m.body));
}

// Copy-then-verify pipeline shared by every directory entry that carries
// code. Returns the accepted module; on any failure the copied bytes stay
// in SRAM untouched.
std::optional<LoadedModule> load_and_verify(BootCtx& c, fw::EntryType type, int step,
                                            bool skip_verification) {
  auto mod = c.flash.module(type);
  if (!mod) {
    c.event(step, "entry_unparseable_or_missing", {{"entry", entry_name(type)}});
    return std::nullopt;
  }
  if (static_cast<size_t>(mod->load_addr) + mod->image_size > c.sram.size()) {
    c.event(step, "load_out_of_bounds",
            {{"entry", entry_name(type)}, {"load_addr", mod->load_addr}});
    return std::nullopt;
  }
  c.sram.write(mod->load_addr, as_view(mod->body));
  c.copied.emplace_back(mod->load_addr, mod->image_size);
  c.event(step, "module_copied",
          {{"entry", entry_name(type)},
           {"load_addr", mod->load_addr},
           {"size", mod->image_size},
           {"svn", mod->svn}});

  if (skip_verification) {
    if (mod->encrypted()) {
      auto plain = decrypt_body(c, *mod, step);
      if (!plain) return std::nullopt;
      c.sram.write(mod->load_addr, as_view(*plain));
    }
    c.event(step, "verification_skipped", {{"entry", entry_name(type)}});
    return LoadedModule{*mod, type};
  }

  // The flash carries the signing key; the root of trust is the digest
  // pinned in fuses or ROM.
  crypto::RsaKeyPair pub;
  pub.n = mod->pubkey_modulus;
  pub.e = mod->pubkey_exponent;
  auto digest = crypto::sha384(as_view(pub.public_encoding()));
  if (!ct_equal(as_view(digest), as_view(c.expected_pk_digest))) {
    c.event(step, "pubkey_digest_mismatch", {{"entry", entry_name(type)}});
    return std::nullopt;
  }

  const fw::AuthScheme scheme = c.config.arch_scheme;

  if (scheme == fw::AuthScheme::Zen1) {
    Bytes plain = mod->body;
    if (mod->encrypted()) {
      auto p = decrypt_body(c, *mod, step);
      if (!p) return std::nullopt;
      plain = std::move(*p);
      c.sram.write(mod->load_addr, as_view(plain));  // decrypt in place
    }
    if (!fw::verify_module_signature(*mod, pub, scheme, as_view(plain))) {
      c.event(step, "signature_invalid", {{"entry", entry_name(type)}});
      return std::nullopt;
    }
    c.event(step, "module_verified", {{"entry", entry_name(type)}});
    return LoadedModule{*mod, type};
  }

  // Zen3 / Zen4-5: signature covers the stored (possibly encrypted) body.
  if (!fw::verify_module_signature(*mod, pub, scheme)) {
    c.event(step, "signature_invalid", {{"entry", entry_name(type)}});
    return std::nullopt;
  }
  Bytes plain = mod->body;
  if (mod->encrypted()) {
    auto p = decrypt_body(c, *mod, step);
    if (!p) return std::nullopt;
    plain = std::move(*p);
    c.sram.write(mod->load_addr, as_view(plain));
  }
  if (scheme == fw::AuthScheme::Zen45) {
    auto h = crypto::sha256(as_view(plain));
    if (!ct_equal(as_view(h), as_view(mod->body_sha256))) {
      c.event(step, "plaintext_hash_mismatch", {{"entry", entry_name(type)}});
      return std::nullopt;
    }
  }
  c.event(step, "module_verified", {{"entry", entry_name(type)}});
  return LoadedModule{*mod, type};
}

bool descriptor_at(const SramModel& sram, uint32_t addr) {
  if (static_cast<size_t>(addr) + fw::kDescriptorBytes > sram.size()) return false;
  uint8_t magic[8];
  sram.read(addr, magic, 8);
  return std::memcmp(magic, fw::kPayloadMagic, 8) == 0;
}

}  // namespace

BootOutcome boot(fuse::FuseArray& fuses, const fw::FlashImage& flash,
                 const BootRomConfig& config, const PayloadRegistry& hooks) {
  BootCtx c{fuses, flash, config, SramModel(config.sram_size), {}, {}, {}, {}};
  BootOutcome& out = c.out;

  if (config.enforce_write_protect) fuses.set_write_protect(true);

  // ---- Step 1: fuse preprocessing, CEK derivation, latch ----
  auto vcek_val = fuses.validate_region(fuse::FuseRegion::VcekSeed);
  auto cpk_val = fuses.validate_region(fuse::FuseRegion::CustomPk);
  c.event(1, "fuse_validation",
          {{"vcek", to_string(vcek_val.status)},
           {"custom_pk", to_string(cpk_val.status)},
           {"vcek_ecc_enabled", fuses.resolve_flag(fuse::MetaFlag::VcekEccEnable)},
           {"vcek_fletcher_enabled", fuses.resolve_flag(fuse::MetaFlag::VcekFletcherEnable)}});

  if (vcek_val.status == fuse::ValidateStatus::Abort ||
      cpk_val.status == fuse::ValidateStatus::Abort) {
    fuses.engage_latch();
    c.event(1, "latch_engaged");
    c.event(1, "boot_abort", {{"reason", "fuse_validation"}});
    out.stage = BootStage::FuseAbort;
    return out;
  }

  attest::Seed32 cek_seed{};
  {
    Bytes raw = fuses.raw_field(fuse::kCekSeed);
    std::copy(raw.begin(), raw.end(), cek_seed.begin());
  }
  auto cek_keypair =
      crypto::ecdsa_keypair_from_seed(as_view(cek_seed), str_view(attest::kCekLabel));
  std::fill(cek_seed.begin(), cek_seed.end(), 0);
  c.event(1, "cek_keypair_derived");

  attest::Seed32 shadow_root{};
  std::copy(vcek_val.payload.begin(), vcek_val.payload.end(), shadow_root.begin());
  std::array<uint8_t, 48> shadow_custom_pk{};
  std::copy(cpk_val.payload.begin(), cpk_val.payload.end(), shadow_custom_pk.begin());

  fuses.engage_latch();
  c.event(1, "latch_engaged");

  // ---- Step 2: root public-key digest selection ----
  bool custom_pk_present = false;
  for (uint8_t b : shadow_custom_pk) custom_pk_present |= (b != 0);
  c.expected_pk_digest =
      custom_pk_present ? shadow_custom_pk : config.builtin_amd_pk_digest;
  c.event(2, "root_pk_selected",
          {{"source", custom_pk_present ? "custom_pk_fuses" : "builtin_rom"}});

  // ---- Step 3: IKEK load ----
  if (auto entry = flash.ikek_entry()) {
    if (fw::verify_ikek_entry(*entry, config.bootrom_key, config.arch_scheme)) {
      c.ikek = fw::unwrap_ikek(*entry, config.bootrom_key);
      c.event(3, "ikek_loaded");
    } else {
      c.event(3, "ikek_hmac_failed");
    }
  } else {
    c.event(3, "ikek_entry_missing");
  }

  // ---- Steps 4/5: primary, then recovery over the stale SRAM ----
  auto executed = load_and_verify(c, fw::EntryType::PrimaryBl, 4, false);
  if (!executed) executed = load_and_verify(c, fw::EntryType::RecoveryBl, 5, false);
  if (!executed) {
    c.event(5, "no_bootable_module");
    out.stage = BootStage::NoBootable;
    return out;
  }
  out.executed_entry = executed->type;
  out.bl_svn = executed->module.svn;

  // ---- Step 6: layer-1 seed derivation and handoff ----
  auto derived = attest::derive_layer_seed(shadow_root, executed->module.svn);
  std::fill(shadow_root.begin(), shadow_root.end(), 0);
  c.event(6, "root_seed_locked_erased");
  out.handoff = SeedHandoff{derived.layer_seed, derived.rollback_seed, cek_keypair};
  c.event(6, "seed_handoff",
          {{"svn", executed->module.svn},
           {"rollback_present", derived.rollback_seed.has_value()}});

  // ---- Step 7: control transfer, then normal bootloader duties ----
  bool skip_sevfw = false;
  {
    // Structural control transfer: chase unconditional branches from the
    // entry point until a payload descriptor shows up (bounded; the
    // trampoline sled of partial collisions is one extra hop).
    uint32_t pc = executed->module.load_addr;
    std::optional<uint32_t> exec_at;
    for (int hop = 0; hop < 8; ++hop) {
      auto word = c.sram.read_u32(pc);
      if (!word) break;
      auto target = decode_branch(*word, pc);
      if (!target) break;
      if (*target % 4 != 0 || static_cast<size_t>(*target) + 4 > c.sram.size()) break;
      c.event(7, "branch_decoded",
              {{"pc", pc}, {"target", *target}, {"word", *word}});
      if (descriptor_at(c.sram, *target)) {
        exec_at = *target;
        break;
      }
      pc = *target;
    }

    if (exec_at) {
      out.code_exec_event = CodeExecEvent{*exec_at, true};
      uint32_t payload_id = *c.sram.read_u32(*exec_at + 8);
      c.event(7, "code_exec",
              {{"branch_target", *exec_at}, {"payload_id", payload_id},
               {"attacker_controlled", true}});

      // Payload body: from the descriptor to the end of its stale region.
      BytesView body_view;
      for (auto [start, size] : c.copied) {
        if (*exec_at >= start && *exec_at < start + size) {
          uint32_t begin = *exec_at + fw::kDescriptorBytes;
          uint32_t end = start + size;
          if (begin < end) body_view = c.sram.view(begin, end - begin);
        }
      }

      auto hook = hooks.find(payload_id);
      if (hook != hooks.end()) {
        PayloadContext ctx;
        ctx.sram_ = &c.sram;
        ctx.fuses_ = &fuses;
        ctx.handoff_ = &*out.handoff;
        ctx.outcome_ = &out;
        ctx.skip_sevfw_ = &skip_sevfw;
        ctx.payload_body_ = body_view;
        hook->second(ctx);
        c.event(7, "payload_returned",
                {{"payload_id", payload_id}, {"dram_out_bytes", out.dram_out.size()}});
      } else {
        c.event(7, "payload_not_registered", {{"payload_id", payload_id}});
      }
    }
  }

  // Normal bootloader continuation: layers 2 and 3.
  bool chain_ok = true;
  attest::Seed32 chain_seed = out.handoff->layer1_seed;
  int layers_chained = 0;
  const std::pair<fw::EntryType, const char*> lower_layers[] = {
      {fw::EntryType::SevFw, "sev_fw"}, {fw::EntryType::Microcode, "microcode"}};
  for (auto [etype, name] : lower_layers) {
    if (!flash.find(etype)) {
      c.event(7, "entry_absent_skipped", {{"entry", name}});
      continue;
    }
    bool skip = (etype == fw::EntryType::SevFw) && skip_sevfw;
    auto m = load_and_verify(c, etype, 7, skip);
    if (!m) {
      chain_ok = false;
      break;
    }
    if (etype == fw::EntryType::SevFw)
      out.sevfw_svn = m->module.svn;
    else
      out.ucode_svn = m->module.svn;
    chain_seed = attest::derive_layer_seed(chain_seed, m->module.svn).layer_seed;
    ++layers_chained;
    c.event(7, "layer_seed_chained", {{"entry", name}, {"svn", m->module.svn}});
  }

  if (!chain_ok) {
    out.stage = BootStage::BootloaderRunning;
    out.x86_boot_ok = false;
    c.event(7, "x86_boot", {{"ok", false}});
    return out;
  }
  if (layers_chained == 2) out.derived_vcek_seed = chain_seed;
  out.stage = BootStage::FullBoot;
  out.x86_boot_ok = true;
  c.event(7, "x86_boot", {{"ok", true}});
  return out;
}

// --- payload capability surface ---

Bytes PayloadContext::read_sram(uint32_t addr, uint32_t len) const {
  Bytes out(len, 0);
  if (!sram_->read(addr, out.data(), len)) out.clear();
  return out;
}

bool PayloadContext::write_sram(uint32_t addr, BytesView data) {
  return sram_->write(addr, data);
}

std::optional<uint32_t> PayloadContext::mmio_read(uint32_t addr) {
  auto v = fuses_->mmio_read(addr);
  if (addr < fuse::kRegionBase + fuse::kRegionSize) {
    outcome_->event_log.push_back(
        {7, "payload_mmio_read",
         {{"addr", addr}, {"value", v ? nlohmann::json(*v) : nlohmann::json()}}});
  }
  return v;
}

bool PayloadContext::mmio_write(uint32_t addr, uint32_t value) {
  return fuses_->mmio_write(addr, value);
}

const attest::Seed32& PayloadContext::layer1_seed() const {
  return handoff_->layer1_seed;
}

const std::optional<attest::Seed32>& PayloadContext::rollback_seed() const {
  return handoff_->rollback_seed;
}

const crypto::EcdsaP384KeyPair& PayloadContext::cek_keypair() const {
  return handoff_->cek_keypair;
}

void PayloadContext::write_dram_out(BytesView data) {
  append(outcome_->dram_out, data);
}

void PayloadContext::set_skip_sevfw_verification() { *skip_sevfw_ = true; }

void PayloadContext::request_reboot() { outcome_->reboot_requested = true; }

// --- outcome serialization ---

nlohmann::json BootOutcome::to_json(bool include_secrets) const {
  nlohmann::json j;
  j["stage"] = to_string(stage);
  j["x86_boot_ok"] = x86_boot_ok;
  j["reboot_requested"] = reboot_requested;
  if (executed_entry) j["executed_entry"] = entry_name(*executed_entry);
  if (code_exec_event) {
    j["code_exec_event"] = {{"branch_target", code_exec_event->branch_target},
                            {"attacker_controlled", code_exec_event->attacker_controlled}};
  }
  nlohmann::json svns = nlohmann::json::object();
  if (bl_svn) svns["bl_svn"] = *bl_svn;
  if (sevfw_svn) svns["sevfw_svn"] = *sevfw_svn;
  if (ucode_svn) svns["ucode_svn"] = *ucode_svn;
  j["svns"] = svns;
  if (!dram_out.empty()) j["dram_out"] = to_hex(as_view(dram_out));
  if (include_secrets) {
    if (handoff) {
      nlohmann::json h;
      h["layer1_seed"] = to_hex(as_view(handoff->layer1_seed));
      if (handoff->rollback_seed)
        h["rollback_seed"] = to_hex(as_view(*handoff->rollback_seed));
      h["cek_public"] = to_hex(as_view(handoff->cek_keypair.public_point));
      j["handoff"] = h;
    }
    if (derived_vcek_seed) j["derived_vcek_seed"] = to_hex(as_view(*derived_vcek_seed));
  }
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : event_log)
    events.push_back({{"step", e.step}, {"name", e.name}, {"detail", e.detail}});
  j["event_log"] = events;
  return j;
}

std::string BootOutcome::event_log_ndjson() const {
  std::string out;
  for (const auto& e : event_log) {
    nlohmann::json j{{"step", e.step}, {"name", e.name}, {"detail", e.detail}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace aspforge::boot
