// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "aspforge/attack/badfuse.hpp"
#include "aspforge/attack/milanlaunchy.hpp"
#include "aspforge/boot/branch.hpp"
#include "aspforge/crypto/sha384.hpp"
#include "aspforge/scenario.hpp"
#include "oracles.hpp"

using namespace aspforge;
using namespace aspforge::boot;

namespace {

constexpr uint64_t kSeed = 0;

struct World {
  const Platform& platform;
  fuse::FuseArray fuses;
  BootRomConfig config;
  attest::Seed32 root_seed;

  explicit World(fw::AuthScheme arch = fw::AuthScheme::Zen3Milan,
                 bool redundancy = false)
      : platform(make_platform(kSeed)),
        fuses(make_factory_fuses(kSeed, redundancy, false)),
        root_seed(SeededRng::from_seed(kSeed).fork("fuses.vcek_seed").array<32>()) {
    ScenarioConfig sc;
    sc.arch = arch;
    config = make_bootrom_config(platform, sc);
  }
};

size_t event_index(const BootOutcome& out, std::string_view name) {
  for (size_t i = 0; i < out.event_log.size(); ++i)
    if (out.event_log[i].name == name) return i;
  return out.event_log.size();
}

}  // namespace

TEST_CASE("branch codec: pinned examples and round-trip property") {
  auto encoded = encode_branch(0x1000, 0x20000);
  REQUIRE(encoded.has_value());
  CHECK(decode_branch(*encoded, 0x1000) == 0x20000u);
  // offset arithmetic: (0x20000 - 0x1000 - 8) / 4
  CHECK((*encoded & 0x00FFFFFF) == 0x7BFEu);
  CHECK((*encoded >> 24) == 0xEAu);

  CHECK_FALSE(decode_branch(0x00000000, 0x1000).has_value());
  CHECK_FALSE(decode_branch(0xE1A00000, 0x1000).has_value());  // mov r0, r0
  // bl is accepted too: 0 + 8 + 4*0xFE
  CHECK(decode_branch(0xEB0000FE, 0x0) == 0x400u);

  auto rng = SeededRng::from_seed(700);
  for (int trial = 0; trial < 1000; ++trial) {
    uint32_t pc = static_cast<uint32_t>(rng.below(fw::kDefaultSramSize)) & ~3u;
    uint32_t target = static_cast<uint32_t>(rng.below(fw::kDefaultSramSize)) & ~3u;
    auto word = encode_branch(pc, target);
    REQUIRE(word.has_value());
    REQUIRE(decode_branch(*word, pc) == target);
  }
  // unencodable displacements
  CHECK_FALSE(encode_branch(0, 2).has_value());               // misaligned
  CHECK_FALSE(encode_branch(0, 0x4000000 + 8).has_value());   // out of range
}

TEST_CASE("pristine boot: full chain, no code exec, oracle-equal vcek seed") {
  World w;
  FlashBuildSpec spec{fw::AuthScheme::Zen3Milan, 4, 10, 44, true};
  auto flash = build_standard_flash(w.platform, spec);
  auto out = boot::boot(w.fuses, flash, w.config);

  CHECK(out.stage == BootStage::FullBoot);
  CHECK(out.x86_boot_ok);
  CHECK_FALSE(out.code_exec_event.has_value());
  CHECK(out.executed_entry == fw::EntryType::PrimaryBl);
  CHECK(out.bl_svn == 4);
  CHECK(out.sevfw_svn == 10);
  CHECK(out.ucode_svn == 44);

  REQUIRE(out.derived_vcek_seed.has_value());
  CHECK(*out.derived_vcek_seed == oracles::ref_tcb_seed(w.root_seed, {4, 10, 44}));

  // handoff carries the layer-1 material, never the root
  REQUIRE(out.handoff.has_value());
  CHECK(out.handoff->layer1_seed == oracles::ref_layer(w.root_seed, 4).layer_seed);
  REQUIRE(out.handoff->rollback_seed.has_value());
  CHECK(*out.handoff->rollback_seed == *oracles::ref_layer(w.root_seed, 4).rollback);

  // latch precedes any module copy in the event log
  CHECK(event_index(out, "latch_engaged") < event_index(out, "module_copied"));
  CHECK(w.fuses.latch_engaged());
}

TEST_CASE("pristine boot works identically for plaintext firmware") {
  World w;
  FlashBuildSpec spec{fw::AuthScheme::Zen3Milan, 4, 10, 44, false};
  auto flash = build_standard_flash(w.platform, spec);
  auto out = boot::boot(w.fuses, flash, w.config);
  CHECK(out.stage == BootStage::FullBoot);
  REQUIRE(out.derived_vcek_seed.has_value());
  CHECK(*out.derived_vcek_seed == oracles::ref_tcb_seed(w.root_seed, {4, 10, 44}));
}

TEST_CASE("svn=0 executed module hands off no rollback seed") {
  World w;
  FlashBuildSpec spec{fw::AuthScheme::Zen3Milan, 0, 10, 44, false};
  auto flash = build_standard_flash(w.platform, spec);
  auto out = boot::boot(w.fuses, flash, w.config);
  REQUIRE(out.handoff.has_value());
  CHECK_FALSE(out.handoff->rollback_seed.has_value());
}

TEST_CASE("unsigned flash is not bootable") {
  World w;
  fw::FirmwareModule m;
  m.svn = 1;
  m.load_addr = 0x1000;
  m.body = SeededRng::from_seed(701).bytes(64);
  m.image_size = 64;
  m.signed_size = 64;
  m.signature.assign(fw::kSignatureBytes, 0);
  m.pubkey_modulus.assign(512, 0);
  fw::FlashImageBuilder builder;
  builder.add(fw::EntryType::PrimaryBl, as_view(m.to_bytes()));
  auto flash = builder.build();

  auto out = boot::boot(w.fuses, flash, w.config);
  CHECK(out.stage == BootStage::NoBootable);
  CHECK_FALSE(out.handoff.has_value());
  CHECK_FALSE(out.x86_boot_ok);
}

TEST_CASE("fuse redundancy: corrected seed boots with the original value") {
  World w(fw::AuthScheme::Zen3Milan, /*redundancy=*/true);
  FlashBuildSpec spec{fw::AuthScheme::Zen3Milan, 4, 10, 44, true};
  auto flash = build_standard_flash(w.platform, spec);

  // flip one clear seed bit through the burner
  for (uint32_t bit = 0; bit < 256; ++bit) {
    if (((w.root_seed[bit / 8] >> (bit % 8)) & 1) == 0) {
      REQUIRE(w.fuses.program_fuse_bit(fuse::kVcekSeed.offset * 8 + bit) ==
              fuse::BurnResult::Ok);
      break;
    }
  }
  auto out = boot::boot(w.fuses, flash, w.config);
  CHECK(out.stage == BootStage::FullBoot);
  REQUIRE(out.derived_vcek_seed.has_value());
  // correction means the chain still starts from the factory seed
  CHECK(*out.derived_vcek_seed == oracles::ref_tcb_seed(w.root_seed, {4, 10, 44}));

  SUBCASE("a second flip in the same byte aborts the boot") {
    w.fuses.cold_power_cycle();
    int flipped = 0;
    for (uint32_t bit = 0; bit < 256 && flipped < 2; ++bit) {
      if (((w.root_seed[bit / 8] >> (bit % 8)) & 1) == 0 && bit / 8 == 0) {
        w.fuses.program_fuse_bit(fuse::kVcekSeed.offset * 8 + bit);
        ++flipped;
      }
    }
    if (flipped == 2) {
      auto aborted = boot::boot(w.fuses, flash, w.config);
      CHECK(aborted.stage == BootStage::FuseAbort);
      CHECK_FALSE(aborted.handoff.has_value());
    }
  }
}

TEST_CASE("custom_pk fuses displace the built-in root of trust") {
  World w;
  auto attacker_rng = SeededRng::from_seed(702).fork("attacker");
  auto attacker = crypto::rsa4096_generate(attacker_rng);
  auto attacker_flash =
      attack::build_attacker_flash(attacker, fw::AuthScheme::Zen3Milan, 255,
                                   attack::kExfilPayloadId);

  // before the burn: rejected (digest mismatch against the builtin root)
  auto before = boot::boot(w.fuses, attacker_flash, w.config);
  CHECK(before.stage == BootStage::NoBootable);

  // provision the attacker digest with full redundancy, as the attack does
  w.fuses.cold_power_cycle();
  auto digest = crypto::sha384(as_view(attacker.public_encoding()));
  REQUIRE(w.fuses.provision_with_redundancy(fuse::FuseRegion::CustomPk, as_view(digest),
                                            true, true) == fuse::BurnResult::Ok);

  boot::PayloadRegistry hooks;
  hooks[attack::kExfilPayloadId] = attack::make_exfil_payload();
  auto after = boot::boot(w.fuses, attacker_flash, w.config, hooks);
  CHECK(after.stage == BootStage::FullBoot);
  CHECK(after.executed_entry == fw::EntryType::PrimaryBl);
  CHECK(after.bl_svn == 255);
  REQUIRE(after.code_exec_event.has_value());
  CHECK(after.code_exec_event->attacker_controlled);

  // vendor-signed firmware is now the one that fails
  auto vendor_flash =
      build_standard_flash(w.platform, {fw::AuthScheme::Zen3Milan, 4, 10, 44, false});
  w.fuses.cold_power_cycle();
  auto vendor_out = boot::boot(w.fuses, vendor_flash, w.config);
  CHECK(vendor_out.stage == BootStage::NoBootable);
}

TEST_CASE("attack image boot: stale sram, code exec at the descriptor, clean x86 boot") {
  World w;
  auto legacy = build_legacy_flash(w.platform, fw::AuthScheme::Zen3Milan);
  auto recovery = legacy.module(fw::EntryType::RecoveryBl);
  REQUIRE(recovery.has_value());

  // exact collision via a 12-bit search continued to a usable landing
  boot::PayloadRegistry hooks;
  Bytes stale_copy;
  Bytes payload_body_seen;
  hooks[attack::kExfilPayloadId] = [&](PayloadContext& ctx) {
    attack::make_exfil_payload()(ctx);
    auto primary_size = 0u;  // read back the stale primary region
    (void)primary_size;
    stale_copy = ctx.read_sram(fw::kAttackLoadAddr, 64);
    payload_body_seen.assign(ctx.payload_body().begin(), ctx.payload_body().end());
  };

  Bytes payload_marker = {0x11, 0x22, 0x33, 0x44};
  auto run = attack::run_milanlaunchy(w.fuses, legacy, w.config, 12, kSeed,
                                      attack::kExfilPayloadId, hooks,
                                      as_view(payload_marker));
  REQUIRE(run.success);
  REQUIRE(run.outcome.code_exec_event.has_value());
  CHECK(run.outcome.code_exec_event->branch_target == fw::kAttackLoadAddr);
  CHECK(run.outcome.code_exec_event->attacker_controlled);
  CHECK(run.outcome.executed_entry == fw::EntryType::RecoveryBl);
  CHECK(run.outcome.bl_svn == kLegacyBlSvn);
  CHECK(run.outcome.x86_boot_ok);
  CHECK(run.outcome.stage == BootStage::FullBoot);

  // stale-SRAM invariant: the failed primary's body is still there,
  // byte-for-byte, when the payload runs
  auto primary = run.image.module(fw::EntryType::PrimaryBl);
  REQUIRE(primary.has_value());
  REQUIRE(stale_copy.size() == 64);
  CHECK(std::equal(stale_copy.begin(), stale_copy.end(), primary->body.begin()));

  // the payload body view starts right after the descriptor
  REQUIRE(payload_body_seen.size() >= payload_marker.size());
  CHECK(std::equal(payload_marker.begin(), payload_marker.end(),
                   payload_body_seen.begin()));

  // attacker-controlled exec implies a descriptor at the branch target
  CHECK(std::memcmp(primary->body.data(), fw::kPayloadMagic, 8) == 0);

  // handoff is tied to the executed (legacy) svn
  REQUIRE(run.outcome.handoff.has_value());
  CHECK(run.outcome.handoff->layer1_seed ==
        oracles::ref_layer(w.root_seed, kLegacyBlSvn).layer_seed);
}

TEST_CASE("latch soundness: payload never reads a nonzero secret-window octet") {
  World w;
  auto legacy = build_legacy_flash(w.platform, fw::AuthScheme::Zen3Milan);

  boot::PayloadRegistry hooks;
  bool saw_nonzero = false;
  hooks[attack::kExfilPayloadId] = [&](PayloadContext& ctx) {
    for (uint32_t off = 0; off < fuse::kRegionSize; off += 4) {
      auto v = ctx.mmio_read(fuse::kRegionBase + off);
      if (v && *v != 0) saw_nonzero = true;
    }
  };
  auto run = attack::run_milanlaunchy(w.fuses, legacy, w.config, 12, kSeed,
                                      attack::kExfilPayloadId, hooks);
  REQUIRE(run.success);
  CHECK_FALSE(saw_nonzero);

  // the event log records the payload's secret-window reads as zeros
  size_t reads = 0;
  for (const auto& e : run.outcome.event_log) {
    if (e.name == "payload_mmio_read") {
      ++reads;
      CHECK(e.detail["value"] == 0);
    }
  }
  CHECK(reads == fuse::kRegionSize / 4);
}

TEST_CASE("scheme matrix at boot level: the collision image only works on zen3") {
  for (auto arch : {fw::AuthScheme::Zen1, fw::AuthScheme::Zen3Milan, fw::AuthScheme::Zen45}) {
    World w(arch);
    auto legacy = build_legacy_flash(w.platform, arch);
    boot::PayloadRegistry hooks;
    hooks[attack::kExfilPayloadId] = attack::make_exfil_payload();
    auto run = attack::run_milanlaunchy(w.fuses, legacy, w.config, 12, kSeed,
                                        attack::kExfilPayloadId, hooks);
    CAPTURE(to_string(arch));
    if (arch == fw::AuthScheme::Zen3Milan) {
      CHECK(run.success);
    } else {
      CHECK_FALSE(run.success);
      CHECK_FALSE(run.outcome.code_exec_event.has_value());
      CHECK(run.outcome.stage == BootStage::NoBootable);
    }
  }
}

TEST_CASE("payload can skip sev firmware verification") {
  World w;
  auto legacy = build_legacy_flash(w.platform, fw::AuthScheme::Zen3Milan);

  // craft an image that also carries an unsigned sev_fw entry
  auto recovery = legacy.module(fw::EntryType::RecoveryBl);
  REQUIRE(recovery.has_value());

  boot::PayloadRegistry hooks;
  hooks[attack::kExfilPayloadId] = [](PayloadContext& ctx) {
    ctx.set_skip_sevfw_verification();
    ctx.request_reboot();
  };
  auto run = attack::run_milanlaunchy(w.fuses, legacy, w.config, 12, kSeed,
                                      attack::kExfilPayloadId, hooks);
  REQUIRE(run.success);

  fw::FirmwareModule rogue;
  rogue.svn = 99;
  rogue.load_addr = 0x40000;
  rogue.body = SeededRng::from_seed(703).bytes(128);
  rogue.image_size = 128;
  rogue.signed_size = 128;
  rogue.signature.assign(fw::kSignatureBytes, 0);
  rogue.pubkey_modulus.assign(512, 0);

  fw::FlashImageBuilder builder;
  for (const auto& e : run.image.entries)
    builder.add(static_cast<fw::EntryType>(e.type), run.image.entry_bytes(e));
  builder.add(fw::EntryType::SevFw, as_view(rogue.to_bytes()));
  auto with_rogue = builder.build();

  w.fuses.cold_power_cycle();
  auto out = boot::boot(w.fuses, with_rogue, w.config, hooks);
  REQUIRE(out.code_exec_event.has_value());
  // unsigned sev firmware sailed through because the payload hooked the check
  CHECK(out.sevfw_svn == 99);
  CHECK(out.stage == BootStage::FullBoot);
  CHECK(out.reboot_requested);

  // without the hook it fails
  w.fuses.cold_power_cycle();
  boot::PayloadRegistry noop_hooks;
  noop_hooks[attack::kExfilPayloadId] = [](PayloadContext&) {};
  auto out2 = boot::boot(w.fuses, with_rogue, w.config, noop_hooks);
  REQUIRE(out2.code_exec_event.has_value());
  CHECK(out2.stage == BootStage::BootloaderRunning);
  CHECK_FALSE(out2.x86_boot_ok);
}

TEST_CASE("boot outcome serializes to json with the event log") {
  World w;
  auto flash = build_standard_flash(w.platform, {fw::AuthScheme::Zen3Milan, 4, 10, 44, true});
  auto out = boot::boot(w.fuses, flash, w.config);
  auto j = out.to_json();
  CHECK(j["stage"] == "FullBoot");
  CHECK(j["x86_boot_ok"] == true);
  CHECK(j["svns"]["bl_svn"] == 4);
  CHECK(j["event_log"].is_array());
  CHECK(j["event_log"].size() == out.event_log.size());
  // ndjson export: one line per event
  auto nd = out.event_log_ndjson();
  CHECK(std::count(nd.begin(), nd.end(), '\n') == static_cast<long>(out.event_log.size()));
  // redacted form drops seed material
  auto public_json = out.to_json(false);
  CHECK_FALSE(public_json.contains("handoff"));
  CHECK_FALSE(public_json.contains("derived_vcek_seed"));
}
