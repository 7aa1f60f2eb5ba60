// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include "aspforge/boot/bootrom.hpp"
#include "aspforge/firmware/build.hpp"

namespace aspforge::attack {

struct CollisionSearchSpec {
  crypto::Key128 bootrom_key{};
  crypto::Block16 wrapped_mek{};
  crypto::Block16 iv{};
  crypto::Block16 first_cipher_block{};
  uint32_t recovery_load_addr = 0;
  uint32_t branch_target = fw::kAttackLoadAddr;
  unsigned match_bits = 16;  // 0..=32; 32 pins the exact instruction word
  uint64_t rng_seed = 0;
  uint64_t trial_budget = 0;  // 0 -> 2^(match_bits+4)

  static CollisionSearchSpec from_recovery(const fw::FirmwareModule& recovery,
                                           const crypto::Key128& bootrom_key,
                                           unsigned match_bits, uint64_t rng_seed);
};

/// Deterministic counter-mode candidate stream: reproducible searches, and
/// the counter range can be split across workers (first hit wins) by
/// starting each worker at its own offset.
class CandidateStream {
 public:
  explicit CandidateStream(uint64_t rng_seed, uint64_t start_counter = 0);
  crypto::Key128 next();
  uint64_t drawn() const { return counter_; }

 private:
  crypto::Aes128 cipher_;
  uint64_t counter_ = 0;
};

/// Decrypted first word of the recovery body under a candidate IKEK.
uint32_t first_plain_word(const CollisionSearchSpec& spec, const crypto::Key128& ikek);

struct CollisionFound {
  crypto::Key128 ikek{};
  uint64_t trials = 0;
};

/// Scans the candidate stream for an IKEK whose misdecryption matches the
/// wanted branch word on the top match_bits bits. Empty on budget overrun.
std::optional<CollisionFound> milanlaunchy_search(const CollisionSearchSpec& spec);

struct MilanLaunchyRun {
  bool success = false;
  std::string failure;  // reason when !success
  crypto::Key128 ikek{};
  uint64_t trials = 0;
  uint32_t first_word = 0;
  uint32_t landing = 0;  // decoded target of the misdecrypted first word
  fw::FlashImage image;
  boot::BootOutcome outcome;
  nlohmann::json transcript;
};

/// End-to-end drive: resume the stream until a usable collision (full hit on
/// the descriptor, or a landing inside the trampoline window), craft the
/// image, and boot it once against the given fuses.
MilanLaunchyRun run_milanlaunchy(fuse::FuseArray& fuses,
                                 const fw::FlashImage& legacy_flash,
                                 const boot::BootRomConfig& config,
                                 unsigned match_bits, uint64_t rng_seed,
                                 uint32_t payload_id,
                                 const boot::PayloadRegistry& hooks,
                                 BytesView payload_body = {});

}  // namespace aspforge::attack
