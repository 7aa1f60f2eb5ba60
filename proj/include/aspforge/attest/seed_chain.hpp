// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "aspforge/bytes.hpp"

namespace aspforge::attest {

using Seed32 = std::array<uint8_t, 32>;

/// Zero padding prepended on the cross-layer hash so the layer seed is
/// domain-separated from the versioning chain. One place to change if the
/// pad encoding ever needs to differ.
inline constexpr std::array<uint8_t, 8> kSeedPad{};

struct TcbVersion {
  uint8_t bl_svn = 0;
  uint8_t sevfw_svn = 0;
  uint8_t ucode_svn = 0;

  bool operator==(const TcbVersion&) const = default;
};

struct LayerDerivation {
  Seed32 layer_seed{};
  /// TmpSeed_{cur-1}, handed down for TCB-rollback support; absent at cur 0.
  std::optional<Seed32> rollback_seed;
};

/// One layer of the per-layer derivation: walk the hashstick from index 255
/// down to cur, then output Hash(pad || TmpSeed_cur).
LayerDerivation derive_layer_seed(const Seed32& input_seed, uint8_t cur);

/// Chains the three SVN-bearing layers; the result is the VCEK seed.
Seed32 derive_tcb_seed(const Seed32& root, const TcbVersion& tcb);

/// Continues a layer seed through the remaining lower layers.
Seed32 chain_lower_layers(const Seed32& layer_seed, std::span<const uint8_t> svns);

/// Walks a rollback seed (TmpSeed_{cur-1}) down to target_svn < cur and
/// chains the lower layers. Equals direct derivation whenever the rollback
/// seed was honestly produced. Returns nothing when target_svn >= cur.
std::optional<Seed32> derive_from_rollback(const Seed32& rollback_at_cur, uint8_t cur,
                                           uint8_t target_svn,
                                           std::span<const uint8_t> remaining_svns);

}  // namespace aspforge::attest
