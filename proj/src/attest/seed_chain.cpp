// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/attest/seed_chain.hpp"

#include "aspforge/crypto/sha256.hpp"

namespace aspforge::attest {

namespace {

Seed32 hash_once(const Seed32& in) { return crypto::sha256(as_view(in)); }

Seed32 padded_hash(const Seed32& in) {
  Bytes buf;
  append(buf, as_view(kSeedPad));
  append(buf, as_view(in));
  return crypto::sha256(as_view(buf));
}

}  // namespace

LayerDerivation derive_layer_seed(const Seed32& input_seed, uint8_t cur) {
  Seed32 tmp = input_seed;  // TmpSeed_255
  for (int i = 255; i > cur; --i) tmp = hash_once(tmp);
  // tmp is TmpSeed_cur
  LayerDerivation out;
  out.layer_seed = padded_hash(tmp);
  if (cur >= 1) out.rollback_seed = hash_once(tmp);  // TmpSeed_{cur-1}
  return out;
}

Seed32 derive_tcb_seed(const Seed32& root, const TcbVersion& tcb) {
  Seed32 layer1 = derive_layer_seed(root, tcb.bl_svn).layer_seed;
  Seed32 layer2 = derive_layer_seed(layer1, tcb.sevfw_svn).layer_seed;
  return derive_layer_seed(layer2, tcb.ucode_svn).layer_seed;
}

Seed32 chain_lower_layers(const Seed32& layer_seed, std::span<const uint8_t> svns) {
  Seed32 seed = layer_seed;
  for (uint8_t svn : svns) seed = derive_layer_seed(seed, svn).layer_seed;
  return seed;
}

std::optional<Seed32> derive_from_rollback(const Seed32& rollback_at_cur, uint8_t cur,
                                           uint8_t target_svn,
                                           std::span<const uint8_t> remaining_svns) {
  if (target_svn >= cur) return std::nullopt;
  Seed32 tmp = rollback_at_cur;  // TmpSeed_{cur-1}
  for (int i = cur - 1; i > target_svn; --i) tmp = hash_once(tmp);
  Seed32 layer = padded_hash(tmp);
  return chain_lower_layers(layer, remaining_svns);
}

}  // namespace aspforge::attest
