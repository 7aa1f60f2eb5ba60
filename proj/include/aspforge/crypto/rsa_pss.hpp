// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "aspforge/bytes.hpp"
#include "aspforge/rng.hpp"

namespace aspforge::crypto {

inline constexpr size_t kRsaModulusBytes = 512;  // 4096-bit modulus
inline constexpr uint32_t kRsaPublicExponent = 65537;

/// RSA-4096 keypair for RSA-PSS-SHA384 firmware signatures. Private CRT
/// components are empty for public-only keys.
struct RsaKeyPair {
  Bytes n;  // big-endian, kRsaModulusBytes long
  uint32_t e = kRsaPublicExponent;
  Bytes d, p, q, dp, dq, qinv;

  bool has_private() const { return !d.empty(); }
  RsaKeyPair public_only() const { return RsaKeyPair{n, e, {}, {}, {}, {}, {}, {}}; }

  /// Fixed-length encoding hashed into Custom_PK: modulus || exponent (BE).
  Bytes public_encoding() const;
};

/// Deterministic keypair generation: prime candidates come from the caller's
/// seeded stream, so a given rng state always yields the same key.
RsaKeyPair rsa4096_generate(SeededRng& rng);

/// EMSA-PSS with SHA-384, MGF1-SHA384, salt length = digest length. The salt
/// is derived from the message hash so signing is reproducible; verifiers
/// recover the salt from the encoding as usual.
Bytes rsa_pss_sha384_sign(const RsaKeyPair& key, BytesView message);

/// Returns false (never throws) for malformed signatures.
bool rsa_pss_sha384_verify(const RsaKeyPair& key, BytesView message, BytesView signature);

}  // namespace aspforge::crypto
