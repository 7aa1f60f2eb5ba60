// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aspforge/bytes.hpp"

namespace aspforge::crypto {

inline constexpr size_t kP384ScalarBytes = 48;
inline constexpr size_t kP384PointBytes = 97;      // uncompressed SEC1
inline constexpr size_t kEcdsaSignatureBytes = 96;  // r || s, 48-byte BE each

/// ECDSA P-384 keypair for attestation and mock-KDS signatures.
struct EcdsaP384KeyPair {
  Bytes public_point;  // 97 bytes, 0x04 || X || Y
  Bytes private_scalar;  // 48 bytes BE; empty for public-only

  bool has_private() const { return !private_scalar.empty(); }
};

/// Deterministic keypair: scalar = (SHA-384(label || seed) mod (n-1)) + 1.
EcdsaP384KeyPair ecdsa_keypair_from_seed(BytesView seed32, BytesView label);

/// SHA-384 message digest, RFC 6979 deterministic nonce.
Bytes ecdsa_p384_sha384_sign(const EcdsaP384KeyPair& key, BytesView message);

/// Returns false (never throws) on any malformed input.
bool ecdsa_p384_sha384_verify(BytesView public_point, BytesView message,
                              BytesView signature);

}  // namespace aspforge::crypto
