// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aspforge/bytes.hpp"
#include "aspforge/crypto/sha256.hpp"
#include "aspforge/crypto/sha384.hpp"

namespace aspforge::crypto {

enum class HashAlg { Sha256, Sha384 };

struct Digest {
  HashAlg algorithm;
  Bytes bytes;  // 32 or 48 octets, matching the algorithm
};

inline Digest hash(HashAlg alg, BytesView message) {
  if (alg == HashAlg::Sha256) {
    auto d = sha256(message);
    return {alg, Bytes(d.begin(), d.end())};
  }
  auto d = sha384(message);
  return {alg, Bytes(d.begin(), d.end())};
}

}  // namespace aspforge::crypto
