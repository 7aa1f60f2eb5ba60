// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/crypto/hmac.hpp"

#include "aspforge/crypto/sha256.hpp"
#include "aspforge/crypto/sha384.hpp"

namespace aspforge::crypto {

namespace {

template <typename Hash, size_t DigestLen, size_t BlockLen>
std::array<uint8_t, DigestLen> hmac(BytesView key, BytesView message) {
  std::array<uint8_t, BlockLen> k{};
  if (key.size() > BlockLen) {
    auto d = Hash::digest(key);
    std::copy(d.begin(), d.end(), k.begin());
  } else {
    std::copy(key.begin(), key.end(), k.begin());
  }

  std::array<uint8_t, BlockLen> ipad, opad;
  for (size_t i = 0; i < BlockLen; ++i) {
    ipad[i] = k[i] ^ 0x36;
    opad[i] = k[i] ^ 0x5c;
  }

  Hash inner;
  inner.update(BytesView(ipad.data(), BlockLen));
  inner.update(message);
  auto inner_digest = inner.finish();

  Hash outer;
  outer.update(BytesView(opad.data(), BlockLen));
  outer.update(BytesView(inner_digest.data(), inner_digest.size()));
  return outer.finish();
}

}  // namespace

std::array<uint8_t, 32> hmac_sha256(BytesView key, BytesView message) {
  return hmac<Sha256, 32, 64>(key, message);
}

std::array<uint8_t, 48> hmac_sha384(BytesView key, BytesView message) {
  return hmac<Sha384, 48, 128>(key, message);
}

bool hmac_sha256_verify(BytesView key, BytesView message, BytesView tag) {
  auto expect = hmac_sha256(key, message);
  return ct_equal(BytesView(expect.data(), expect.size()), tag);
}

}  // namespace aspforge::crypto
