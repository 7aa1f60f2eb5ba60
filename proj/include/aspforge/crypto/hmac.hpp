// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "aspforge/bytes.hpp"

namespace aspforge::crypto {

std::array<uint8_t, 32> hmac_sha256(BytesView key, BytesView message);
std::array<uint8_t, 48> hmac_sha384(BytesView key, BytesView message);

/// Recompute-and-compare with a full-length scan.
bool hmac_sha256_verify(BytesView key, BytesView message, BytesView tag);

}  // namespace aspforge::crypto
