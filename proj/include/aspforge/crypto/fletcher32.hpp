// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "aspforge/bytes.hpp"

namespace aspforge::crypto {

/// Fletcher-32 over 16-bit little-endian words, both accumulators starting
/// at zero and reduced modulo 65535; odd-length input is padded with one
/// zero octet. Result is (c1 << 16) | c0.
uint32_t fletcher32(BytesView data);

}  // namespace aspforge::crypto
