// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace aspforge::crypto {

struct CpuFeatures {
  bool aesni = false;  // AES-NI + SSE2
  bool shani = false;  // SHA extensions + SSE4.1
};

const CpuFeatures& cpu_features();

// Kernel backend selection. Auto picks the best variant the CPU supports;
// Scalar forces the reference implementation (used by the equivalence tests).
enum class Backend { Auto, Scalar, Simd };

void set_aes_backend(Backend b);
void set_sha256_backend(Backend b);

const char* active_aes_backend();
const char* active_sha256_backend();

}  // namespace aspforge::crypto
