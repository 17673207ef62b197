#pragma once

#include <cstddef>

namespace sqlfix::simd {

enum class Isa { Scalar, Avx2, Neon };

const char* isa_name(Isa isa);

// ISA selected at process start: the widest supported one, unless the
// SQLFIX_SIMD environment variable ("scalar", "avx2", "neon") overrides it.
Isa active_isa();

// Test hook; falls back to Scalar when the requested ISA is unsupported.
void force_isa(Isa isa);

// Scalar reference kernels. These are the semantics the vector variants are
// equivalence-tested against.
float dot_scalar(const float* a, const float* b, size_t n);
float norm2_scalar(const float* a, size_t n);

#if defined(__x86_64__) || defined(_M_X64)
float dot_avx2(const float* a, const float* b, size_t n);
float norm2_avx2(const float* a, size_t n);
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
float dot_neon(const float* a, const float* b, size_t n);
float norm2_neon(const float* a, size_t n);
#endif

// Dispatched entry points used by the retrieval scan.
float dot(const float* a, const float* b, size_t n);
float norm2(const float* a, size_t n);

// scores[i] = dot(query, rows + i*n) for i in [0, count). Row-major matrix
// of `count` vectors of length n.
void dot_batch(const float* query, const float* rows, size_t count, size_t n,
               float* scores);

}  // namespace sqlfix::simd
