#include "sqlfix/simd/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace sqlfix::simd {

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "?";
}

float dot_scalar(const float* a, const float* b, size_t n) {
  float acc = 0.0f;
  for (size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

float norm2_scalar(const float* a, size_t n) {
  float acc = 0.0f;
  for (size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return std::sqrt(acc);
}

namespace {

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__) || defined(__ARM_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() {
  if (const char* env = std::getenv("SQLFIX_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::Scalar;
    if (std::strcmp(env, "avx2") == 0 && isa_supported(Isa::Avx2))
      return Isa::Avx2;
    if (std::strcmp(env, "neon") == 0 && isa_supported(Isa::Neon))
      return Isa::Neon;
    return Isa::Scalar;
  }
  if (isa_supported(Isa::Avx2)) return Isa::Avx2;
  if (isa_supported(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa g_isa = detect_isa();

}  // namespace

Isa active_isa() { return g_isa; }

void force_isa(Isa isa) { g_isa = isa_supported(isa) ? isa : Isa::Scalar; }

float dot(const float* a, const float* b, size_t n) {
  switch (g_isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2:
      return dot_avx2(a, b, n);
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
    case Isa::Neon:
      return dot_neon(a, b, n);
#endif
    default:
      return dot_scalar(a, b, n);
  }
}

float norm2(const float* a, size_t n) {
  switch (g_isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2:
      return norm2_avx2(a, n);
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
    case Isa::Neon:
      return norm2_neon(a, n);
#endif
    default:
      return norm2_scalar(a, n);
  }
}

void dot_batch(const float* query, const float* rows, size_t count, size_t n,
               float* scores) {
  for (size_t i = 0; i < count; ++i)
    scores[i] = dot(query, rows + i * n, n);
}

}  // namespace sqlfix::simd
