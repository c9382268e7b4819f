#pragma once

#include <cstdint>
#include <span>

namespace kgmotive::kernels {

/// log2(n!) for a single value. Table-backed for n < 65536, log-gamma above.
double log2_factorial(uint64_t n);

/// Sum of log2(x!) over an integer array. This is the inner loop of every
/// edge-list codelength, so it has a SIMD variant selected at runtime.
double sum_log2_factorial(std::span<const uint32_t> xs);

/// Reference implementation, always available.
double sum_log2_factorial_scalar(std::span<const uint32_t> xs);

#if defined(__x86_64__) || defined(_M_X64)
/// AVX2 gather variant. Call only when cpu_has_avx2() is true.
double sum_log2_factorial_avx2(std::span<const uint32_t> xs);
#endif

bool cpu_has_avx2();

/// "avx2" or "scalar" — whichever sum_log2_factorial dispatches to.
const char* active_implementation();

/// Shared lookup table: entry n holds log2(n!), for n < size.
std::span<const double> log2_factorial_table();

} // namespace kgmotive::kernels
