#include "kgmotive/kernels.hpp"

#include <cmath>
#include <vector>

namespace kgmotive::kernels {

namespace {

constexpr size_t kTableSize = 1u << 16;

// ln(2) with long-double precision; the table is built through lgammal so
// each entry carries an independent rounding error instead of a cumulative one.
const long double kInvLn2 = 1.0L / 0.6931471805599453094172321214581766L;

std::vector<double>& table_storage() {
    static std::vector<double> table = [] {
        std::vector<double> t(kTableSize);
        t[0] = 0.0;
        for (size_t n = 1; n < kTableSize; ++n)
            t[n] = double(lgammal((long double)n + 1.0L) * kInvLn2);
        return t;
    }();
    return table;
}

} // namespace

std::span<const double> log2_factorial_table() {
    const auto& t = table_storage();
    return {t.data(), t.size()};
}

double log2_factorial(uint64_t n) {
    const auto& t = table_storage();
    if (n < t.size()) return t[n];
    return double(lgammal((long double)n + 1.0L) * kInvLn2);
}

double sum_log2_factorial_scalar(std::span<const uint32_t> xs) {
    const auto& t = table_storage();
    double acc = 0.0;
    for (uint32_t x : xs) {
        acc += x < t.size() ? t[x] : log2_factorial(x);
    }
    return acc;
}

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

namespace {

using SumFn = double (*)(std::span<const uint32_t>);

SumFn resolve_sum() {
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_avx2()) return &sum_log2_factorial_avx2;
#endif
    return &sum_log2_factorial_scalar;
}

const SumFn kSumImpl = resolve_sum();

} // namespace

double sum_log2_factorial(std::span<const uint32_t> xs) {
    return kSumImpl(xs);
}

const char* active_implementation() {
    return kSumImpl == &sum_log2_factorial_scalar ? "scalar" : "avx2";
}

} // namespace kgmotive::kernels
