#pragma once

// Prefix-free codelength primitives. Everything here returns ideal codelengths
// in bits (real-valued, never rounded up); nothing encodes actual bitstreams.

#include <cstdint>
#include <span>
#include <vector>

#include "kgmotive/kernels.hpp"
#include "kgmotive/types.hpp"

namespace kgmotive::codes {

using kernels::log2_factorial;

// Universal code for n >= 1 with p(n) = 1/(n(n+1)): log2(n) + log2(n+1).
Bits length_pos_int(uint64_t n);

// Same code shifted to cover 0: length_pos_int(n + 1).
Bits length_nonneg_int(uint64_t n);

// Sign bit plus magnitude; z = 0 takes the nonnegative branch (2.0 bits).
Bits length_int(int64_t z);

struct PitmanYorConfig {
    double alpha = 0.5;
    double discount = 0.1;

    // 0 <= d < 1 and alpha > -d keep every event probability positive.
    bool valid() const {
        return discount >= 0.0 && discount < 1.0 && alpha > -discount;
    }
};

// Total cost of a sequence of nonnegative symbols: a vocabulary header
// (sequence length, vocabulary size, first member, then signed gaps between
// members in first-occurrence order) plus the -log2 probability of the
// sequence under the two-parameter Chinese restaurant process. Reference
// implementation; PitmanYorEvaluator computes the same value faster.
Bits pitman_yor_length(std::span<const uint32_t> seq, PitmanYorConfig cfg = {});

// Reusable evaluator for tight scoring loops. The CRP sequence probability is
// exchangeable, so it only depends on symbol frequencies; we accumulate them
// with epoch-stamped counters (no per-call clearing) and read the per-event
// log terms from lazily grown prefix-sum tables.
class PitmanYorEvaluator {
public:
    explicit PitmanYorEvaluator(PitmanYorConfig cfg = {});

    Bits length(std::span<const uint32_t> seq);

    const PitmanYorConfig& config() const { return cfg_; }

private:
    void grow_tables(size_t length_needed);

    PitmanYorConfig cfg_;
    // prefix_denominator_[n] = sum_{j<n} log2(j + alpha): total denominator
    // cost of any length-n sequence.
    std::vector<double> prefix_denominator_;
    // prefix_new_[u] = sum_{t<u} log2(alpha + d*t): numerator credit for
    // introducing u distinct symbols.
    std::vector<double> prefix_new_;
    // prefix_repeat_[f] = sum_{1<=t<f} log2(t - d): numerator credit for a
    // symbol that ends with frequency f.
    std::vector<double> prefix_repeat_;

    std::vector<uint32_t> count_;
    std::vector<uint32_t> stamp_;
    uint32_t epoch_ = 0;
    std::vector<uint32_t> first_seen_;
};

} // namespace kgmotive::codes
