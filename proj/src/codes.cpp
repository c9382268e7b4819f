#include "kgmotive/codes.hpp"

#include <cmath>
#include <unordered_map>

namespace kgmotive::codes {

Bits length_pos_int(uint64_t n) {
    require(n >= 1, "length_pos_int requires n >= 1");
    return std::log2(double(n)) + std::log2(double(n) + 1.0);
}

Bits length_nonneg_int(uint64_t n) {
    return length_pos_int(n + 1);
}

Bits length_int(int64_t z) {
    if (z < 0) return 1.0 + length_pos_int(uint64_t(-z));
    return 1.0 + length_nonneg_int(uint64_t(z));
}

namespace {

// Header shared by both Pitman-Yor implementations: sequence length,
// vocabulary size, then the vocabulary in first-occurrence order (first
// member absolute, the rest as signed gaps).
Bits vocabulary_bits(size_t length, std::span<const uint32_t> first_seen) {
    Bits total = length_nonneg_int(length) + length_nonneg_int(first_seen.size());
    for (size_t i = 0; i < first_seen.size(); ++i) {
        if (i == 0) {
            total += length_nonneg_int(first_seen[0]);
        } else {
            total += length_int(int64_t(first_seen[i]) - int64_t(first_seen[i - 1]));
        }
    }
    return total;
}

} // namespace

Bits pitman_yor_length(std::span<const uint32_t> seq, PitmanYorConfig cfg) {
    require(cfg.valid(), "invalid Pitman-Yor config");
    const double alpha = cfg.alpha;
    const double d = cfg.discount;

    std::unordered_map<uint32_t, uint32_t> freq;
    std::vector<uint32_t> first_seen;
    Bits sequence_cost = 0.0;
    size_t n_prev = 0;
    for (uint32_t symbol : seq) {
        uint32_t& f = freq[symbol];
        double p;
        if (f == 0) {
            p = (alpha + d * double(first_seen.size())) / (double(n_prev) + alpha);
            first_seen.push_back(symbol);
        } else {
            p = (double(f) - d) / (double(n_prev) + alpha);
        }
        sequence_cost -= std::log2(p);
        ++f;
        ++n_prev;
    }
    return vocabulary_bits(seq.size(), first_seen) + sequence_cost;
}

PitmanYorEvaluator::PitmanYorEvaluator(PitmanYorConfig cfg) : cfg_(cfg) {
    require(cfg_.valid(), "invalid Pitman-Yor config");
    prefix_denominator_.push_back(0.0);
    prefix_new_.push_back(0.0);
    prefix_repeat_.push_back(0.0); // frequency 0 is unused but keeps indexing direct
    prefix_repeat_.push_back(0.0); // a symbol with frequency 1 earns no repeat credit
}

void PitmanYorEvaluator::grow_tables(size_t length_needed) {
    while (prefix_denominator_.size() <= length_needed) {
        const double j = double(prefix_denominator_.size() - 1);
        prefix_denominator_.push_back(prefix_denominator_.back() + std::log2(j + cfg_.alpha));
        prefix_new_.push_back(prefix_new_.back() + std::log2(cfg_.alpha + cfg_.discount * j));
        prefix_repeat_.push_back(prefix_repeat_.back() + std::log2(j + 1.0 - cfg_.discount));
    }
}

Bits PitmanYorEvaluator::length(std::span<const uint32_t> seq) {
    grow_tables(seq.size());
    ++epoch_;
    first_seen_.clear();

    uint32_t max_symbol = 0;
    for (uint32_t symbol : seq) max_symbol = std::max(max_symbol, symbol);
    if (count_.size() <= max_symbol) {
        count_.resize(size_t(max_symbol) + 1, 0);
        stamp_.resize(size_t(max_symbol) + 1, 0);
    }

    for (uint32_t symbol : seq) {
        if (stamp_[symbol] != epoch_) {
            stamp_[symbol] = epoch_;
            count_[symbol] = 0;
            first_seen_.push_back(symbol);
        }
        ++count_[symbol];
    }

    // Exchangeability: -log2 P(seq) = sum of denominator logs minus the
    // new-symbol and repeat numerator logs, independent of symbol order.
    Bits sequence_cost = prefix_denominator_[seq.size()] - prefix_new_[first_seen_.size()];
    for (uint32_t symbol : first_seen_) sequence_cost -= prefix_repeat_[count_[symbol]];

    return vocabulary_bits(seq.size(), first_seen_) + sequence_cost;
}

} // namespace kgmotive::codes
