#include "kgmotive/nullmodel.hpp"

#include <cmath>
#include <numeric>
#include <unordered_map>

#include "kgmotive/kernels.hpp"

namespace kgmotive::nullmodel {

namespace {

uint64_t sum(const std::vector<uint32_t>& xs) {
    return std::accumulate(xs.begin(), xs.end(), uint64_t{0});
}

// -sum_i log2(count(x_i)/n) for one sequence, i.e. n times its empirical
// entropy; empty sequences cost nothing.
Bits empirical_bits(const std::vector<uint32_t>& xs) {
    if (xs.empty()) return 0.0;
    std::unordered_map<uint32_t, uint32_t> count;
    for (uint32_t x : xs) ++count[x];
    const double n = double(xs.size());
    Bits total = 0.0;
    for (const auto& [value, c] : count) total -= double(c) * std::log2(double(c) / n);
    return total;
}

} // namespace

Bits el_structure_bits(const DegreeSequence& d) {
    const uint64_t m = sum(d.rel);
    require(sum(d.in) == m && sum(d.out) == m, "inconsistent degree sequence");
    return 2.0 * kernels::log2_factorial(m) - kernels::sum_log2_factorial(d.in) -
           kernels::sum_log2_factorial(d.rel) - kernels::sum_log2_factorial(d.out);
}

Bits degree_bits_lowerbound(const DegreeSequence& d) {
    return empirical_bits(d.in) + empirical_bits(d.rel) + empirical_bits(d.out);
}

Bits degree_bits_fair(const DegreeSequence& d, PitmanYorConfig cfg) {
    return codes::pitman_yor_length(d.in, cfg) + codes::pitman_yor_length(d.rel, cfg) +
           codes::pitman_yor_length(d.out, cfg);
}

Bits null_bits(const KnowledgeGraph& g) {
    const DegreeSequence d = graph::degree_sequence(g);
    return codes::length_nonneg_int(g.v()) + codes::length_nonneg_int(g.r()) +
           degree_bits_lowerbound(d) + el_structure_bits(d);
}

} // namespace kgmotive::nullmodel
