#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kgmotive/graph.hpp"
#include "kgmotive/matcher.hpp"
#include "kgmotive/motifcode.hpp"
#include "kgmotive/pattern.hpp"
#include "kgmotive/rng.hpp"
#include "kgmotive/types.hpp"

namespace kgmotive::synth {

// Raised when a bounded sampling loop cannot realize the requested structure
// (e.g. k planted instances whose triples keep colliding with themselves).
struct injection_error : error {
    using error::error;
};

// Dimensions of a uniform random knowledge graph plus the number of pattern
// instances to plant into it.
struct SynthSpec {
    uint64_t n = 0;        // nodes
    uint64_t m = 0;        // edges
    uint32_t r = 1;        // relations
    uint64_t k = 0;        // injected instance count
    uint64_t rng_seed = 0; // integer seed
};

// G(n, m) digraph without self-loops or repeated (s, o) pairs, each edge
// labeled with a uniform relation. Throws contract_error when m > n(n-1).
graph::KnowledgeGraph sample_er_kg(const SynthSpec& spec, Rng& rng);

// Random connected pattern over the graph's vocabulary: node count from
// U(3, 6), edge count from U(n, n^2 - n), then U(0, n) nodes and U(0, m)
// links turned into variables. Disconnected or duplicate-edge draws are
// rejected; a bounded attempt count guards the loop.
pattern::Pattern sample_pattern(const graph::KnowledgeGraph& g, Rng& rng);

// Plants k sampled instances of m into g: variable nodes bound uniformly
// without repetition inside one instance, variable relations bound uniformly;
// missing triples are added (collisions with existing triples deduplicate).
// Returns the grown graph and the planted instances.
std::pair<graph::KnowledgeGraph, std::vector<pattern::Instance>>
inject(const graph::KnowledgeGraph& g, const pattern::Pattern& m, uint64_t k, Rng& rng);

// One sampled pattern planted k times into `base`. A sampled pattern can be
// unplantable (e.g. more parallel variable-relation edges between two nodes
// than distinct labels exist); such draws are rejected and resampled like any
// other, a bounded number of times.
struct PlantedPattern {
    graph::KnowledgeGraph graph; // base plus the planted triples
    pattern::Pattern pattern;
    std::vector<pattern::Instance> instances;
};
PlantedPattern sample_planted(const graph::KnowledgeGraph& base, uint64_t k, Rng& rng);

// One measurement of the repeated-injection protocol.
struct InjectionRow {
    uint64_t k = 0;
    uint64_t repeat = 0;
    uint64_t frequency = 0; // pruned instance count of the planted pattern
    Bits log_factor = 0.0;
};

// For each k and repeat: fresh graph, fresh pattern, injection, then a single
// direct score of the planted pattern (no annealing). `dims` supplies n/m/r;
// its k field is ignored in favor of `k_values`.
std::vector<InjectionRow> run_injection_experiment(
    const SynthSpec& dims, const std::vector<uint64_t>& k_values, uint64_t repeats,
    uint64_t rng_seed, const matcher::MatchBudget& budget = matcher::MatchBudget{},
    const codes::PitmanYorConfig& py = {});

} // namespace kgmotive::synth
