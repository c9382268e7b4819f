#pragma once

// Instance enumeration for patterns: backtracking over pattern edges with
// candidate-set refinement, under edge-injective semantics (each pattern edge
// matches a distinct graph triple, node variables bind distinct nodes,
// relation variables bind freely).

#include <cstdint>
#include <optional>
#include <vector>

#include "kgmotive/graph.hpp"
#include "kgmotive/pattern.hpp"

namespace kgmotive::matcher {

using graph::KnowledgeGraph;
using pattern::Instance;
using pattern::Pattern;

struct MatchBudget {
    // At least one limit must be set; the default mirrors the 5-second
    // interactive budget. Tests use max_instances for determinism.
    std::optional<double> wall_clock_seconds = 5.0;
    std::optional<uint64_t> max_instances;

    static MatchBudget unlimited() { return {std::nullopt, UINT64_MAX}; }
    static MatchBudget capped(uint64_t n) { return {std::nullopt, n}; }
};

struct MatchResult {
    std::vector<Instance> instances;
    // True iff the walk provably enumerated every instance within budget.
    bool complete = true;
};

// Deterministic enumeration: pattern edges are ordered once (ascending
// initial candidate count, preferring edges that share a variable with
// already-ordered ones), then graph triples are visited in ascending index
// order at every step.
MatchResult find_instances(const KnowledgeGraph& g, const Pattern& m,
                           const MatchBudget& budget);

// Greedy scan in the given order: keep an instance iff none of its produced
// triples was produced by a previously kept instance. The result is pairwise
// edge-disjoint.
std::vector<Instance> prune_overlap(const std::vector<Instance>& instances,
                                    const Pattern& m);

} // namespace kgmotive::matcher
