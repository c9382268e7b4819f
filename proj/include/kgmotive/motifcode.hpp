#pragma once

// The motif code: full codelength of a graph described via a pattern, its
// instances, and the remaining template, plus the log-factor against the
// null model.

#include <cstdint>
#include <span>
#include <vector>

#include "kgmotive/codes.hpp"
#include "kgmotive/graph.hpp"
#include "kgmotive/matcher.hpp"
#include "kgmotive/nullmodel.hpp"
#include "kgmotive/pattern.hpp"

namespace kgmotive::motifcode {

using codes::PitmanYorConfig;
using graph::KnowledgeGraph;
using pattern::Instance;
using pattern::Pattern;

// How often each graph node / relation fills each variable slot across the
// instance list. Every sequence sums to k.
struct DegreeConstraint {
    std::vector<std::vector<uint32_t>> node_counts; // w sequences, length v_G
    std::vector<std::vector<uint32_t>> rel_counts;  // l sequences, length r_G
    uint64_t k = 0;

    uint32_t w() const { return uint32_t(node_counts.size()); }
    uint32_t l() const { return uint32_t(rel_counts.size()); }
};

struct CodeBreakdown {
    Bits b_dim = 0;
    Bits b_pattern = 0;
    Bits b_template = 0;
    Bits b_instances = 0;
    Bits total = 0;
};

struct ScoredMotif {
    Pattern pattern; // canonical form
    uint64_t frequency = 0; // pruned instance count
    CodeBreakdown breakdown;
    double log_factor = 0.0;
    bool complete = true; // matcher completeness (diagnostic only)
};

DegreeConstraint degree_constraint(const KnowledgeGraph& g, const Pattern& m,
                                   std::span<const Instance> inst);

// (w+l-1)*log2(k!) - sum over all count entries of log2(count!); zero when
// k <= 1 or there are no variable slots.
Bits instance_structure_bits(const DegreeConstraint& dc);

// Full breakdown: dimensions, pattern (structure + labels, computed on the
// canonical form), template (fair base code of the uncovered remainder), and
// instances (structure + fair-coded constraint sequences).
CodeBreakdown motif_bits(const KnowledgeGraph& g, const Pattern& m,
                         std::span<const Instance> inst, PitmanYorConfig cfg = {});

// Match, prune, encode: the end-to-end score of one pattern. The returned
// pattern is canonical; log_factor = null_bits(g) - total. Values above 10
// bits reject the null model at p < 0.001.
ScoredMotif log_factor(const KnowledgeGraph& g, const Pattern& m,
                       const matcher::MatchBudget& budget, PitmanYorConfig cfg = {});

// Reusable scoring engine for tight search loops: caches the null side and
// the base degree sequence, reuses all scratch buffers, and trusts matcher
// output instead of re-validating each instance.
class Scorer {
public:
    explicit Scorer(const KnowledgeGraph& g, PitmanYorConfig cfg = {});

    // With pruned_out set, also hands back the pruned instances (aligned to
    // the returned canonical pattern's slots) for callers that mutate the
    // pattern next.
    ScoredMotif score(const Pattern& m, const matcher::MatchBudget& budget,
                      std::vector<Instance>* pruned_out = nullptr);

    Bits null_bits() const { return null_bits_; }
    const KnowledgeGraph& graph() const { return g_; }
    const PitmanYorConfig& config() const { return cfg_; }

    // Breakdown for already-validated, pairwise-disjoint instances of a
    // canonical pattern (the trusted fast path behind score()).
    CodeBreakdown bits_trusted(const Pattern& canonical, std::span<const Instance> inst);

private:
    const KnowledgeGraph& g_;
    PitmanYorConfig cfg_;
    Bits null_bits_;
    graph::DegreeSequence base_degrees_;
    codes::PitmanYorEvaluator py_;
    // Scratch reused across score() calls.
    std::vector<uint32_t> tpl_in_, tpl_rel_, tpl_out_;
    std::vector<std::vector<uint32_t>> node_counts_, rel_counts_;
};

} // namespace kgmotive::motifcode
