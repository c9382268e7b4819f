#include "kgmotive/motifcode.hpp"

#include <algorithm>

#include "kgmotive/kernels.hpp"

namespace kgmotive::motifcode {

namespace {

using kernels::log2_factorial;
using kernels::sum_log2_factorial;

// Variable-stripped structure M' plus the label sequence S_M. Every distinct
// node label becomes one structure node (first-occurrence order over the
// edge list), every distinct relation label one structure relation; S_M lists
// the original labels in that index order, folded onto one nonnegative
// alphabet (x >= 0 -> 2x, x < 0 -> -2x-1) so constants and variables share
// the Pitman-Yor code.
struct Stripped {
    graph::KnowledgeGraph structure;
    std::vector<uint32_t> labels;
};

uint32_t fold_label(int32_t label) {
    return label >= 0 ? uint32_t(label) * 2 : uint32_t(-(label * 2) - 1);
}

Stripped strip(const Pattern& m) {
    std::vector<std::pair<int32_t, uint32_t>> node_index, rel_index; // tiny maps
    auto lookup = [](auto& table, int32_t label) -> uint32_t {
        for (const auto& [key, value] : table)
            if (key == label) return value;
        table.emplace_back(label, uint32_t(table.size()));
        return uint32_t(table.size() - 1);
    };

    std::vector<Triple> edges;
    edges.reserve(m.edges().size());
    for (const pattern::PatternEdge& e : m.edges()) {
        uint32_t s = lookup(node_index, e.subject);
        uint32_t p = lookup(rel_index, e.predicate);
        uint32_t o = lookup(node_index, e.object);
        edges.push_back({s, p, o});
    }

    Stripped out{graph::KnowledgeGraph(uint32_t(node_index.size()),
                                       uint32_t(rel_index.size()), std::move(edges)),
                 {}};
    out.labels.reserve(node_index.size() + rel_index.size());
    for (const auto& [label, _] : node_index) out.labels.push_back(fold_label(label));
    for (const auto& [label, _] : rel_index) out.labels.push_back(fold_label(label));
    return out;
}

} // namespace

DegreeConstraint degree_constraint(const KnowledgeGraph& g, const Pattern& m,
                                   std::span<const Instance> inst) {
    DegreeConstraint dc;
    dc.k = inst.size();
    dc.node_counts.assign(m.var_nodes(), std::vector<uint32_t>(g.v(), 0));
    dc.rel_counts.assign(m.var_rels(), std::vector<uint32_t>(g.r(), 0));
    for (const Instance& i : inst) {
        require(pattern::is_valid_instance(g, m, i),
                "degree constraint over an invalid instance");
        for (uint32_t slot = 0; slot < m.var_nodes(); ++slot)
            ++dc.node_counts[slot][i.nodes[slot]];
        for (uint32_t slot = 0; slot < m.var_rels(); ++slot)
            ++dc.rel_counts[slot][i.rels[slot]];
    }
    return dc;
}

Bits instance_structure_bits(const DegreeConstraint& dc) {
    const uint32_t slots = dc.w() + dc.l();
    if (dc.k <= 1 || slots == 0) return 0.0;
    Bits bits = double(slots - 1) * log2_factorial(dc.k);
    for (const auto& seq : dc.node_counts) bits -= sum_log2_factorial(seq);
    for (const auto& seq : dc.rel_counts) bits -= sum_log2_factorial(seq);
    return bits;
}

Scorer::Scorer(const KnowledgeGraph& g, PitmanYorConfig cfg)
    : g_(g), cfg_(cfg), null_bits_(nullmodel::null_bits(g)),
      base_degrees_(graph::degree_sequence(g)), py_(cfg) {}

CodeBreakdown Scorer::bits_trusted(const Pattern& canonical, std::span<const Instance> inst) {
    CodeBreakdown out;
    out.b_dim = codes::length_nonneg_int(g_.v()) + codes::length_nonneg_int(g_.r()) +
                codes::length_nonneg_int(g_.m());

    // Pattern: fair base code of the stripped structure plus its labels.
    const Stripped stripped = strip(canonical);
    const graph::DegreeSequence dp = graph::degree_sequence(stripped.structure);
    out.b_pattern = py_.length(dp.in) + py_.length(dp.rel) + py_.length(dp.out) +
                    nullmodel::el_structure_bits(dp) + py_.length(stripped.labels);

    // Template: base degrees minus every covered triple. Produced triples
    // must be pairwise distinct across the whole instance list.
    std::vector<Triple> produced;
    produced.reserve(inst.size() * canonical.edges().size());
    for (const Instance& i : inst) {
        for (const Triple& t : pattern::substitute(canonical, i)) produced.push_back(t);
    }
    {
        std::vector<Triple> check = produced;
        std::sort(check.begin(), check.end());
        require(std::adjacent_find(check.begin(), check.end()) == check.end(),
                "instances overlap: a produced triple appears twice");
    }
    tpl_in_ = base_degrees_.in;
    tpl_rel_ = base_degrees_.rel;
    tpl_out_ = base_degrees_.out;
    for (const Triple& t : produced) {
        --tpl_in_[t.object];
        --tpl_rel_[t.predicate];
        --tpl_out_[t.subject];
    }
    const uint64_t m_template = g_.m() - produced.size();
    const Bits el_template = 2.0 * log2_factorial(m_template) -
                             sum_log2_factorial(tpl_in_) - sum_log2_factorial(tpl_rel_) -
                             sum_log2_factorial(tpl_out_);
    out.b_template = py_.length(tpl_in_) + py_.length(tpl_rel_) + py_.length(tpl_out_) +
                     el_template;

    // Instances: multinomial structure plus fair-coded constraint sequences.
    const uint32_t w = canonical.var_nodes();
    const uint32_t l = canonical.var_rels();
    node_counts_.resize(w);
    rel_counts_.resize(l);
    const uint64_t k = inst.size();
    for (auto& seq : node_counts_) seq.assign(g_.v(), 0);
    for (auto& seq : rel_counts_) seq.assign(g_.r(), 0);
    for (const Instance& i : inst) {
        for (uint32_t slot = 0; slot < w; ++slot) ++node_counts_[slot][i.nodes[slot]];
        for (uint32_t slot = 0; slot < l; ++slot) ++rel_counts_[slot][i.rels[slot]];
    }
    Bits structure = 0.0;
    if (k > 1 && w + l > 0) {
        structure = double(w + l - 1) * log2_factorial(k);
        for (const auto& seq : node_counts_) structure -= sum_log2_factorial(seq);
        for (const auto& seq : rel_counts_) structure -= sum_log2_factorial(seq);
    }
    Bits sequences = 0.0;
    for (const auto& seq : node_counts_) sequences += py_.length(seq);
    for (const auto& seq : rel_counts_) sequences += py_.length(seq);
    out.b_instances = structure + sequences;

    out.total = out.b_dim + out.b_pattern + out.b_template + out.b_instances;
    return out;
}

ScoredMotif Scorer::score(const Pattern& m, const matcher::MatchBudget& budget,
                          std::vector<Instance>* pruned_out) {
    ScoredMotif scored{pattern::canonicalize(m), 0, {}, 0.0, true};
    matcher::MatchResult result = matcher::find_instances(g_, scored.pattern, budget);
    std::vector<Instance> pruned = matcher::prune_overlap(result.instances, scored.pattern);
    scored.frequency = pruned.size();
    scored.breakdown = bits_trusted(scored.pattern, pruned);
    scored.log_factor = null_bits_ - scored.breakdown.total;
    scored.complete = result.complete;
    if (pruned_out) *pruned_out = std::move(pruned);
    return scored;
}

CodeBreakdown motif_bits(const KnowledgeGraph& g, const Pattern& m,
                         std::span<const Instance> inst, PitmanYorConfig cfg) {
    for (const Instance& i : inst)
        require(pattern::is_valid_instance(g, m, i), "invalid instance for motif_bits");
    // b_pattern must not depend on variable naming: encode the canonical
    // form. The instance-dependent parts use m itself, whose slot order the
    // bindings follow; the sums are invariant under slot permutation.
    Scorer scorer(g, cfg);
    const Pattern canonical = pattern::canonicalize(m);
    if (canonical == m) return scorer.bits_trusted(m, inst);
    CodeBreakdown with_m = scorer.bits_trusted(m, inst);
    CodeBreakdown pattern_part = scorer.bits_trusted(canonical, {});
    with_m.b_pattern = pattern_part.b_pattern;
    with_m.total = with_m.b_dim + with_m.b_pattern + with_m.b_template + with_m.b_instances;
    return with_m;
}

ScoredMotif log_factor(const KnowledgeGraph& g, const Pattern& m,
                       const matcher::MatchBudget& budget, PitmanYorConfig cfg) {
    Scorer scorer(g, cfg);
    return scorer.score(m, budget);
}

} // namespace kgmotive::motifcode
