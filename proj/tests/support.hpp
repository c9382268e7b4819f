#pragma once

// Shared independent oracles for unit and acceptance tests. These are written
// for obviousness, not speed, and must stay independent of the library code
// they check (they may use library *types* but recompute results their own
// way).

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "kgmotive/graph.hpp"
#include "kgmotive/pattern.hpp"
#include "kgmotive/rng.hpp"
#include "kgmotive/types.hpp"

namespace testsupport {

// Degree triple flattened to a single comparable key: d_in ++ d_rel ++ d_out.
using DegreeKey = std::vector<uint32_t>;

inline DegreeKey degree_key(uint32_t v, uint32_t r,
                            const std::vector<kgmotive::Triple>& edges) {
    DegreeKey key(size_t(v) * 2 + r, 0);
    for (const auto& t : edges) {
        ++key[t.object];                    // d_in block
        ++key[size_t(v) + t.predicate];     // d_rel block
        ++key[size_t(v) + r + t.subject];   // d_out block
    }
    return key;
}

// Exhaustively counts, for every degree sequence realizable with exactly m
// edges over the complete triple space on v nodes and r relations, the number
// of distinct edge *sets* realizing it: |G_D|. Feasible for v<=4, m<=4, r<=2
// (worst case C(32,4) subsets).
inline std::map<DegreeKey, uint64_t> count_degree_realizations(uint32_t v, uint32_t r,
                                                               uint32_t m) {
    std::vector<kgmotive::Triple> space;
    for (uint32_t s = 0; s < v; ++s)
        for (uint32_t p = 0; p < r; ++p)
            for (uint32_t o = 0; o < v; ++o) space.push_back({s, p, o});

    std::map<DegreeKey, uint64_t> result;
    std::vector<kgmotive::Triple> chosen;
    // Standard combination enumeration over `space`, size m.
    std::vector<uint32_t> idx(m);
    if (m > space.size()) return result;
    for (uint32_t i = 0; i < m; ++i) idx[i] = i;
    while (true) {
        chosen.clear();
        for (uint32_t i : idx) chosen.push_back(space[i]);
        ++result[degree_key(v, r, chosen)];
        if (m == 0) break;
        // Advance the combination.
        int pos = int(m) - 1;
        while (pos >= 0 && idx[size_t(pos)] == space.size() - m + uint32_t(pos)) --pos;
        if (pos < 0) break;
        ++idx[size_t(pos)];
        for (uint32_t i = uint32_t(pos) + 1; i < m; ++i) idx[i] = idx[i - 1] + 1;
    }
    return result;
}

// Splits a flattened key back into the library's DegreeSequence.
inline kgmotive::graph::DegreeSequence key_to_degrees(uint32_t v, uint32_t r,
                                                      const DegreeKey& key) {
    kgmotive::graph::DegreeSequence d;
    d.in.assign(key.begin(), key.begin() + v);
    d.rel.assign(key.begin() + v, key.begin() + v + r);
    d.out.assign(key.begin() + v + r, key.end());
    return d;
}

// Brute-force instance enumeration: every distinct assignment of node
// variables times every assignment of relation variables, filtered by the
// full instance check. Only usable on tiny graphs.
inline std::vector<kgmotive::pattern::Instance> brute_force_instances(
    const kgmotive::graph::KnowledgeGraph& g, const kgmotive::pattern::Pattern& m) {
    std::vector<kgmotive::pattern::Instance> found;
    kgmotive::pattern::Instance inst;
    inst.nodes.assign(m.var_nodes(), 0);
    inst.rels.assign(m.var_rels(), 0);
    std::vector<bool> used(g.v(), false);

    auto enumerate_rels = [&](auto&& self, uint32_t slot) -> void {
        if (slot == m.var_rels()) {
            if (kgmotive::pattern::is_valid_instance(g, m, inst)) found.push_back(inst);
            return;
        }
        for (uint32_t p = 0; p < g.r(); ++p) {
            inst.rels[slot] = p;
            self(self, slot + 1);
        }
    };
    auto enumerate_nodes = [&](auto&& self, uint32_t slot) -> void {
        if (slot == m.var_nodes()) {
            enumerate_rels(enumerate_rels, 0);
            return;
        }
        for (uint32_t n = 0; n < g.v(); ++n) {
            if (used[n]) continue;
            used[n] = true;
            inst.nodes[slot] = n;
            self(self, slot + 1);
            used[n] = false;
        }
    };
    enumerate_nodes(enumerate_nodes, 0);
    return found;
}

// Random graph/pattern pairs for matcher-vs-oracle sweeps (v<=6, m<=8,
// patterns <=3 edges, mixing constants and variables).
inline kgmotive::graph::KnowledgeGraph random_small_graph(kgmotive::Rng& rng) {
    const uint32_t v = 2 + uint32_t(rng.below(5));
    const uint32_t r = 1 + uint32_t(rng.below(3));
    std::vector<kgmotive::Triple> edges;
    const uint64_t target = 1 + rng.below(8);
    for (uint64_t e = 0; e < target; ++e)
        edges.push_back({uint32_t(rng.below(v)), uint32_t(rng.below(r)),
                         uint32_t(rng.below(v))});
    return kgmotive::graph::KnowledgeGraph(v, r, std::move(edges));
}

inline kgmotive::pattern::Pattern random_small_pattern(kgmotive::Rng& rng,
                                                       const kgmotive::graph::KnowledgeGraph& g) {
    using kgmotive::pattern::EdgeDraft;
    using kgmotive::pattern::Slot;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const size_t edge_count = 1 + rng.below(3);
        std::vector<EdgeDraft> drafts;
        std::vector<Slot> seen_nodes;
        auto random_node = [&]() -> Slot {
            if (rng.below(2) == 0) return {true, uint32_t(rng.below(4))};
            return {false, uint32_t(rng.below(g.v()))};
        };
        auto random_pred = [&]() -> Slot {
            if (rng.below(2) == 0) return {true, uint32_t(rng.below(3))};
            return {false, uint32_t(rng.below(g.r()))};
        };
        for (size_t e = 0; e < edge_count; ++e) {
            Slot s = (e > 0 && !seen_nodes.empty())
                         ? seen_nodes[rng.below(seen_nodes.size())]
                         : random_node();
            Slot o = random_node();
            if (rng.below(2)) std::swap(s, o);
            drafts.push_back({s, random_pred(), o});
            seen_nodes.push_back(s);
            seen_nodes.push_back(o);
        }
        try {
            return kgmotive::pattern::assemble(drafts);
        } catch (const kgmotive::pattern_error&) {
            continue; // duplicate edge or disconnected; resample
        }
    }
    throw std::runtime_error("could not sample a valid pattern");
}

} // namespace testsupport
