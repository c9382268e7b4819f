#include "kgmotive/synth.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace kgmotive::synth {

namespace {

// Spec problems are bad input (CLI exit code 2), not internal bugs.
void check_spec(bool ok, const char* message) {
    if (!ok) throw parse_error(message);
}

constexpr int kPatternAttempts = 1000; // whole-pattern rejection budget
constexpr int kBindingAttempts = 100;  // per planted instance
constexpr int kDistinctAttempts = 100; // per distinct-value draw

// Uniform (s, o) pair with s != o, without rejection.
std::pair<uint32_t, uint32_t> random_arc(uint64_t n, Rng& rng) {
    const uint64_t s = rng.below(n);
    uint64_t o = rng.below(n - 1);
    if (o >= s) ++o;
    return {uint32_t(s), uint32_t(o)};
}

// `count` distinct uniform values from [0, bound), order of first draw.
std::vector<uint32_t> distinct_values(uint64_t bound, size_t count, Rng& rng) {
    require(bound >= count, "not enough values to sample from");
    std::vector<uint32_t> values;
    values.reserve(count);
    while (values.size() < count) {
        int attempts = kDistinctAttempts;
        for (;;) {
            const uint32_t value = uint32_t(rng.below(bound));
            if (std::find(values.begin(), values.end(), value) == values.end()) {
                values.push_back(value);
                break;
            }
            if (--attempts == 0) throw injection_error("distinct-value sampling stalled");
        }
    }
    return values;
}

} // namespace

graph::KnowledgeGraph sample_er_kg(const SynthSpec& spec, Rng& rng) {
    check_spec(spec.n <= uint64_t(kMaxIndex) + 1 && spec.r <= kMaxIndex + 1,
               "graph dimensions exceed the index range");
    const uint64_t capacity = spec.n * (spec.n - (spec.n > 0 ? 1 : 0));
    check_spec(spec.m <= capacity, "m exceeds n(n-1): no simple digraph has that many edges");
    check_spec(spec.m == 0 || spec.r >= 1, "edges need at least one relation label");

    std::unordered_set<uint64_t> taken;
    taken.reserve(size_t(spec.m) * 2);
    std::vector<Triple> edges;
    edges.reserve(size_t(spec.m));
    while (edges.size() < spec.m) {
        const auto [s, o] = random_arc(spec.n, rng);
        if (!taken.insert(uint64_t(s) * spec.n + o).second) continue;
        edges.push_back({s, uint32_t(rng.below(spec.r)), o});
    }
    return graph::KnowledgeGraph(uint32_t(spec.n), spec.r, std::move(edges));
}

pattern::Pattern sample_pattern(const graph::KnowledgeGraph& g, Rng& rng) {
    require(g.v() >= 3 && g.r() >= 1, "graph too small to sample a pattern from");

    for (int attempt = 0; attempt < kPatternAttempts; ++attempt) {
        const uint64_t nodes = uint64_t(rng.between(3, 6));
        if (g.v() < nodes) continue;
        const uint64_t links = uint64_t(rng.between(int64_t(nodes), int64_t(nodes * nodes - nodes)));

        // Concrete pattern first: distinct node constants, uniform arcs
        // between them, uniform relation constants.
        const std::vector<uint32_t> node_values = distinct_values(g.v(), size_t(nodes), rng);
        struct Arc {
            uint32_t from, to, rel;
        };
        std::vector<Arc> arcs;
        arcs.resize(size_t(links));
        std::vector<bool> used(size_t(nodes), false);
        for (Arc& a : arcs) {
            const auto [i, j] = random_arc(nodes, rng);
            a = {i, j, uint32_t(rng.below(g.r()))};
            used[i] = used[j] = true;
        }
        // A node no arc touches would be an isolated vertex: disconnected.
        if (std::find(used.begin(), used.end(), false) != used.end()) continue;

        // Then promote U(0, nodes) node slots and U(0, links) links to
        // variables, each chosen as a uniform subset via a partial shuffle.
        auto choose_subset = [&](uint64_t total) {
            std::vector<uint32_t> index;
            index.resize(size_t(total));
            std::iota(index.begin(), index.end(), 0u);
            const uint64_t chosen = uint64_t(rng.between(0, int64_t(total)));
            for (uint64_t i = 0; i < chosen; ++i)
                std::swap(index[size_t(i)], index[size_t(i + rng.below(total - i))]);
            index.resize(size_t(chosen));
            return index;
        };
        std::vector<bool> node_is_var(size_t(nodes), false);
        for (uint32_t i : choose_subset(nodes)) node_is_var[i] = true;
        std::vector<bool> link_is_var(size_t(links), false);
        for (uint32_t i : choose_subset(links)) link_is_var[i] = true;

        std::vector<pattern::EdgeDraft> drafts;
        drafts.reserve(arcs.size());
        auto node_slot = [&](uint32_t i) {
            return node_is_var[i] ? pattern::Slot{true, i}
                                  : pattern::Slot{false, node_values[i]};
        };
        for (size_t e = 0; e < arcs.size(); ++e) {
            const pattern::Slot predicate = link_is_var[e]
                                                ? pattern::Slot{true, uint32_t(e)}
                                                : pattern::Slot{false, arcs[e].rel};
            drafts.push_back({node_slot(arcs[e].from), predicate, node_slot(arcs[e].to)});
        }

        try {
            return pattern::assemble(drafts); // rejects duplicates/disconnection
        } catch (const pattern_error&) {
            continue;
        }
    }
    throw injection_error("pattern sampling exhausted its attempt budget");
}

std::pair<graph::KnowledgeGraph, std::vector<pattern::Instance>>
inject(const graph::KnowledgeGraph& g, const pattern::Pattern& m, uint64_t k, Rng& rng) {
    require(g.v() >= m.var_nodes(), "graph has fewer nodes than the pattern has variables");
    require(m.var_rels() == 0 || g.r() >= 1, "relation variables need a nonempty vocabulary");

    std::vector<pattern::Instance> planted;
    planted.reserve(size_t(k));
    std::vector<Triple> edges = g.edges();
    std::vector<Triple> produced;
    for (uint64_t i = 0; i < k; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < kBindingAttempts && !placed; ++attempt) {
            pattern::Instance inst;
            inst.nodes = distinct_values(g.v(), m.var_nodes(), rng);
            inst.rels.clear();
            for (uint32_t j = 0; j < m.var_rels(); ++j)
                inst.rels.push_back(uint32_t(rng.below(g.r())));

            // Two pattern edges may collapse onto one triple (e.g. two
            // relation variables drawing the same label); such bindings are
            // not valid instances, so redraw.
            produced = pattern::substitute(m, inst);
            std::sort(produced.begin(), produced.end());
            if (std::adjacent_find(produced.begin(), produced.end()) != produced.end())
                continue;

            edges.insert(edges.end(), produced.begin(), produced.end());
            planted.push_back(std::move(inst));
            placed = true;
        }
        if (!placed) throw injection_error("could not realize an injected instance");
    }

    graph::KnowledgeGraph grown(g.v(), g.r(), std::move(edges));
    for (const pattern::Instance& inst : planted)
        require(pattern::is_valid_instance(grown, m, inst),
                "planted instance failed validation");
    return {std::move(grown), std::move(planted)};
}

PlantedPattern sample_planted(const graph::KnowledgeGraph& base, uint64_t k, Rng& rng) {
    for (int attempt = 0; attempt < kPatternAttempts; ++attempt) {
        pattern::Pattern m = sample_pattern(base, rng);
        try {
            auto [grown, planted] = inject(base, m, k, rng);
            return {std::move(grown), std::move(m), std::move(planted)};
        } catch (const injection_error&) {
            continue; // unplantable draw; resample the pattern
        }
    }
    throw injection_error("no plantable pattern within the attempt budget");
}

std::vector<InjectionRow> run_injection_experiment(
    const SynthSpec& dims, const std::vector<uint64_t>& k_values, uint64_t repeats,
    uint64_t rng_seed, const matcher::MatchBudget& budget,
    const codes::PitmanYorConfig& py) {
    std::vector<InjectionRow> rows;
    rows.reserve(k_values.size() * size_t(repeats));
    uint64_t stream = 0;
    for (uint64_t k : k_values) {
        for (uint64_t repeat = 0; repeat < repeats; ++repeat) {
            Rng rng = Rng::derive(rng_seed, stream++);
            SynthSpec fresh = dims;
            fresh.k = k;
            const graph::KnowledgeGraph base = sample_er_kg(fresh, rng);
            PlantedPattern experiment = sample_planted(base, k, rng);
            motifcode::ScoredMotif scored =
                motifcode::Scorer(experiment.graph, py).score(experiment.pattern, budget);
            rows.push_back({k, repeat, scored.frequency, scored.log_factor});
        }
    }
    return rows;
}

} // namespace kgmotive::synth
