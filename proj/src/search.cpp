#include "kgmotive/search.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>

namespace kgmotive::search {

namespace {

using pattern::EdgeDraft;
using pattern::PatternEdge;
using pattern::Slot;

constexpr int kMoveKinds = 7;
constexpr int kMoveAttempts = 8;      // retries within one stochastic move kind
constexpr uint64_t kProgressEvery = 1000;

std::mutex progress_mutex;

std::vector<EdgeDraft> to_drafts(const Pattern& m) {
    auto slot = [](int32_t label) {
        return label < 0 ? Slot{true, uint32_t(-label)} : Slot{false, uint32_t(label)};
    };
    std::vector<EdgeDraft> drafts;
    drafts.reserve(m.edges().size());
    for (const PatternEdge& e : m.edges())
        drafts.push_back({slot(e.subject), slot(e.predicate), slot(e.object)});
    return drafts;
}

// Validity is re-established by assemble(); moves that produce duplicate
// edges or disconnect the pattern simply fail here and are resampled. The
// canonicalization bound is part of validity for the search: a pattern the
// scorer cannot canonicalize must never enter the chain.
std::optional<Pattern> try_assemble(const std::vector<EdgeDraft>& drafts) {
    try {
        Pattern m = pattern::assemble(drafts);
        if (!pattern::canonicalizable(m)) return std::nullopt;
        return m;
    } catch (const pattern_error&) {
        return std::nullopt;
    }
}

// Extend: random instance, then a random graph triple adjacent to one of its
// bound nodes and not produced by it, added with constant labels.
std::optional<Pattern> move_extend(const Pattern& m, const KnowledgeGraph& g,
                                   std::span<const Instance> inst, Rng& rng) {
    if (inst.empty()) return std::nullopt;
    for (int attempt = 0; attempt < kMoveAttempts; ++attempt) {
        const Instance& picked = inst[rng.below(inst.size())];
        std::vector<Triple> produced = pattern::substitute(m, picked);
        std::vector<uint32_t> bound;
        for (const Triple& t : produced) {
            bound.push_back(t.subject);
            bound.push_back(t.object);
        }
        std::sort(bound.begin(), bound.end());
        bound.erase(std::unique(bound.begin(), bound.end()), bound.end());

        std::vector<uint32_t> adjacent;
        for (uint32_t node : bound) {
            auto span_s = g.with_subject(node);
            auto span_o = g.with_object(node);
            adjacent.insert(adjacent.end(), span_s.begin(), span_s.end());
            adjacent.insert(adjacent.end(), span_o.begin(), span_o.end());
        }
        std::sort(adjacent.begin(), adjacent.end());
        adjacent.erase(std::unique(adjacent.begin(), adjacent.end()), adjacent.end());
        std::erase_if(adjacent, [&](uint32_t pos) {
            const Triple& t = g.edges()[pos];
            return std::find(produced.begin(), produced.end(), t) != produced.end();
        });
        if (adjacent.empty()) continue;

        const Triple& t = g.edges()[adjacent[rng.below(adjacent.size())]];
        std::vector<EdgeDraft> drafts = to_drafts(m);
        drafts.push_back({{false, t.subject}, {false, t.predicate}, {false, t.object}});
        if (auto out = try_assemble(drafts)) return out;
    }
    return std::nullopt;
}

// Make one constant node value (all its occurrences) a fresh node variable.
std::optional<Pattern> move_node_to_var(const Pattern& m, Rng& rng) {
    std::vector<uint32_t> values;
    for (const PatternEdge& e : m.edges()) {
        if (e.subject >= 0) values.push_back(uint32_t(e.subject));
        if (e.object >= 0) values.push_back(uint32_t(e.object));
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (values.empty()) return std::nullopt;

    uint32_t value = values[rng.below(values.size())];
    uint32_t fresh = m.var_nodes() + m.var_rels() + 1;
    std::vector<EdgeDraft> drafts = to_drafts(m);
    for (EdgeDraft& d : drafts) {
        for (Slot* s : {&d.subject, &d.object})
            if (!s->is_var && s->value == value) *s = Slot{true, fresh};
    }
    return try_assemble(drafts);
}

// Make one edge's constant relation a fresh relation variable (occurrence
// level: other edges carrying the same relation keep their constant).
std::optional<Pattern> move_edge_to_var(const Pattern& m, Rng& rng) {
    std::vector<size_t> positions;
    for (size_t i = 0; i < m.edges().size(); ++i)
        if (m.edges()[i].predicate >= 0) positions.push_back(i);
    if (positions.empty()) return std::nullopt;

    size_t pos = positions[rng.below(positions.size())];
    uint32_t fresh = m.var_nodes() + m.var_rels() + 1;
    std::vector<EdgeDraft> drafts = to_drafts(m);
    drafts[pos].predicate = Slot{true, fresh};
    return try_assemble(drafts);
}

// Bind a node variable to the value it takes in a random instance.
std::optional<Pattern> move_var_node_to_const(const Pattern& m,
                                              std::span<const Instance> inst, Rng& rng) {
    if (inst.empty() || m.var_nodes() == 0) return std::nullopt;
    for (int attempt = 0; attempt < kMoveAttempts; ++attempt) {
        uint32_t slot = uint32_t(rng.below(m.var_nodes()));
        const Instance& picked = inst[rng.below(inst.size())];
        uint32_t value = picked.nodes[slot];
        std::vector<EdgeDraft> drafts = to_drafts(m);
        for (EdgeDraft& d : drafts) {
            for (Slot* s : {&d.subject, &d.object})
                if (s->is_var && s->value == slot + 1) *s = Slot{false, value};
        }
        if (auto out = try_assemble(drafts)) return out;
    }
    return std::nullopt;
}

// Bind a relation variable to the value it takes in a random instance.
std::optional<Pattern> move_var_edge_to_const(const Pattern& m,
                                              std::span<const Instance> inst, Rng& rng) {
    if (inst.empty() || m.var_rels() == 0) return std::nullopt;
    for (int attempt = 0; attempt < kMoveAttempts; ++attempt) {
        uint32_t slot = uint32_t(rng.below(m.var_rels()));
        const Instance& picked = inst[rng.below(inst.size())];
        uint32_t value = picked.rels[slot];
        uint32_t id = m.var_nodes() + slot + 1;
        std::vector<EdgeDraft> drafts = to_drafts(m);
        for (EdgeDraft& d : drafts)
            if (d.predicate.is_var && d.predicate.value == id)
                d.predicate = Slot{false, value};
        if (auto out = try_assemble(drafts)) return out;
    }
    return std::nullopt;
}

// Remove one edge, keeping at least one edge and staying connected.
std::optional<Pattern> move_remove_edge(const Pattern& m, Rng& rng) {
    const size_t count = m.edges().size();
    if (count <= 1) return std::nullopt;
    std::vector<size_t> order(count);
    for (size_t i = 0; i < count; ++i) order[i] = i;
    for (size_t i = count; i > 1; --i)
        std::swap(order[i - 1], order[rng.below(i)]);
    std::vector<EdgeDraft> drafts = to_drafts(m);
    for (size_t drop : order) {
        std::vector<EdgeDraft> kept;
        kept.reserve(count - 1);
        for (size_t i = 0; i < count; ++i)
            if (i != drop) kept.push_back(drafts[i]);
        if (auto out = try_assemble(kept)) return out;
    }
    return std::nullopt;
}

// Couple two relation variables that hold the same value in some instance.
std::optional<Pattern> move_couple(const Pattern& m, std::span<const Instance> inst,
                                   Rng& rng) {
    if (inst.empty() || m.var_rels() < 2) return std::nullopt;
    std::vector<std::pair<uint32_t, uint32_t>> pairs;
    for (uint32_t j1 = 0; j1 + 1 < m.var_rels(); ++j1) {
        for (uint32_t j2 = j1 + 1; j2 < m.var_rels(); ++j2) {
            for (const Instance& i : inst) {
                if (i.rels[j1] == i.rels[j2]) {
                    pairs.emplace_back(j1, j2);
                    break;
                }
            }
        }
    }
    while (!pairs.empty()) {
        size_t pick = rng.below(pairs.size());
        auto [j1, j2] = pairs[pick];
        std::vector<EdgeDraft> drafts = to_drafts(m);
        for (EdgeDraft& d : drafts)
            if (d.predicate.is_var && d.predicate.value == m.var_nodes() + j2 + 1)
                d.predicate.value = m.var_nodes() + j1 + 1;
        if (auto out = try_assemble(drafts)) return out;
        pairs.erase(pairs.begin() + ptrdiff_t(pick));
    }
    return std::nullopt;
}

// Scores better than: primary log-factor, then frequency (same canonical
// pattern under different truncation budgets can differ in both).
bool better(const ScoredMotif& a, const ScoredMotif& b) {
    if (a.log_factor != b.log_factor) return a.log_factor > b.log_factor;
    return a.frequency > b.frequency;
}

void validate(const SearchConfig& cfg) {
    require(cfg.iterations >= 1, "search needs at least one iteration");
    require(cfg.workers >= 1, "search needs at least one worker");
    require(cfg.accept_prob > 0.0 && cfg.accept_prob < 1.0,
            "accept_prob must lie strictly between 0 and 1");
    require(cfg.top_per_worker >= 1, "top_per_worker must be at least 1");
}

// Final ranking: log-factor desc, frequency desc, canonical text asc. The
// text tie-break uses the dictionary-free rendering (bare indices) so the
// order does not depend on surface forms.
void rank(std::vector<ScoredMotif>& rows) {
    graph::Dictionary plain;
    std::vector<std::pair<std::string, size_t>> keyed(rows.size());
    for (size_t i = 0; i < rows.size(); ++i)
        keyed[i] = {pattern::print_pattern(rows[i].pattern, plain), i};
    std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
        const ScoredMotif& x = rows[a.second];
        const ScoredMotif& y = rows[b.second];
        if (x.log_factor != y.log_factor) return x.log_factor > y.log_factor;
        if (x.frequency != y.frequency) return x.frequency > y.frequency;
        return a.first < b.first;
    });
    std::vector<ScoredMotif> sorted;
    sorted.reserve(rows.size());
    for (const auto& [text, index] : keyed) sorted.push_back(std::move(rows[index]));
    rows = std::move(sorted);
}

} // namespace

Pattern initial_pattern(const KnowledgeGraph& g, Rng& rng) {
    require(g.m() >= 1, "cannot start a search on an empty graph");
    for (size_t attempt = 0; attempt < g.m(); ++attempt) {
        const Triple& t = g.edges()[rng.below(g.m())];
        if (t.subject == t.object) continue; // patterns bind distinct nodes
        std::vector<EdgeDraft> draft{
            {{false, t.subject}, {true, 1}, {false, t.object}}};
        return pattern::assemble(draft);
    }
    throw error("initialization failed: only self-loop triples sampled");
}

bool accept_candidate(Bits candidate_total, Bits current_total, double accept_prob,
                      Rng& rng) {
    if (candidate_total < current_total) return true;
    return rng.real() < accept_prob;
}

Pattern transition(const Pattern& m, const KnowledgeGraph& g,
                   std::span<const Instance> inst, Rng& rng) {
    std::vector<int> kinds(kMoveKinds);
    for (int i = 0; i < kMoveKinds; ++i) kinds[i] = i;
    while (!kinds.empty()) {
        size_t pick = rng.below(kinds.size());
        std::optional<Pattern> out;
        switch (kinds[pick]) {
        case 0: out = move_extend(m, g, inst, rng); break;
        case 1: out = move_node_to_var(m, rng); break;
        case 2: out = move_edge_to_var(m, rng); break;
        case 3: out = move_var_node_to_const(m, inst, rng); break;
        case 4: out = move_var_edge_to_const(m, inst, rng); break;
        case 5: out = move_remove_edge(m, rng); break;
        case 6: out = move_couple(m, inst, rng); break;
        }
        if (out) return *out;
        kinds.erase(kinds.begin() + ptrdiff_t(pick));
    }
    throw stuck_error("every transition kind is inapplicable here");
}

std::vector<ScoredMotif> anneal(const KnowledgeGraph& g, const SearchConfig& cfg,
                                uint32_t worker_id, codes::PitmanYorConfig py,
                                std::ostream* progress) {
    validate(cfg);
    Rng rng = Rng::derive(cfg.rng_seed, worker_id);
    motifcode::Scorer scorer(g, py);

    std::map<std::vector<PatternEdge>, ScoredMotif> seen;
    uint64_t iter = 0;
    double best_lf = 0.0;

    auto score_and_record = [&](const Pattern& p,
                                std::vector<Instance>* out) -> ScoredMotif {
        ScoredMotif s = scorer.score(p, cfg.per_pattern_budget, out);
        auto [it, inserted] = seen.try_emplace(s.pattern.edges(), s);
        if (!inserted && better(s, it->second)) it->second = s;
        ++iter;
        best_lf = (iter == 1) ? s.log_factor : std::max(best_lf, s.log_factor);
        if (progress && (iter % kProgressEvery == 0 || iter == cfg.iterations)) {
            char line[96];
            std::snprintf(line, sizeof line, "%u,%llu,%.6f\n", worker_id,
                          (unsigned long long)iter, best_lf);
            std::lock_guard<std::mutex> lock(progress_mutex);
            *progress << line << std::flush;
        }
        return s;
    };

    std::vector<Instance> current_inst;
    ScoredMotif current = score_and_record(initial_pattern(g, rng), &current_inst);
    while (iter < cfg.iterations) {
        Pattern candidate = current.pattern;
        bool restarted = false;
        try {
            candidate = transition(current.pattern, g, current_inst, rng);
        } catch (const stuck_error&) {
            candidate = initial_pattern(g, rng);
            restarted = true;
        }
        std::vector<Instance> candidate_inst;
        ScoredMotif scored = score_and_record(candidate, &candidate_inst);
        // Restarts replace the chain state unconditionally.
        if (restarted ||
            accept_candidate(scored.breakdown.total, current.breakdown.total,
                             cfg.accept_prob, rng)) {
            current = std::move(scored);
            current_inst = std::move(candidate_inst);
        }
    }

    std::vector<ScoredMotif> rows;
    rows.reserve(seen.size());
    for (auto& [key, value] : seen) rows.push_back(std::move(value));
    rank(rows);
    if (rows.size() > cfg.top_per_worker)
        rows.erase(rows.begin() + ptrdiff_t(cfg.top_per_worker), rows.end());
    return rows;
}

std::vector<ScoredMotif> run_search(const KnowledgeGraph& g, const SearchConfig& cfg,
                                    codes::PitmanYorConfig py, std::ostream* progress) {
    validate(cfg);
    std::vector<std::vector<ScoredMotif>> per_worker(cfg.workers);
    if (cfg.workers == 1) {
        per_worker[0] = anneal(g, cfg, 0, py, progress);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(cfg.workers);
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (uint32_t w = 0; w < cfg.workers; ++w) {
            threads.emplace_back([&, w] {
                try {
                    per_worker[w] = anneal(g, cfg, w, py, progress);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (std::thread& t : threads) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    std::map<std::vector<PatternEdge>, ScoredMotif> merged;
    for (std::vector<ScoredMotif>& rows : per_worker) {
        for (ScoredMotif& s : rows) {
            auto [it, inserted] = merged.try_emplace(s.pattern.edges(), s);
            if (!inserted && better(s, it->second)) it->second = std::move(s);
        }
    }
    std::vector<ScoredMotif> out;
    out.reserve(merged.size());
    for (auto& [key, value] : merged) out.push_back(std::move(value));
    rank(out);
    return out;
}

} // namespace kgmotive::search
