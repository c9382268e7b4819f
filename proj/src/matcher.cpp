#include "kgmotive/matcher.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_set>

namespace kgmotive::matcher {

namespace {

using pattern::PatternEdge;

// Slot resolution against a partial assignment: -1 when still unknown.
struct Bindings {
    std::vector<int64_t> node; // index by node-var slot; -1 = unbound
    std::vector<int64_t> rel;

    int64_t resolve_node(const Pattern& m, int32_t label) const {
        return label >= 0 ? label : node[m.node_var_slot(label)];
    }
    int64_t resolve_rel(const Pattern& m, int32_t label) const {
        return label >= 0 ? label : rel[m.rel_var_slot(label)];
    }
};

class Matcher {
public:
    Matcher(const KnowledgeGraph& g, const Pattern& m, const MatchBudget& budget)
        : g_(g), m_(m), budget_(budget) {
        require(budget.wall_clock_seconds || budget.max_instances,
                "match budget must set at least one limit");
        for (const PatternEdge& e : m.edges()) {
            if (e.subject >= 0) require(uint32_t(e.subject) < g.v(), "constant node out of range");
            if (e.object >= 0) require(uint32_t(e.object) < g.v(), "constant node out of range");
            if (e.predicate >= 0)
                require(uint32_t(e.predicate) < g.r(), "constant relation out of range");
        }
        if (budget.wall_clock_seconds)
            deadline_ = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(*budget.wall_clock_seconds));
    }

    MatchResult run() {
        refine_candidates();
        order_edges();
        bindings_.node.assign(m_.var_nodes(), -1);
        bindings_.rel.assign(m_.var_rels(), -1);
        used_triples_.clear();
        extend(0);
        return {std::move(result_), !truncated_};
    }

private:
    // Intersects per-variable node candidate sets from edges with a constant
    // endpoint or constant predicate (the dual-simulation style pre-pass).
    // candidates_[slot] is empty when unconstrained.
    void refine_candidates() {
        candidates_.assign(m_.var_nodes(), {});
        auto intersect = [&](int32_t label, const std::vector<uint8_t>& allowed) {
            if (label >= 0) return;
            auto& set = candidates_[m_.node_var_slot(label)];
            if (set.empty()) {
                set = allowed;
                return;
            }
            for (size_t i = 0; i < set.size(); ++i) set[i] = set[i] && allowed[i];
        };

        std::vector<uint8_t> allowed;
        for (const PatternEdge& e : m_.edges()) {
            const bool s_var = e.subject < 0;
            const bool o_var = e.object < 0;
            if (!s_var && !o_var) continue;
            if (e.predicate >= 0) {
                // Subjects/objects of triples carrying this relation.
                if (s_var) {
                    allowed.assign(g_.v(), 0);
                    for (uint32_t pos : g_.with_predicate(uint32_t(e.predicate))) {
                        const Triple& t = g_.edges()[pos];
                        if (!o_var && t.object != uint32_t(e.object)) continue;
                        allowed[t.subject] = 1;
                    }
                    intersect(e.subject, allowed);
                }
                if (o_var) {
                    allowed.assign(g_.v(), 0);
                    for (uint32_t pos : g_.with_predicate(uint32_t(e.predicate))) {
                        const Triple& t = g_.edges()[pos];
                        if (!s_var && t.subject != uint32_t(e.subject)) continue;
                        allowed[t.object] = 1;
                    }
                    intersect(e.object, allowed);
                }
            } else {
                // Variable relation: only a constant endpoint constrains.
                if (s_var && !o_var) {
                    allowed.assign(g_.v(), 0);
                    for (uint32_t pos : g_.with_object(uint32_t(e.object)))
                        allowed[g_.edges()[pos].subject] = 1;
                    intersect(e.subject, allowed);
                } else if (o_var && !s_var) {
                    allowed.assign(g_.v(), 0);
                    for (uint32_t pos : g_.with_subject(uint32_t(e.subject)))
                        allowed[g_.edges()[pos].object] = 1;
                    intersect(e.object, allowed);
                }
            }
        }
    }

    // Counts triples compatible with an edge's constant slots (no bindings).
    uint64_t initial_candidate_count(const PatternEdge& e) const {
        auto count_span = [&](std::span<const uint32_t> span) {
            uint64_t n = 0;
            for (uint32_t pos : span) {
                const Triple& t = g_.edges()[pos];
                if (e.subject >= 0 && t.subject != uint32_t(e.subject)) continue;
                if (e.predicate >= 0 && t.predicate != uint32_t(e.predicate)) continue;
                if (e.object >= 0 && t.object != uint32_t(e.object)) continue;
                ++n;
            }
            return n;
        };
        if (e.subject >= 0) return count_span(g_.with_subject(uint32_t(e.subject)));
        if (e.object >= 0) return count_span(g_.with_object(uint32_t(e.object)));
        if (e.predicate >= 0) return count_span(g_.with_predicate(uint32_t(e.predicate)));
        return g_.m();
    }

    void order_edges() {
        const auto& edges = m_.edges();
        std::vector<uint64_t> count(edges.size());
        for (size_t i = 0; i < edges.size(); ++i) count[i] = initial_candidate_count(edges[i]);

        std::vector<bool> placed(edges.size(), false);
        std::vector<bool> var_seen(size_t(m_.var_nodes()) + m_.var_rels(), false);
        auto shares_seen_var = [&](const PatternEdge& e) {
            for (int32_t label : {e.subject, e.predicate, e.object})
                if (label < 0 && var_seen[uint32_t(-label) - 1]) return true;
            return false;
        };

        order_.clear();
        for (size_t step = 0; step < edges.size(); ++step) {
            size_t best = edges.size();
            bool best_connected = false;
            for (size_t i = 0; i < edges.size(); ++i) {
                if (placed[i]) continue;
                const bool connected = step > 0 && shares_seen_var(edges[i]);
                // Prefer connected edges; among equals, the smaller initial
                // candidate count; ties fall to the lower edge index.
                if (best == edges.size() || std::pair(!connected, count[i]) <
                                                std::pair(!best_connected, count[best])) {
                    best = i;
                    best_connected = connected;
                }
            }
            placed[best] = true;
            order_.push_back(uint32_t(best));
            for (int32_t label : {edges[best].subject, edges[best].predicate,
                                  edges[best].object})
                if (label < 0) var_seen[uint32_t(-label) - 1] = true;
        }
    }

    bool out_of_budget() {
        if (budget_.max_instances && result_.size() >= *budget_.max_instances) {
            truncated_ = true;
            return true;
        }
        if (deadline_ && (++clock_check_ & 1023u) == 0 &&
            std::chrono::steady_clock::now() >= *deadline_) {
            truncated_ = true;
            return true;
        }
        return false;
    }

    // Tries to match pattern edge order_[depth] against graph triple t.
    // Returns false when inconsistent; otherwise binds and recurses.
    void try_triple(size_t depth, const Triple& t) {
        const PatternEdge& e = m_.edges()[order_[depth]];

        // Node slots: equal labels must match equal nodes; distinct variables
        // must bind distinct nodes.
        const int64_t s_bound = bindings_.resolve_node(m_, e.subject);
        if (s_bound >= 0 && uint64_t(t.subject) != uint64_t(s_bound)) return;
        const int64_t o_bound = bindings_.resolve_node(m_, e.object);
        if (o_bound >= 0 && uint64_t(t.object) != uint64_t(o_bound)) return;
        const int64_t p_bound = bindings_.resolve_rel(m_, e.predicate);
        if (p_bound >= 0 && uint64_t(t.predicate) != uint64_t(p_bound)) return;

        uint32_t bound_nodes[2];
        size_t n_bound_nodes = 0;
        bool bound_rel = false;
        auto bind_node = [&](int32_t label, uint32_t value) {
            if (label >= 0 || bindings_.node[m_.node_var_slot(label)] >= 0) return true;
            const auto& allowed = candidates_[m_.node_var_slot(label)];
            if (!allowed.empty() && !allowed[value]) return false;
            for (int64_t used : bindings_.node)
                if (used == value) return false; // distinctness
            bindings_.node[m_.node_var_slot(label)] = value;
            bound_nodes[n_bound_nodes++] = uint32_t(m_.node_var_slot(label));
            return true;
        };
        auto unbind = [&] {
            for (size_t i = 0; i < n_bound_nodes; ++i) bindings_.node[bound_nodes[i]] = -1;
            if (bound_rel) bindings_.rel[m_.rel_var_slot(e.predicate)] = -1;
        };

        // Same unbound variable in both endpoints requires a self-loop.
        if (e.subject == e.object && e.subject < 0 && t.subject != t.object) return;
        if (!bind_node(e.subject, t.subject)) return;
        if (!bind_node(e.object, t.object)) {
            unbind();
            return;
        }
        if (e.predicate < 0 && bindings_.rel[m_.rel_var_slot(e.predicate)] < 0) {
            bindings_.rel[m_.rel_var_slot(e.predicate)] = t.predicate;
            bound_rel = true;
        }

        // Edge-injectivity: this triple must not repeat an earlier match.
        for (const Triple& used : used_triples_) {
            if (used == t) {
                unbind();
                return;
            }
        }

        used_triples_.push_back(t);
        extend(depth + 1);
        used_triples_.pop_back();
        unbind();
    }

    void extend(size_t depth) {
        if (truncated_) return;
        if (depth == order_.size()) {
            Instance inst;
            inst.nodes.assign(bindings_.node.begin(), bindings_.node.end());
            inst.rels.assign(bindings_.rel.begin(), bindings_.rel.end());
            result_.push_back(std::move(inst));
            // Hitting the cap stops the walk; completeness is then unproven.
            if (budget_.max_instances && result_.size() >= *budget_.max_instances)
                truncated_ = true;
            return;
        }

        const PatternEdge& e = m_.edges()[order_[depth]];
        const int64_t s = bindings_.resolve_node(m_, e.subject);
        const int64_t o = bindings_.resolve_node(m_, e.object);
        const int64_t p = bindings_.resolve_rel(m_, e.predicate);

        auto visit_span = [&](std::span<const uint32_t> span) {
            for (uint32_t pos : span) {
                if (out_of_budget()) return;
                try_triple(depth, g_.edges()[pos]);
                if (truncated_) return;
            }
        };
        if (s >= 0) {
            visit_span(g_.with_subject(uint32_t(s)));
        } else if (o >= 0) {
            visit_span(g_.with_object(uint32_t(o)));
        } else if (p >= 0) {
            visit_span(g_.with_predicate(uint32_t(p)));
        } else {
            for (uint32_t pos = 0; pos < g_.m(); ++pos) {
                if (out_of_budget()) return;
                try_triple(depth, g_.edges()[pos]);
                if (truncated_) return;
            }
        }
    }

    const KnowledgeGraph& g_;
    const Pattern& m_;
    MatchBudget budget_;
    std::optional<std::chrono::steady_clock::time_point> deadline_;
    uint64_t clock_check_ = 0;

    std::vector<std::vector<uint8_t>> candidates_;
    std::vector<uint32_t> order_;
    Bindings bindings_;
    std::vector<Triple> used_triples_;
    std::vector<Instance> result_;
    bool truncated_ = false;
};

} // namespace

MatchResult find_instances(const KnowledgeGraph& g, const Pattern& m,
                           const MatchBudget& budget) {
    Matcher matcher(g, m, budget);
    return matcher.run();
}

std::vector<Instance> prune_overlap(const std::vector<Instance>& instances,
                                    const Pattern& m) {
    std::vector<Instance> kept;
    std::unordered_set<uint64_t> covered;
    std::vector<uint64_t> produced;
    for (const Instance& inst : instances) {
        produced.clear();
        bool overlaps = false;
        for (const Triple& t : pattern::substitute(m, inst)) {
            uint64_t key = pack_triple(t);
            if (covered.count(key)) {
                overlaps = true;
                break;
            }
            produced.push_back(key);
        }
        if (overlaps) continue;
        covered.insert(produced.begin(), produced.end());
        kept.push_back(inst);
    }
    return kept;
}

} // namespace kgmotive::matcher
