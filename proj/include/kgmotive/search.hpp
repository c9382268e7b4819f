#pragma once

// Simulated-annealing motif search: seven pattern transitions, fixed-
// probability acceptance, parallel workers, canonical deduplication, and
// top-k collection per worker.

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "kgmotive/codes.hpp"
#include "kgmotive/graph.hpp"
#include "kgmotive/matcher.hpp"
#include "kgmotive/motifcode.hpp"
#include "kgmotive/pattern.hpp"
#include "kgmotive/rng.hpp"
#include "kgmotive/types.hpp"

namespace kgmotive::search {

using graph::KnowledgeGraph;
using motifcode::ScoredMotif;
using pattern::Instance;
using pattern::Pattern;

// The chain ran out of applicable transitions; the annealer restarts from a
// fresh initial pattern when it sees this.
struct stuck_error : error {
    using error::error;
};

struct SearchConfig {
    uint64_t iterations = 1;   // scoring events per worker
    uint32_t workers = 1;
    double accept_prob = 0.5;  // chance of moving to a worse-or-equal pattern
    matcher::MatchBudget per_pattern_budget;
    uint64_t top_per_worker = 1000;
    uint64_t rng_seed = 0;
};

// A uniformly random non-self-loop triple with its relation made a variable.
// Self-loop draws are resampled; m failed attempts raise error (a pattern
// cannot bind one node to two distinct node variables).
Pattern initial_pattern(const KnowledgeGraph& g, Rng& rng);

// The annealer's acceptance rule: a strictly lower total codelength is always
// accepted without consuming randomness; a worse-or-equal candidate is
// accepted iff the next uniform draw falls below accept_prob.
bool accept_candidate(Bits candidate_total, Bits current_total, double accept_prob,
                      Rng& rng);

// Applies one uniformly chosen move out of seven: extend by an adjacent
// constant triple, make a node value a variable, make one edge's relation a
// fresh variable, bind a node variable to a constant from an instance, bind
// a relation variable likewise, remove an edge (staying connected), couple
// two relation variables that co-bind in some instance. Inapplicable or
// invalidity-producing moves are resampled; when every kind is exhausted a
// stuck_error escapes. inst must hold current (pruned) instances of m.
Pattern transition(const Pattern& m, const KnowledgeGraph& g,
                   std::span<const Instance> inst, Rng& rng);

// One annealing chain: cfg.iterations scoring events starting from
// initial_pattern, recording the best score of every canonical pattern
// encountered; returns the top_per_worker entries by log-factor. The chain's
// rng is derived from (cfg.rng_seed, worker_id).
std::vector<ScoredMotif> anneal(const KnowledgeGraph& g, const SearchConfig& cfg,
                                uint32_t worker_id, codes::PitmanYorConfig py = {},
                                std::ostream* progress = nullptr);

// All workers, merged: deduplicates by canonical pattern keeping the best
// score, then sorts by log-factor descending, frequency descending, canonical
// pattern text ascending. Progress lines (`worker,iter,best_logfactor`) go to
// *progress when set.
std::vector<ScoredMotif> run_search(const KnowledgeGraph& g, const SearchConfig& cfg,
                                    codes::PitmanYorConfig py = {},
                                    std::ostream* progress = nullptr);

} // namespace kgmotive::search
