#pragma once

// Basic graph patterns: triples over labels where negative integers are
// variables (node variables first, then relation variables, each contiguous),
// plus the human-readable syntax and canonicalization for deduplication.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kgmotive/graph.hpp"
#include "kgmotive/types.hpp"

namespace kgmotive::pattern {

struct PatternEdge {
    int32_t subject;
    int32_t predicate;
    int32_t object;
    friend bool operator==(const PatternEdge&, const PatternEdge&) = default;
    friend auto operator<=>(const PatternEdge&, const PatternEdge&) = default;
};

// One binding of a pattern's variables: nodes[i] binds node variable -(i+1),
// rels[j] binds relation variable -(v'+j+1). Node bindings are pairwise
// distinct; relation bindings may repeat.
struct Instance {
    std::vector<uint32_t> nodes;
    std::vector<uint32_t> rels;
    friend bool operator==(const Instance&, const Instance&) = default;
    friend auto operator<=>(const Instance&, const Instance&) = default;
};

class Pattern {
public:
    // Validates the edges as given (labels already contiguous) and keeps
    // their order; use assemble() to build from arbitrary variable ids.
    explicit Pattern(std::vector<PatternEdge> edges);

    const std::vector<PatternEdge>& edges() const { return edges_; }
    uint32_t var_nodes() const { return var_nodes_; } // v'
    uint32_t var_rels() const { return var_rels_; }   // r'

    bool is_node_var(int32_t label) const {
        return label < 0 && uint32_t(-label) <= var_nodes_;
    }
    bool is_rel_var(int32_t label) const {
        return label < 0 && uint32_t(-label) > var_nodes_;
    }
    // Position of a variable label in an Instance's binding vectors.
    uint32_t node_var_slot(int32_t label) const { return uint32_t(-label) - 1; }
    uint32_t rel_var_slot(int32_t label) const {
        return uint32_t(-label) - var_nodes_ - 1;
    }

    friend bool operator==(const Pattern&, const Pattern&) = default;

private:
    std::vector<PatternEdge> edges_;
    uint32_t var_nodes_ = 0;
    uint32_t var_rels_ = 0;
};

// Building block for parsing and search transitions: a slot is either a
// constant graph index or a variable with an arbitrary local id.
struct Slot {
    bool is_var = false;
    uint32_t value = 0;
    friend bool operator==(const Slot&, const Slot&) = default;
};

struct EdgeDraft {
    Slot subject;
    Slot predicate;
    Slot object;
};

// Renumbers variable ids to contiguous negative labels in first-occurrence
// order (subject, predicate, object; edges in the given order) and validates.
Pattern assemble(std::span<const EdgeDraft> drafts);

// `.`-separated triple patterns; node variables ?nK, relation variables ?pK,
// constants as dictionary terms (or bare decimal indices for graphs without
// a dictionary). Unknown terms, disconnected patterns, and duplicate edges
// raise pattern_error.
Pattern parse_pattern(std::string_view text, const graph::Dictionary& dict);

// Inverse of parse_pattern up to variable renaming: variables print as
// ?n<-label> / ?p<-label>, constants through the dictionary (decimal when the
// index has no term).
std::string print_pattern(const Pattern& m, const graph::Dictionary& dict);

// Whether canonicalize() can handle the pattern: v' within the bound and few
// enough variable renumberings to enumerate.
bool canonicalizable(const Pattern& m, uint32_t max_var_nodes = 10);

// Lexicographically smallest sorted edge sequence over all renumberings of
// node variables and relation variables. Patterns beyond the size bound (v'
// above max_var_nodes, or too many renumberings to enumerate) raise
// pattern_error.
Pattern canonicalize(const Pattern& m, uint32_t max_var_nodes = 10);

// Triples produced by substituting a binding, in edge order.
std::vector<Triple> substitute(const Pattern& m, const Instance& inst);

// Full instance check against a graph: binding shapes, distinct nodes, all
// produced triples distinct and present.
bool is_valid_instance(const graph::KnowledgeGraph& g, const Pattern& m,
                       const Instance& inst);

} // namespace kgmotive::pattern
