#pragma once

// Integer-indexed knowledge-graph data model, string<->index dictionary, and
// N-Triples ingestion. Graphs are immutable after construction and safe to
// share across threads.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgmotive/types.hpp"

namespace kgmotive::graph {

// Per-node and per-relation edge counts; each sequence sums to m.
struct DegreeSequence {
    std::vector<uint32_t> in;  // edges arriving at each node (as object)
    std::vector<uint32_t> out; // edges leaving each node (as subject)
    std::vector<uint32_t> rel; // edges carrying each relation
};

class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    // Edges are sorted and duplicates collapsed; indexes out of range throw.
    KnowledgeGraph(uint32_t v, uint32_t r, std::vector<Triple> edges);

    uint32_t v() const { return v_; }
    uint32_t r() const { return r_; }
    size_t m() const { return edges_.size(); }

    // Ascending (subject, predicate, object) order.
    const std::vector<Triple>& edges() const { return edges_; }

    bool contains(const Triple& t) const;

    // Positions into edges() of all edges with the given endpoint/label.
    // Subject ranges are contiguous thanks to the sort order; object and
    // predicate use precomputed postings. All spans list positions ascending.
    std::span<const uint32_t> with_subject(uint32_t s) const;
    std::span<const uint32_t> with_object(uint32_t o) const;
    std::span<const uint32_t> with_predicate(uint32_t p) const;

private:
    uint32_t v_ = 0;
    uint32_t r_ = 0;
    std::vector<Triple> edges_;
    std::vector<uint32_t> subject_order_; // identity permutation, kept so all
                                          // three accessors return spans
    std::vector<uint32_t> subject_offset_;
    std::vector<uint32_t> object_postings_;
    std::vector<uint32_t> object_offset_;
    std::vector<uint32_t> predicate_postings_;
    std::vector<uint32_t> predicate_offset_;
};

// Bijective maps between term strings and indices. Node and relation terms
// are independent namespaces. Terms keep their N-Triples surface form
// (<iri>, "literal"^^<dt>, _:blank), which makes an IRI and a literal with
// the same characters distinct by construction.
class Dictionary {
public:
    uint32_t intern_node(std::string_view term);
    uint32_t intern_relation(std::string_view term);

    const std::string& node_term(uint32_t index) const;
    const std::string& relation_term(uint32_t index) const;
    std::optional<uint32_t> find_node(std::string_view term) const;
    std::optional<uint32_t> find_relation(std::string_view term) const;

    uint32_t node_count() const { return uint32_t(node_terms_.size()); }
    uint32_t relation_count() const { return uint32_t(relation_terms_.size()); }

private:
    std::vector<std::string> node_terms_;
    std::vector<std::string> relation_terms_;
    std::unordered_map<std::string, uint32_t> node_index_;
    std::unordered_map<std::string, uint32_t> relation_index_;
};

struct LoadedGraph {
    KnowledgeGraph graph;
    Dictionary dictionary;
};

// Line-oriented N-Triples subset: IRIs, literals (with datatype/language
// suffix kept as part of the term), blank nodes. Blank lines and #-comments
// are skipped; malformed lines raise parse_error naming the line number.
// Distinct terms get indices in first-appearance order; duplicate triples
// collapse.
LoadedGraph load_ntriples(std::istream& in);

DegreeSequence degree_sequence(const KnowledgeGraph& g);

// Graph with edges = g.edges \ drop; v and r unchanged (nodes may become
// isolated). Any triple in drop missing from g is a contract violation.
KnowledgeGraph remove_triples(const KnowledgeGraph& g, std::span<const Triple> drop);

// Plain-text integer edge list: header line "v r m", then one "s p o" line
// per edge. Bit-exact convention: decimal integers, single spaces, \n.
void write_edge_list(const KnowledgeGraph& g, std::ostream& out);
KnowledgeGraph read_edge_list(std::istream& in);

} // namespace kgmotive::graph
