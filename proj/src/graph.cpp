#include "kgmotive/graph.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <string>

namespace kgmotive::graph {

namespace {

// Counting-sort style postings: positions of edges() grouped by key, with
// positions ascending inside each group.
void build_postings(const std::vector<Triple>& edges, uint32_t key_count,
                    uint32_t (*key)(const Triple&), std::vector<uint32_t>& postings,
                    std::vector<uint32_t>& offset) {
    offset.assign(size_t(key_count) + 1, 0);
    for (const Triple& t : edges) ++offset[key(t) + 1];
    for (size_t k = 1; k < offset.size(); ++k) offset[k] += offset[k - 1];
    postings.resize(edges.size());
    std::vector<uint32_t> cursor(offset.begin(), offset.end() - 1);
    for (uint32_t i = 0; i < edges.size(); ++i) postings[cursor[key(edges[i])]++] = i;
}

} // namespace

KnowledgeGraph::KnowledgeGraph(uint32_t v, uint32_t r, std::vector<Triple> edges)
    : v_(v), r_(r), edges_(std::move(edges)) {
    for (const Triple& t : edges_) {
        require(t.subject < v_ && t.object < v_, "triple node index out of range");
        require(t.predicate < r_, "triple relation index out of range");
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    require(edges_.size() <= UINT32_MAX, "too many edges");

    subject_order_.resize(edges_.size());
    for (uint32_t i = 0; i < edges_.size(); ++i) subject_order_[i] = i;
    subject_offset_.assign(size_t(v_) + 1, 0);
    for (const Triple& t : edges_) ++subject_offset_[t.subject + 1];
    for (size_t k = 1; k < subject_offset_.size(); ++k)
        subject_offset_[k] += subject_offset_[k - 1];

    build_postings(edges_, v_, +[](const Triple& t) { return t.object; },
                   object_postings_, object_offset_);
    build_postings(edges_, r_, +[](const Triple& t) { return t.predicate; },
                   predicate_postings_, predicate_offset_);
}

bool KnowledgeGraph::contains(const Triple& t) const {
    return std::binary_search(edges_.begin(), edges_.end(), t);
}

std::span<const uint32_t> KnowledgeGraph::with_subject(uint32_t s) const {
    require(s < v_, "subject index out of range");
    return {subject_order_.data() + subject_offset_[s],
            subject_order_.data() + subject_offset_[s + 1]};
}

std::span<const uint32_t> KnowledgeGraph::with_object(uint32_t o) const {
    require(o < v_, "object index out of range");
    return {object_postings_.data() + object_offset_[o],
            object_postings_.data() + object_offset_[o + 1]};
}

std::span<const uint32_t> KnowledgeGraph::with_predicate(uint32_t p) const {
    require(p < r_, "predicate index out of range");
    return {predicate_postings_.data() + predicate_offset_[p],
            predicate_postings_.data() + predicate_offset_[p + 1]};
}

uint32_t Dictionary::intern_node(std::string_view term) {
    auto it = node_index_.find(std::string(term));
    if (it != node_index_.end()) return it->second;
    uint32_t index = uint32_t(node_terms_.size());
    node_terms_.emplace_back(term);
    node_index_.emplace(node_terms_.back(), index);
    return index;
}

uint32_t Dictionary::intern_relation(std::string_view term) {
    auto it = relation_index_.find(std::string(term));
    if (it != relation_index_.end()) return it->second;
    uint32_t index = uint32_t(relation_terms_.size());
    relation_terms_.emplace_back(term);
    relation_index_.emplace(relation_terms_.back(), index);
    return index;
}

const std::string& Dictionary::node_term(uint32_t index) const {
    require(index < node_terms_.size(), "node index out of dictionary range");
    return node_terms_[index];
}

const std::string& Dictionary::relation_term(uint32_t index) const {
    require(index < relation_terms_.size(), "relation index out of dictionary range");
    return relation_terms_[index];
}

std::optional<uint32_t> Dictionary::find_node(std::string_view term) const {
    auto it = node_index_.find(std::string(term));
    if (it == node_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<uint32_t> Dictionary::find_relation(std::string_view term) const {
    auto it = relation_index_.find(std::string(term));
    if (it == relation_index_.end()) return std::nullopt;
    return it->second;
}

namespace {

void skip_spaces(std::string_view line, size_t& pos) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
}

// Reads one N-Triples term starting at pos; returns its full surface form
// (including brackets/quotes and any ^^<dt> or @lang suffix).
std::optional<std::string_view> read_term(std::string_view line, size_t& pos,
                                          size_t line_number) {
    skip_spaces(line, pos);
    if (pos >= line.size() || line[pos] == '.') return std::nullopt;
    const size_t start = pos;
    if (line[pos] == '<') {
        size_t close = line.find('>', pos);
        if (close == std::string_view::npos)
            throw parse_error("line " + std::to_string(line_number) + ": unterminated IRI");
        pos = close + 1;
    } else if (line[pos] == '"') {
        ++pos;
        while (pos < line.size() && line[pos] != '"') {
            if (line[pos] == '\\' && pos + 1 < line.size()) ++pos;
            ++pos;
        }
        if (pos >= line.size())
            throw parse_error("line " + std::to_string(line_number) + ": unterminated literal");
        ++pos; // closing quote
        if (pos + 1 < line.size() && line[pos] == '^' && line[pos + 1] == '^') {
            pos += 2;
            if (pos < line.size() && line[pos] == '<') {
                size_t close = line.find('>', pos);
                if (close == std::string_view::npos)
                    throw parse_error("line " + std::to_string(line_number) +
                                      ": unterminated datatype IRI");
                pos = close + 1;
            }
        } else if (pos < line.size() && line[pos] == '@') {
            while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
        }
    } else {
        // Blank node or other bare token: runs to the next whitespace. A
        // terminating '.' glued to the token stays outside the term.
        while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
        if (pos > start + 1 && line[pos - 1] == '.') --pos;
    }
    return line.substr(start, pos - start);
}

} // namespace

LoadedGraph load_ntriples(std::istream& in) {
    Dictionary dict;
    std::vector<Triple> edges;

    std::string line;
    size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t pos = 0;
        skip_spaces(line, pos);
        if (pos >= line.size() || line[pos] == '#') continue;

        auto subject = read_term(line, pos, line_number);
        auto predicate = read_term(line, pos, line_number);
        auto object = read_term(line, pos, line_number);
        if (!subject || !predicate || !object)
            throw parse_error("line " + std::to_string(line_number) +
                              ": expected three terms before '.'");

        uint32_t s = dict.intern_node(*subject);
        uint32_t p = dict.intern_relation(*predicate);
        uint32_t o = dict.intern_node(*object);
        require(s <= kMaxIndex && o <= kMaxIndex && p <= kMaxIndex,
                "graph exceeds supported index range");
        edges.push_back({s, p, o});
    }

    KnowledgeGraph graph(dict.node_count(), dict.relation_count(), std::move(edges));
    return {std::move(graph), std::move(dict)};
}

DegreeSequence degree_sequence(const KnowledgeGraph& g) {
    DegreeSequence d;
    d.in.assign(g.v(), 0);
    d.out.assign(g.v(), 0);
    d.rel.assign(g.r(), 0);
    for (const Triple& t : g.edges()) {
        ++d.out[t.subject];
        ++d.in[t.object];
        ++d.rel[t.predicate];
    }
    return d;
}

KnowledgeGraph remove_triples(const KnowledgeGraph& g, std::span<const Triple> drop) {
    std::vector<Triple> sorted_drop(drop.begin(), drop.end());
    std::sort(sorted_drop.begin(), sorted_drop.end());
    sorted_drop.erase(std::unique(sorted_drop.begin(), sorted_drop.end()),
                      sorted_drop.end());
    for (const Triple& t : sorted_drop)
        require(g.contains(t), "remove_triples: triple not present in graph");

    std::vector<Triple> kept;
    kept.reserve(g.m() - sorted_drop.size());
    std::set_difference(g.edges().begin(), g.edges().end(), sorted_drop.begin(),
                        sorted_drop.end(), std::back_inserter(kept));
    return KnowledgeGraph(g.v(), g.r(), std::move(kept));
}

void write_edge_list(const KnowledgeGraph& g, std::ostream& out) {
    out << g.v() << ' ' << g.r() << ' ' << g.m() << '\n';
    for (const Triple& t : g.edges())
        out << t.subject << ' ' << t.predicate << ' ' << t.object << '\n';
}

KnowledgeGraph read_edge_list(std::istream& in) {
    uint64_t v = 0, r = 0, m = 0;
    if (!(in >> v >> r >> m)) throw parse_error("edge list: malformed header");
    require(v <= kMaxIndex + 1 && r <= kMaxIndex + 1, "edge list: counts out of range");
    std::vector<Triple> edges;
    edges.reserve(m);
    for (uint64_t i = 0; i < m; ++i) {
        uint64_t s = 0, p = 0, o = 0;
        if (!(in >> s >> p >> o))
            throw parse_error("edge list: truncated at edge " + std::to_string(i));
        if (s >= v || o >= v || p >= r)
            throw parse_error("edge list: index out of range at edge " + std::to_string(i));
        edges.push_back({uint32_t(s), uint32_t(p), uint32_t(o)});
    }
    return KnowledgeGraph(uint32_t(v), uint32_t(r), std::move(edges));
}

} // namespace kgmotive::graph
