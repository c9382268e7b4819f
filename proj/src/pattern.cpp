#include "kgmotive/pattern.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>
#include <unordered_map>

namespace kgmotive::pattern {

namespace {

void check(bool ok, const char* message) {
    if (!ok) throw pattern_error(message);
}

// Union-find over a handful of labels, for the weak-connectivity check.
struct Components {
    std::unordered_map<int32_t, int32_t> parent;
    int32_t find(int32_t x) {
        auto [it, inserted] = parent.emplace(x, x);
        while (it->second != x) {
            x = it->second;
            it = parent.find(x);
        }
        return x;
    }
    void unite(int32_t a, int32_t b) { parent[find(a)] = find(b); }
};

} // namespace

Pattern::Pattern(std::vector<PatternEdge> edges) : edges_(std::move(edges)) {
    check(!edges_.empty(), "pattern must have at least one edge");

    // Collect variable labels and check the contiguity invariants.
    int32_t min_node_label = 0;
    int32_t min_rel_label = 0;
    std::vector<bool> node_seen, rel_seen;
    for (const PatternEdge& e : edges_) {
        min_node_label = std::min({min_node_label, e.subject, e.object});
        if (e.predicate < 0) min_rel_label = std::min(min_rel_label, e.predicate);
    }
    var_nodes_ = uint32_t(-min_node_label);
    check(min_rel_label == 0 || uint32_t(-min_rel_label) > var_nodes_,
          "relation variable labels must lie below node variable labels");
    var_rels_ = min_rel_label == 0 ? 0 : uint32_t(-min_rel_label) - var_nodes_;

    node_seen.assign(var_nodes_, false);
    rel_seen.assign(var_rels_, false);
    for (const PatternEdge& e : edges_) {
        for (int32_t label : {e.subject, e.object}) {
            if (label < 0) node_seen[uint32_t(-label) - 1] = true;
        }
        if (e.predicate < 0) {
            check(uint32_t(-e.predicate) > var_nodes_,
                  "relation variable label inside the node variable range");
            rel_seen[uint32_t(-e.predicate) - var_nodes_ - 1] = true;
        }
    }
    check(std::find(node_seen.begin(), node_seen.end(), false) == node_seen.end(),
          "node variable labels must be contiguous");
    check(std::find(rel_seen.begin(), rel_seen.end(), false) == rel_seen.end(),
          "relation variable labels must be contiguous");

    // No duplicate edges.
    std::vector<PatternEdge> sorted = edges_;
    std::sort(sorted.begin(), sorted.end());
    check(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          "pattern has duplicate edges");

    // Weak connectivity over node labels.
    Components components;
    for (const PatternEdge& e : edges_) components.unite(e.subject, e.object);
    const int32_t root = components.find(edges_.front().subject);
    for (const PatternEdge& e : edges_) {
        check(components.find(e.subject) == root && components.find(e.object) == root,
              "pattern is not connected");
    }
}

Pattern assemble(std::span<const EdgeDraft> drafts) {
    std::unordered_map<uint32_t, int32_t> node_vars;
    std::unordered_map<uint32_t, int32_t> rel_vars;
    // First pass numbers the node variables in order of first occurrence.
    for (const EdgeDraft& d : drafts) {
        for (const Slot* s : {&d.subject, &d.object}) {
            if (s->is_var)
                node_vars.try_emplace(s->value, -int32_t(node_vars.size()) - 1);
        }
    }
    const int32_t rel_base = -int32_t(node_vars.size());
    for (const EdgeDraft& d : drafts) {
        if (d.predicate.is_var)
            rel_vars.try_emplace(d.predicate.value, rel_base - int32_t(rel_vars.size()) - 1);
    }

    std::vector<PatternEdge> edges;
    edges.reserve(drafts.size());
    for (const EdgeDraft& d : drafts) {
        auto node_label = [&](const Slot& s) {
            return s.is_var ? node_vars.at(s.value) : int32_t(s.value);
        };
        int32_t predicate = d.predicate.is_var ? rel_vars.at(d.predicate.value)
                                               : int32_t(d.predicate.value);
        edges.push_back({node_label(d.subject), predicate, node_label(d.object)});
    }
    return Pattern(std::move(edges));
}

namespace {

// Scans one pattern token: a variable (?nK / ?pK), an N-Triples style term,
// a bare decimal index, or the `.` separator.
struct Token {
    enum Kind { NodeVar, RelVar, Term, Number, Dot } kind;
    std::string text; // variable name, term surface form, or digits
};

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    size_t pos = 0;
    auto skip = [&] {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' ||
                                     text[pos] == '\n' || text[pos] == '\r'))
            ++pos;
    };
    while (skip(), pos < text.size()) {
        const char c = text[pos];
        if (c == '.') {
            ++pos;
            tokens.push_back({Token::Dot, "."});
        } else if (c == '?') {
            size_t start = pos;
            while (pos < text.size() && !isspace(uint8_t(text[pos]))) ++pos;
            size_t end = pos;
            if (end > start + 1 && text[end - 1] == '.') --end, --pos;
            std::string_view tok = text.substr(start, end - start);
            check(tok.size() > 2 && (tok[1] == 'n' || tok[1] == 'p'),
                  "variables must look like ?nK or ?pK");
            tokens.push_back({tok[1] == 'n' ? Token::NodeVar : Token::RelVar,
                              std::string(tok.substr(2))});
        } else if (c == '<') {
            size_t close = text.find('>', pos);
            check(close != std::string_view::npos, "unterminated IRI in pattern");
            tokens.push_back({Token::Term, std::string(text.substr(pos, close + 1 - pos))});
            pos = close + 1;
        } else if (c == '"') {
            size_t start = pos++;
            while (pos < text.size() && text[pos] != '"') {
                if (text[pos] == '\\' && pos + 1 < text.size()) ++pos;
                ++pos;
            }
            check(pos < text.size(), "unterminated literal in pattern");
            ++pos;
            if (pos + 1 < text.size() && text[pos] == '^' && text[pos + 1] == '^') {
                pos += 2;
                if (pos < text.size() && text[pos] == '<') {
                    size_t close = text.find('>', pos);
                    check(close != std::string_view::npos, "unterminated datatype IRI");
                    pos = close + 1;
                }
            } else if (pos < text.size() && text[pos] == '@') {
                while (pos < text.size() && !isspace(uint8_t(text[pos]))) ++pos;
            }
            tokens.push_back({Token::Term, std::string(text.substr(start, pos - start))});
        } else if (isdigit(uint8_t(c))) {
            size_t start = pos;
            while (pos < text.size() && isdigit(uint8_t(text[pos]))) ++pos;
            tokens.push_back({Token::Number, std::string(text.substr(start, pos - start))});
        } else {
            // Blank node or other bare term; a glued trailing '.' separates.
            size_t start = pos;
            while (pos < text.size() && !isspace(uint8_t(text[pos]))) ++pos;
            size_t end = pos;
            if (end > start + 1 && text[end - 1] == '.') --end;
            tokens.push_back({Token::Term, std::string(text.substr(start, end - start))});
            pos = end;
        }
    }
    return tokens;
}

uint32_t parse_index(const std::string& digits) {
    uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    check(ec == std::errc() && ptr == digits.data() + digits.size(),
          "malformed numeric constant in pattern");
    return value;
}

} // namespace

Pattern parse_pattern(std::string_view text, const graph::Dictionary& dict) {
    const std::vector<Token> tokens = tokenize(text);
    std::vector<EdgeDraft> drafts;
    // Variable names map to stable local ids; assemble() renumbers.
    std::unordered_map<std::string, uint32_t> node_names, rel_names;

    size_t pos = 0;
    while (pos < tokens.size()) {
        Slot slots[3];
        for (int i = 0; i < 3; ++i) {
            check(pos < tokens.size() && tokens[pos].kind != Token::Dot,
                  "triple pattern needs three terms before '.'");
            const Token& t = tokens[pos++];
            const bool is_predicate = (i == 1);
            switch (t.kind) {
            case Token::NodeVar: {
                check(!is_predicate, "node variable used in relation position");
                auto [it, _] = node_names.try_emplace(t.text, uint32_t(node_names.size()));
                slots[i] = {true, it->second};
                break;
            }
            case Token::RelVar: {
                check(is_predicate, "relation variable used in node position");
                auto [it, _] = rel_names.try_emplace(t.text, uint32_t(rel_names.size()));
                slots[i] = {true, it->second};
                break;
            }
            case Token::Term: {
                auto index = is_predicate ? dict.find_relation(t.text) : dict.find_node(t.text);
                if (!index)
                    throw pattern_error("unknown " +
                                        std::string(is_predicate ? "relation" : "node") +
                                        " term: " + t.text);
                slots[i] = {false, *index};
                break;
            }
            case Token::Number:
                slots[i] = {false, parse_index(t.text)};
                break;
            case Token::Dot:
                break; // unreachable; guarded above
            }
        }
        check(pos < tokens.size() && tokens[pos].kind == Token::Dot,
              "triple pattern must end with '.'");
        ++pos;
        drafts.push_back({slots[0], slots[1], slots[2]});
    }
    check(!drafts.empty(), "pattern is empty");
    return assemble(drafts);
}

std::string print_pattern(const Pattern& m, const graph::Dictionary& dict) {
    std::string out;
    for (const PatternEdge& e : m.edges()) {
        if (!out.empty()) out += ' ';
        auto node_text = [&](int32_t label) {
            if (label < 0) return "?n" + std::to_string(-label);
            if (uint32_t(label) < dict.node_count()) return dict.node_term(uint32_t(label));
            return std::to_string(label);
        };
        out += node_text(e.subject);
        out += ' ';
        if (e.predicate < 0)
            out += "?p" + std::to_string(-e.predicate);
        else if (uint32_t(e.predicate) < dict.relation_count())
            out += dict.relation_term(uint32_t(e.predicate));
        else
            out += std::to_string(e.predicate);
        out += ' ';
        out += node_text(e.object);
        out += " .";
    }
    return out;
}

namespace {

// When no relation variable repeats, the optimal relation relabeling for a
// fixed node relabeling is direct: sort the variable-predicate edges by
// (subject, object) and hand out labels in ascending numeric order. An
// exchange argument shows any other assignment sorts lexicographically later.
bool rel_vars_single_use(const Pattern& m) {
    std::vector<uint32_t> uses(m.var_rels(), 0);
    for (const PatternEdge& e : m.edges())
        if (e.predicate < 0 && ++uses[m.rel_var_slot(e.predicate)] > 1) return false;
    return true;
}

} // namespace

bool canonicalizable(const Pattern& m, uint32_t max_var_nodes) {
    if (m.var_nodes() > max_var_nodes) return false;
    // Permutation count guard: v'! (* r'! when relation variables repeat)
    // sorted edge lists get compared.
    double permutations = 1.0;
    for (uint32_t i = 2; i <= m.var_nodes(); ++i) permutations *= double(i);
    if (!rel_vars_single_use(m))
        for (uint32_t i = 2; i <= m.var_rels(); ++i) permutations *= double(i);
    return permutations <= 4.0e6;
}

Pattern canonicalize(const Pattern& m, uint32_t max_var_nodes) {
    const uint32_t v = m.var_nodes();
    const uint32_t r = m.var_rels();
    if (!canonicalizable(m, max_var_nodes))
        throw pattern_error("pattern exceeds the canonicalization size bound");

    // node_map[k] = new magnitude for node label -(k+1); likewise rel_map.
    std::vector<int32_t> node_map(v), rel_map(r);
    std::iota(node_map.begin(), node_map.end(), 1);
    std::iota(rel_map.begin(), rel_map.end(), int32_t(v) + 1);

    std::vector<PatternEdge> best;
    std::vector<PatternEdge> candidate(m.edges().size());
    auto relabel_node = [&](int32_t label) {
        return label < 0 ? -node_map[uint32_t(-label) - 1] : label;
    };
    const bool single_use = rel_vars_single_use(m);
    std::vector<size_t> var_positions;

    do {
        if (single_use) {
            // Direct relation assignment (see rel_vars_single_use).
            var_positions.clear();
            for (size_t i = 0; i < m.edges().size(); ++i) {
                const PatternEdge& e = m.edges()[i];
                candidate[i] = {relabel_node(e.subject), e.predicate,
                                relabel_node(e.object)};
                if (e.predicate < 0) var_positions.push_back(i);
            }
            std::sort(var_positions.begin(), var_positions.end(),
                      [&](size_t a, size_t b) {
                          return std::tie(candidate[a].subject, candidate[a].object, a) <
                                 std::tie(candidate[b].subject, candidate[b].object, b);
                      });
            int32_t label = -int32_t(v + r);
            for (size_t i : var_positions) candidate[i].predicate = label++;
            std::sort(candidate.begin(), candidate.end());
            if (best.empty() || candidate < best) best = candidate;
            continue;
        }
        std::vector<int32_t> rel_try = rel_map;
        do {
            for (size_t i = 0; i < m.edges().size(); ++i) {
                const PatternEdge& e = m.edges()[i];
                int32_t predicate = e.predicate < 0
                                        ? -rel_try[uint32_t(-e.predicate) - v - 1]
                                        : e.predicate;
                candidate[i] = {relabel_node(e.subject), predicate,
                                relabel_node(e.object)};
            }
            std::sort(candidate.begin(), candidate.end());
            if (best.empty() || candidate < best) best = candidate;
        } while (std::next_permutation(rel_try.begin(), rel_try.end()));
    } while (std::next_permutation(node_map.begin(), node_map.end()));

    return Pattern(std::move(best));
}

std::vector<Triple> substitute(const Pattern& m, const Instance& inst) {
    require(inst.nodes.size() == m.var_nodes() && inst.rels.size() == m.var_rels(),
            "instance shape does not match pattern");
    std::vector<Triple> triples;
    triples.reserve(m.edges().size());
    for (const PatternEdge& e : m.edges()) {
        auto node = [&](int32_t label) {
            return label < 0 ? inst.nodes[m.node_var_slot(label)] : uint32_t(label);
        };
        uint32_t predicate =
            e.predicate < 0 ? inst.rels[m.rel_var_slot(e.predicate)] : uint32_t(e.predicate);
        triples.push_back({node(e.subject), predicate, node(e.object)});
    }
    return triples;
}

bool is_valid_instance(const graph::KnowledgeGraph& g, const Pattern& m,
                       const Instance& inst) {
    if (inst.nodes.size() != m.var_nodes() || inst.rels.size() != m.var_rels())
        return false;
    for (uint32_t n : inst.nodes)
        if (n >= g.v()) return false;
    for (uint32_t p : inst.rels)
        if (p >= g.r()) return false;
    std::vector<uint32_t> distinct = inst.nodes;
    std::sort(distinct.begin(), distinct.end());
    if (std::adjacent_find(distinct.begin(), distinct.end()) != distinct.end())
        return false;

    std::vector<Triple> produced = substitute(m, inst);
    std::sort(produced.begin(), produced.end());
    if (std::adjacent_find(produced.begin(), produced.end()) != produced.end())
        return false;
    for (const Triple& t : produced)
        if (!g.contains(t)) return false;
    return true;
}

} // namespace kgmotive::pattern
