#include "kgmotive/report.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace kgmotive::report {

std::string format_real(double value, int decimals) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                   std::chars_format::fixed, decimals);
    require(ec == std::errc(), "number does not fit its formatting buffer");
    return std::string(buf, end);
}

std::string csv_field(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string latex_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': case '%': case '$': case '#': case '_': case '{': case '}':
            out += '\\';
            out += c;
            break;
        case '~':
            out += "\\textasciitilde{}";
            break;
        case '^':
            out += "\\textasciicircum{}";
            break;
        case '\\':
            out += "\\textbackslash{}";
            break;
        default:
            out += c;
        }
    }
    return out;
}

void PrefixTable::add(std::string prefix, std::string base) {
    entries_.emplace_back(std::move(prefix), std::move(base));
    // Longest base first so nested namespaces resolve to the tighter prefix.
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const auto& a, const auto& b) {
                         return a.second.size() > b.second.size();
                     });
}

PrefixTable PrefixTable::load(std::istream& in) {
    PrefixTable table;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string prefix, base;
        if (!(fields >> prefix) || prefix[0] == '#') continue;
        if (!(fields >> base)) throw parse_error("prefix line without a namespace: " + line);
        table.add(std::move(prefix), std::move(base));
    }
    return table;
}

std::string PrefixTable::shorten(const std::string& term) const {
    if (term.size() < 2 || term.front() != '<' || term.back() != '>') return term;
    const std::string_view iri(term.data() + 1, term.size() - 2);
    for (const auto& [prefix, base] : entries_) {
        if (iri.size() > base.size() && iri.substr(0, base.size()) == base)
            return prefix + ":" + std::string(iri.substr(base.size()));
    }
    return term;
}

std::vector<std::string> render_edges(const pattern::Pattern& m,
                                      const graph::Dictionary& dict,
                                      const PrefixTable& prefixes) {
    auto node_text = [&](int32_t label) {
        if (label < 0) return "?n" + std::to_string(-label);
        if (uint32_t(label) < dict.node_count())
            return prefixes.shorten(dict.node_term(uint32_t(label)));
        return std::to_string(label);
    };
    auto rel_text = [&](int32_t label) {
        if (label < 0) return "?p" + std::to_string(-label);
        if (uint32_t(label) < dict.relation_count())
            return prefixes.shorten(dict.relation_term(uint32_t(label)));
        return std::to_string(label);
    };
    std::vector<std::string> lines;
    lines.reserve(m.edges().size());
    for (const pattern::PatternEdge& e : m.edges())
        lines.push_back(node_text(e.subject) + " " + rel_text(e.predicate) + " " +
                        node_text(e.object) + ".");
    return lines;
}

void write_motif_csv(std::ostream& out, std::span<const motifcode::ScoredMotif> motifs,
                     const graph::Dictionary& dict) {
    out << "log_factor,frequency,pattern,b_dim,b_pattern,b_template,b_instances,complete\n";
    for (const motifcode::ScoredMotif& motif : motifs) {
        out << format_real(motif.log_factor, 6) << ',' << motif.frequency << ','
            << csv_field(pattern::print_pattern(motif.pattern, dict)) << ','
            << format_real(motif.breakdown.b_dim, 6) << ','
            << format_real(motif.breakdown.b_pattern, 6) << ','
            << format_real(motif.breakdown.b_template, 6) << ','
            << format_real(motif.breakdown.b_instances, 6) << ','
            << (motif.complete ? 1 : 0) << '\n';
    }
}

void write_motif_latex(std::ostream& out, std::span<const motifcode::ScoredMotif> motifs,
                       const graph::Dictionary& dict, const PrefixTable& prefixes) {
    bool first = true;
    for (const motifcode::ScoredMotif& motif : motifs) {
        out << (first ? " " : " \\hdashline ");
        first = false;
        out << format_real(motif.log_factor, 1) << " & " << motif.frequency
            << " & \\makecell{";
        bool first_edge = true;
        for (const std::string& edge : render_edges(motif.pattern, dict, prefixes)) {
            if (!first_edge) out << " \\\\";
            first_edge = false;
            out << "\\texttt{" << latex_escape(edge) << "}";
        }
        out << " } \\\\ \n";
    }
}

void write_injection_csv(std::ostream& out, std::span<const synth::InjectionRow> rows) {
    out << "k,repeat,frequency,log_factor\n";
    for (const synth::InjectionRow& row : rows)
        out << row.k << ',' << row.repeat << ',' << row.frequency << ','
            << format_real(row.log_factor, 6) << '\n';
}

std::string to_json(const RunManifest& manifest) {
    nlohmann::json budget;
    if (manifest.search.per_pattern_budget.wall_clock_seconds)
        budget["wall_clock_seconds"] = *manifest.search.per_pattern_budget.wall_clock_seconds;
    else
        budget["wall_clock_seconds"] = nullptr;
    if (manifest.search.per_pattern_budget.max_instances)
        budget["max_instances"] = *manifest.search.per_pattern_budget.max_instances;
    else
        budget["max_instances"] = nullptr;

    nlohmann::json j{
        {"command", manifest.command},
        {"input", manifest.input},
        {"search",
         {{"iterations", manifest.search.iterations},
          {"workers", manifest.search.workers},
          {"accept_prob", manifest.search.accept_prob},
          {"top_per_worker", manifest.search.top_per_worker},
          {"rng_seed", manifest.search.rng_seed},
          {"per_pattern_budget", budget}}},
        {"pitman_yor", {{"alpha", manifest.py.alpha}, {"discount", manifest.py.discount}}},
        {"version", manifest.version},
        {"wall_clock_seconds", manifest.wall_clock_seconds},
        {"seed", manifest.seed},
    };
    return j.dump(2) + "\n";
}

} // namespace kgmotive::report
