#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgmotive/codes.hpp"
#include "kgmotive/graph.hpp"
#include "kgmotive/motifcode.hpp"
#include "kgmotive/search.hpp"
#include "kgmotive/synth.hpp"

namespace kgmotive::report {

inline constexpr const char* kVersion = "0.1.0";

// Fixed-point decimal, locale-independent (std::to_chars under the hood).
std::string format_real(double value, int decimals);

// RFC 4180: fields containing commas, quotes, or newlines get quoted with
// embedded quotes doubled; everything else passes through.
std::string csv_field(const std::string& field);

// Text-mode escaping for the special characters LaTeX assigns meaning to.
std::string latex_escape(const std::string& text);

// Maps IRI namespaces to short prefixes for the LaTeX tables.
class PrefixTable {
  public:
    // Later entries win ties; lookup prefers the longest matching base.
    void add(std::string prefix, std::string base);

    // One "prefix base" pair per line; blank lines and '#' comments skipped.
    static PrefixTable load(std::istream& in);

    // "<http://ns#local>" -> "ns:local" when a base matches, else unchanged.
    std::string shorten(const std::string& term) const;

    size_t size() const { return entries_.size(); }

  private:
    std::vector<std::pair<std::string, std::string>> entries_; // prefix, base
};

// Pattern edges as separate "?n1 dc:creator ?n2." strings (prefix-shortened,
// unescaped; LaTeX escaping happens at emission).
std::vector<std::string> render_edges(const pattern::Pattern& m,
                                      const graph::Dictionary& dict,
                                      const PrefixTable& prefixes);

// header: log_factor,frequency,pattern,b_dim,b_pattern,b_template,b_instances,complete
void write_motif_csv(std::ostream& out, std::span<const motifcode::ScoredMotif> motifs,
                     const graph::Dictionary& dict);

// Longtable body fragment: one `lf & freq & \makecell{...} \\` row per motif
// with \hdashline separators, matching the published table shape.
void write_motif_latex(std::ostream& out, std::span<const motifcode::ScoredMotif> motifs,
                       const graph::Dictionary& dict, const PrefixTable& prefixes);

// header: k,repeat,frequency,log_factor
void write_injection_csv(std::ostream& out, std::span<const synth::InjectionRow> rows);

// Provenance sidecar written next to every result set.
struct RunManifest {
    std::string command;           // the subcommand that ran
    std::string input;             // data path, or the synthetic spec
    search::SearchConfig search;   // includes the match budget and seed
    codes::PitmanYorConfig py;
    std::string version = kVersion;
    double wall_clock_seconds = 0.0;
    uint64_t seed = 0;
};

std::string to_json(const RunManifest& manifest);

} // namespace kgmotive::report
