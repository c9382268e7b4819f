// kgmotive: mines, scores, and matches network motifs in knowledge graphs,
// plus the synthetic-graph experiment protocols. See README.md for usage.

#include <algorithm>
#include <chrono>
#include <clocale>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kgmotive/graph.hpp"
#include "kgmotive/matcher.hpp"
#include "kgmotive/motifcode.hpp"
#include "kgmotive/pattern.hpp"
#include "kgmotive/report.hpp"
#include "kgmotive/rng.hpp"
#include "kgmotive/search.hpp"
#include "kgmotive/synth.hpp"

using namespace kgmotive;

namespace {

struct Options {
    uint64_t iters = 10000;
    uint32_t workers = 1;
    uint64_t seed = 0;
    double alpha = 0.5;      // annealing acceptance probability
    double py_alpha = 0.5;   // Pitman-Yor strength
    double py_discount = 0.1;
    double match_timeout = 5.0;
    std::optional<uint64_t> max_matches;
    uint64_t top = 100;
    bool latex = false;
    std::string prefixes_path;
    std::string out_dir = ".";
};

void add_common_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--workers", o.workers, "Search worker count");
    cmd->add_option("--iters", o.iters, "Annealing iterations per worker");
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--alpha", o.alpha, "Acceptance probability for worse candidates");
    cmd->add_option("--py-alpha", o.py_alpha, "Pitman-Yor strength parameter");
    cmd->add_option("--py-d", o.py_discount, "Pitman-Yor discount parameter");
    cmd->add_option("--match-timeout", o.match_timeout,
                    "Per-pattern match wall clock in seconds");
    cmd->add_option("--max-matches", o.max_matches,
                    "Instance cap per match; replaces the wall clock (reproducible)");
    cmd->add_option("--top", o.top, "Rows per result table");
    cmd->add_flag("--latex", o.latex, "Also write LaTeX longtable fragments");
    cmd->add_option("--prefixes", o.prefixes_path,
                    "Namespace table for LaTeX output: 'prefix base' lines");
    cmd->add_option("--out", o.out_dir, "Directory for result files");
}

uint32_t effective_workers(const Options& o) {
    if (const char* env = std::getenv("KGMOTIVE_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v >= 1 && v <= UINT32_MAX) return uint32_t(v);
        std::cerr << "warning: ignoring unparsable KGMOTIVE_THREADS='" << env << "'\n";
    }
    return o.workers;
}

matcher::MatchBudget budget_from(const Options& o) {
    if (o.max_matches) return matcher::MatchBudget::capped(*o.max_matches);
    return matcher::MatchBudget{o.match_timeout, std::nullopt};
}

search::SearchConfig search_config(const Options& o) {
    search::SearchConfig cfg;
    cfg.iterations = o.iters;
    cfg.workers = effective_workers(o);
    cfg.accept_prob = o.alpha;
    cfg.per_pattern_budget = budget_from(o);
    cfg.top_per_worker = std::max<uint64_t>(1000, o.top);
    cfg.rng_seed = o.seed;
    return cfg;
}

codes::PitmanYorConfig py_config(const Options& o) {
    codes::PitmanYorConfig py{o.py_alpha, o.py_discount};
    if (!py.valid()) throw parse_error("Pitman-Yor parameters must satisfy 0 <= d < 1, alpha > -d");
    return py;
}

graph::LoadedGraph load_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open input: " + path);
    return graph::load_ntriples(in);
}

report::PrefixTable load_prefixes(const Options& o) {
    if (o.prefixes_path.empty()) return {};
    std::ifstream in(o.prefixes_path);
    if (!in) throw parse_error("cannot open prefix table: " + o.prefixes_path);
    return report::PrefixTable::load(in);
}

std::ofstream open_result(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("cannot write result file: " + path.string());
    return out;
}

// Frequency-major ordering for the byfreq tables; ties resolve by score and
// then by the seed-free text rendering, keeping output order deterministic.
void sort_by_frequency(std::vector<motifcode::ScoredMotif>& motifs) {
    graph::Dictionary no_terms;
    std::vector<std::pair<std::string, size_t>> keyed;
    keyed.reserve(motifs.size());
    for (size_t i = 0; i < motifs.size(); ++i)
        keyed.emplace_back(pattern::print_pattern(motifs[i].pattern, no_terms), i);
    std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
        const auto& x = motifs[a.second];
        const auto& y = motifs[b.second];
        if (x.frequency != y.frequency) return x.frequency > y.frequency;
        if (x.log_factor != y.log_factor) return x.log_factor > y.log_factor;
        return a.first < b.first;
    });
    std::vector<motifcode::ScoredMotif> ordered;
    ordered.reserve(motifs.size());
    for (const auto& [text, index] : keyed) ordered.push_back(motifs[index]);
    motifs = std::move(ordered);
}

void truncate_to(std::vector<motifcode::ScoredMotif>& motifs, uint64_t top) {
    if (motifs.size() > top)
        motifs.erase(motifs.begin() + ptrdiff_t(top), motifs.end());
}

size_t count_positive(const std::vector<motifcode::ScoredMotif>& motifs) {
    size_t positives = 0;
    for (const auto& m : motifs)
        if (m.log_factor > 0.0) ++positives;
    return positives;
}

// Writes the two ranked tables (+ optional LaTeX), then the manifest.
void write_result_set(const Options& o, const std::vector<motifcode::ScoredMotif>& ranked,
                      const graph::Dictionary& dict, report::RunManifest manifest,
                      double wall_seconds) {
    std::vector<motifcode::ScoredMotif> byscore = ranked;
    truncate_to(byscore, o.top);
    std::vector<motifcode::ScoredMotif> byfreq = ranked;
    sort_by_frequency(byfreq);
    truncate_to(byfreq, o.top);

    {
        auto out = open_result(o.out_dir, "motifs-byscore.csv");
        report::write_motif_csv(out, byscore, dict);
    }
    {
        auto out = open_result(o.out_dir, "motifs-byfreq.csv");
        report::write_motif_csv(out, byfreq, dict);
    }
    if (o.latex) {
        const report::PrefixTable prefixes = load_prefixes(o);
        auto score_tex = open_result(o.out_dir, "motifs-byscore.latex");
        report::write_motif_latex(score_tex, byscore, dict, prefixes);
        auto freq_tex = open_result(o.out_dir, "motifs-byfreq.latex");
        report::write_motif_latex(freq_tex, byfreq, dict, prefixes);
    }
    manifest.wall_clock_seconds = wall_seconds;
    auto out = open_result(o.out_dir, "manifest.json");
    out << report::to_json(manifest);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int cmd_mine(const Options& o, const std::string& input) {
    const auto start = std::chrono::steady_clock::now();
    graph::LoadedGraph loaded = load_input(input);
    const search::SearchConfig cfg = search_config(o);
    std::vector<motifcode::ScoredMotif> ranked =
        search::run_search(loaded.graph, cfg, py_config(o), &std::cerr);

    report::RunManifest manifest;
    manifest.command = "mine";
    manifest.input = input;
    manifest.search = cfg;
    manifest.py = py_config(o);
    manifest.seed = o.seed;
    write_result_set(o, ranked, loaded.dictionary, manifest, seconds_since(start));
    std::cout << "positive log-factor motifs: " << count_positive(ranked) << "\n";
    return 0;
}

int cmd_score(const Options& o, const std::string& input, const std::string& pattern_text) {
    graph::LoadedGraph loaded = load_input(input);
    const pattern::Pattern m = pattern::parse_pattern(pattern_text, loaded.dictionary);
    motifcode::Scorer scorer(loaded.graph, py_config(o));
    const motifcode::ScoredMotif scored = scorer.score(m, budget_from(o));
    std::cout << "log_factor " << report::format_real(scored.log_factor, 6) << "\n"
              << "frequency " << scored.frequency << "\n"
              << "complete " << (scored.complete ? 1 : 0) << "\n"
              << "b_dim " << report::format_real(scored.breakdown.b_dim, 6) << "\n"
              << "b_pattern " << report::format_real(scored.breakdown.b_pattern, 6) << "\n"
              << "b_template " << report::format_real(scored.breakdown.b_template, 6) << "\n"
              << "b_instances " << report::format_real(scored.breakdown.b_instances, 6) << "\n"
              << "total " << report::format_real(scored.breakdown.total, 6) << "\n"
              << "null_bits " << report::format_real(scorer.null_bits(), 6) << "\n";
    return 0;
}

int cmd_match(const Options& o, const std::string& input, const std::string& pattern_text,
              bool pruned) {
    graph::LoadedGraph loaded = load_input(input);
    const pattern::Pattern m = pattern::parse_pattern(pattern_text, loaded.dictionary);
    matcher::MatchResult result = matcher::find_instances(loaded.graph, m, budget_from(o));
    if (pruned) result.instances = matcher::prune_overlap(result.instances, m);

    // Header names the variable slots; rows carry the bound terms.
    for (uint32_t i = 1; i <= m.var_nodes(); ++i)
        std::cout << (i > 1 ? "\t" : "") << "?n" << i;
    for (uint32_t i = 1; i <= m.var_rels(); ++i)
        std::cout << (m.var_nodes() > 0 || i > 1 ? "\t" : "") << "?p" << (m.var_nodes() + i);
    std::cout << "\n";
    for (const pattern::Instance& inst : result.instances) {
        bool first = true;
        for (uint32_t n : inst.nodes) {
            std::cout << (first ? "" : "\t") << loaded.dictionary.node_term(n);
            first = false;
        }
        for (uint32_t p : inst.rels) {
            std::cout << (first ? "" : "\t") << loaded.dictionary.relation_term(p);
            first = false;
        }
        std::cout << "\n";
    }
    std::cerr << (pruned ? "pruned instances: " : "instances: ") << result.instances.size()
              << (result.complete ? "" : " (truncated by budget)") << "\n";
    return 0;
}

std::string synth_spec_text(const synth::SynthSpec& spec) {
    std::ostringstream text;
    text << "synth n=" << spec.n << " m=" << spec.m << " r=" << spec.r << " k=" << spec.k
         << " seed=" << spec.rng_seed;
    return text.str();
}

int cmd_synth_single(const Options& o, synth::SynthSpec spec) {
    const auto start = std::chrono::steady_clock::now();
    spec.rng_seed = o.seed;
    Rng rng(spec.rng_seed);
    const graph::KnowledgeGraph base = synth::sample_er_kg(spec, rng);
    synth::PlantedPattern planted = synth::sample_planted(base, spec.k, rng);

    const graph::Dictionary no_terms; // synthetic nodes have no surface forms
    const pattern::Pattern canonical = pattern::canonicalize(planted.pattern);
    std::cout << "planted pattern: " << pattern::print_pattern(canonical, no_terms)
              << "\nplanted instances: " << planted.instances.size() << "\n";

    const search::SearchConfig cfg = search_config(o);
    std::vector<motifcode::ScoredMotif> ranked =
        search::run_search(planted.graph, cfg, py_config(o), &std::cerr);

    size_t rank = 0; // 1-based; 0 = not retained
    for (size_t i = 0; i < ranked.size(); ++i) {
        if (ranked[i].pattern == canonical) {
            rank = i + 1;
            break;
        }
    }
    std::cout << "positive log-factor motifs: " << count_positive(ranked) << "\n";
    if (rank > 0)
        std::cout << "planted pattern rank: " << rank << " (log_factor "
                  << report::format_real(ranked[rank - 1].log_factor, 6) << ")\n";
    else
        std::cout << "planted pattern rank: not retained\n";

    report::RunManifest manifest;
    manifest.command = "synth single";
    manifest.input = synth_spec_text(spec);
    manifest.search = cfg;
    manifest.py = py_config(o);
    manifest.seed = o.seed;
    write_result_set(o, ranked, no_terms, manifest, seconds_since(start));
    return 0;
}

int cmd_synth_repeat(const Options& o, synth::SynthSpec dims, uint64_t kmax, uint64_t kstep,
                     uint64_t repeats) {
    const auto start = std::chrono::steady_clock::now();
    if (kstep == 0) throw parse_error("--kstep must be at least 1");
    dims.rng_seed = o.seed;
    std::vector<uint64_t> k_values;
    for (uint64_t k = 0; k <= kmax; k += kstep) k_values.push_back(k);

    const std::vector<synth::InjectionRow> rows = synth::run_injection_experiment(
        dims, k_values, repeats, o.seed, budget_from(o), py_config(o));
    {
        auto out = open_result(o.out_dir, "ksweep.csv");
        report::write_injection_csv(out, rows);
    }

    report::RunManifest manifest;
    manifest.command = "synth repeat";
    manifest.input = synth_spec_text(dims) + " kmax=" + std::to_string(kmax) +
                     " kstep=" + std::to_string(kstep) +
                     " repeats=" + std::to_string(repeats);
    manifest.search = search_config(o);
    manifest.py = py_config(o);
    manifest.seed = o.seed;
    manifest.wall_clock_seconds = seconds_since(start);
    auto out = open_result(o.out_dir, "manifest.json");
    out << report::to_json(manifest);
    std::cout << "rows: " << rows.size() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");

    CLI::App app{"Network motif mining in knowledge graphs"};
    app.require_subcommand(1);
    Options o;

    std::string input, pattern_text;
    bool pruned = false;
    synth::SynthSpec spec{2000, 8000, 12, 0, 0};
    uint64_t kmax = 200, kstep = 50, repeats = 10;

    CLI::App* mine = app.add_subcommand("mine", "Search a graph for compressing motifs");
    mine->add_option("input", input, "N-Triples file")->required();
    add_common_flags(mine, o);

    CLI::App* score = app.add_subcommand("score", "Score one pattern against a graph");
    score->add_option("input", input, "N-Triples file")->required();
    score->add_option("pattern", pattern_text, "Pattern text, e.g. '?n1 <p> ?n2 .'")->required();
    add_common_flags(score, o);

    CLI::App* match = app.add_subcommand("match", "List a pattern's instances");
    match->add_option("input", input, "N-Triples file")->required();
    match->add_option("pattern", pattern_text, "Pattern text")->required();
    match->add_flag("--pruned", pruned, "Apply overlap pruning to the listing");
    add_common_flags(match, o);

    CLI::App* synth_cmd = app.add_subcommand("synth", "Random-graph experiment protocols");
    synth_cmd->require_subcommand(1);
    CLI::App* single = synth_cmd->add_subcommand(
        "single", "Plant k instances of a sampled pattern, then run a full search");
    single->add_option("--n", spec.n, "Graph nodes");
    single->add_option("--m", spec.m, "Graph edges");
    single->add_option("--r", spec.r, "Graph relations");
    single->add_option("--k", spec.k, "Instances to plant");
    add_common_flags(single, o);
    CLI::App* repeat = synth_cmd->add_subcommand(
        "repeat", "Sweep k, scoring one fresh sampled pattern per repeat");
    repeat->add_option("--n", spec.n, "Graph nodes");
    repeat->add_option("--m", spec.m, "Graph edges");
    repeat->add_option("--r", spec.r, "Graph relations");
    repeat->add_option("--kmax", kmax, "Largest k in the sweep");
    repeat->add_option("--kstep", kstep, "Spacing between k values");
    repeat->add_option("--repeats", repeats, "Repeats per k value");
    add_common_flags(repeat, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // usage problems are input errors
    }

    try {
        if (*mine) return cmd_mine(o, input);
        if (*score) return cmd_score(o, input, pattern_text);
        if (*match) return cmd_match(o, input, pattern_text, pruned);
        if (*single) return cmd_synth_single(o, spec);
        if (*repeat) return cmd_synth_repeat(o, spec, kmax, kstep, repeats);
        return 2; // unreachable: require_subcommand guards this
    } catch (const parse_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const synth::injection_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const pattern_error& e) {
        std::cerr << "pattern error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
}
