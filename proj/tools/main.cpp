// coremantle — reproducible experiments on the k-core of sparse random
// graphs: fixed-point analysis, peeling, Warning Propagation traces, tree
// process sampling, and neighbourhood-distribution comparisons.
#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "coremantle/empirics.hpp"
#include "coremantle/fixedpoint.hpp"
#include "coremantle/graph.hpp"
#include "coremantle/kcore.hpp"
#include "coremantle/trees.hpp"
#include "coremantle/version.hpp"
#include "coremantle/wp.hpp"

using namespace coremantle;
using nlohmann::ordered_json;

namespace {

// Stream-id allocation: graph replica r draws from stream 1000 + r; tree
// Monte Carlo loop L uses chunk streams 10000 + 1000*L + c; sequential
// tree emission uses stream 9000.
constexpr std::uint64_t kGraphStreamBase = 1000;
constexpr std::uint64_t kTreeEmitStream = 9000;
constexpr std::uint64_t kTreeLawStreamBase = 10000;
constexpr std::uint64_t kTreeLawStreamStride = 1000;

std::string fmt(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

// Collects tabular results plus the config echo, then renders CSV (with
// '#' header comments) or JSON. Identical config and seed give
// byte-identical output.
class Report {
public:
    Report(std::string subcommand, std::uint64_t seed) : subcommand_(std::move(subcommand)) {
        set("seed", std::to_string(seed));
    }

    void set(const std::string& key, const std::string& value) {
        config_.emplace_back(key, value);
    }
    void set(const std::string& key, double value) { set(key, fmt(value)); }
    void set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }

    void columns(std::vector<std::string> names) { columns_ = std::move(names); }
    void row(std::vector<std::string> values) { rows_.push_back(std::move(values)); }

    void extra(const std::string& key, ordered_json value) { extra_[key] = std::move(value); }

    std::string config_line() const {
        std::string line = "subcommand=" + subcommand_;
        for (const auto& [key, value] : config_)
            line += " " + key + "=" + value;
        return line;
    }

    void write_csv(std::ostream& out) const {
        const std::string config = config_line();
        char hash[32];
        std::snprintf(hash, sizeof(hash), "0x%016llx",
                      static_cast<unsigned long long>(fnv1a64(config)));
        out << "# coremantle " << kVersion << "\n";
        out << "# " << config << "\n";
        out << "# config_hash=" << hash << "\n";
        for (std::size_t i = 0; i < columns_.size(); ++i)
            out << (i ? "," : "") << columns_[i];
        out << "\n";
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << (i ? "," : "") << row[i];
            out << "\n";
        }
    }

    void write_json(std::ostream& out) const {
        const std::string config = config_line();
        char hash[32];
        std::snprintf(hash, sizeof(hash), "0x%016llx",
                      static_cast<unsigned long long>(fnv1a64(config)));
        ordered_json doc;
        doc["artifact_version"] = kVersion;
        doc["subcommand"] = subcommand_;
        ordered_json cfg;
        for (const auto& [key, value] : config_)
            cfg[key] = value;
        doc["config"] = cfg;
        doc["config_hash"] = hash;
        doc["columns"] = columns_;
        doc["rows"] = rows_;
        for (const auto& [key, value] : extra_.items())
            doc[key] = value;
        out << doc.dump(2) << "\n";
    }

private:
    std::string subcommand_;
    std::vector<std::pair<std::string, std::string>> config_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
    ordered_json extra_ = ordered_json::object();
};

struct CommonOpts {
    std::uint64_t seed = 1;
    std::string format = "csv";
    std::string output = "-";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--seed", opts.seed, "master seed; all randomness derives from it")
        ->capture_default_str();
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--output", opts.output, "output path, '-' for stdout")
        ->capture_default_str();
}

int emit(const Report& report, const CommonOpts& opts) {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (opts.output != "-") {
        file.open(opts.output, std::ios::binary);
        if (!file) {
            std::cerr << "error: cannot open output file " << opts.output << "\n";
            return 1;
        }
        out = &file;
    }
    if (opts.format == "json")
        report.write_json(*out);
    else
        report.write_csv(*out);
    return 0;
}

ordered_json classes_json(const empirics::ComparisonReport& report) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : report.per_class) {
        rows.push_back(ordered_json{{"code", row.code},
                                    {"freq_a", row.freq_a},
                                    {"freq_b", row.freq_b},
                                    {"abs_diff", row.abs_diff}});
    }
    return rows;
}

int cmd_fixed_point(double d, int k, double tol, const CommonOpts& opts) {
    Report report("fixed-point", opts.seed);
    report.set("d", d);
    report.set("k", std::to_string(k));
    report.set("tol", tol);
    try {
        const auto result = fixedpoint::solve_p_star({d, k}, tol);
        report.columns({"p_star", "q", "q_bar", "psi", "iterations", "residual"});
        report.row({fmt(result.p_star), fmt(result.q), fmt(result.q_bar), fmt(result.psi),
                    std::to_string(result.iterations), fmt(result.residual)});
        return emit(report, opts);
    } catch (const fixedpoint::SubcriticalError&) {
        std::cerr << "subcritical: d=" << fmt(d) << " is below the threshold d_" << k << "="
                  << fmt(fixedpoint::threshold_d_k(k)) << "\n";
        return 1;
    }
}

int cmd_threshold(int k, double tol, const CommonOpts& opts) {
    Report report("threshold", opts.seed);
    report.set("k", std::to_string(k));
    report.set("tol", tol);
    report.columns({"k", "d_k"});
    report.row({std::to_string(k), fmt(fixedpoint::threshold_d_k(k, tol))});
    return emit(report, opts);
}

int cmd_core_stats(double d, int k, std::uint32_t n, std::uint32_t replicas,
                   const CommonOpts& opts) {
    Report report("core-stats", opts.seed);
    report.set("d", d);
    report.set("k", std::to_string(k));
    report.set("n", static_cast<std::uint64_t>(n));
    report.set("replicas", static_cast<std::uint64_t>(replicas));

    std::vector<std::vector<std::string>> rows;
    double fraction_total = 0.0;
    for (std::uint32_t r = 0; r < replicas; ++r) {
        rng::Stream rng(opts.seed, kGraphStreamBase + r);
        const auto g = graph::sample_gnp(n, d / n, rng);
        const auto marking = kcore::peel_core(g, k);
        const double fraction = static_cast<double>(marking.core_size) / n;
        fraction_total += fraction;
        rows.push_back({std::to_string(r), std::to_string(g.edge_count()),
                        std::to_string(marking.core_size), fmt(fraction)});
    }
    const double mean = fraction_total / replicas;
    report.columns({"replica", "edges", "core_size", "core_fraction", "mean_core_fraction"});
    for (auto& row : rows) {
        row.push_back(fmt(mean));
        report.row(std::move(row));
    }
    return emit(report, opts);
}

int cmd_wp_trace(double d, int k, std::uint32_t n, std::uint32_t t, const CommonOpts& opts) {
    Report report("wp-trace", opts.seed);
    report.set("d", d);
    report.set("k", std::to_string(k));
    report.set("n", static_cast<std::uint64_t>(n));
    report.set("t", static_cast<std::uint64_t>(t));

    rng::Stream rng(opts.seed, kGraphStreamBase);
    const auto g = graph::sample_gnp(n, d / n, rng);
    const auto core = kcore::peel_core(g, k);
    const auto trace = wp::wp_density_trace(g, k, t, core);

    report.columns({"t", "message_density", "mark_fraction", "excess_fraction"});
    for (const auto& row : trace)
        report.row({std::to_string(row.t), fmt(row.message_density), fmt(row.mark_fraction),
                    fmt(row.excess_fraction)});
    return emit(report, opts);
}

int cmd_compare(double d, int k, std::uint32_t n, std::uint32_t s, std::uint64_t samples,
                std::uint32_t replicas, double tol, const std::string& classes_path,
                const CommonOpts& opts) {
    Report report("compare", opts.seed);
    report.set("d", d);
    report.set("k", std::to_string(k));
    report.set("n", static_cast<std::uint64_t>(n));
    report.set("s", static_cast<std::uint64_t>(s));
    report.set("samples", samples);
    report.set("replicas", static_cast<std::uint64_t>(replicas));

    fixedpoint::FixedPointResult fp;
    try {
        fp = fixedpoint::solve_p_star({d, k}, tol);
    } catch (const fixedpoint::SubcriticalError&) {
        std::cerr << "subcritical: d=" << fmt(d) << " is below the threshold d_" << k << "="
                  << fmt(fixedpoint::threshold_d_k(k)) << "; no tree law to compare against\n";
        return 1;
    }
    report.set("p_star", fp.p_star);

    // graph side: R independent graphs, peeled and tallied per depth
    std::vector<graph::SparseGraph> graphs;
    std::vector<kcore::CoreMarking> markings;
    for (std::uint32_t r = 0; r < replicas; ++r) {
        rng::Stream rng(opts.seed, kGraphStreamBase + r);
        graphs.push_back(graph::sample_gnp(n, d / n, rng));
        markings.push_back(kcore::peel_core(graphs.back(), k));
    }

    report.columns({"s", "tv", "mc_error_bound", "support_union", "chi_square", "chi_square_dof",
                    "cyclic_freq_graph", "tv_per_graph_min", "tv_per_graph_max",
                    "tv_per_graph_mean"});
    std::ofstream classes_file;
    if (!classes_path.empty()) {
        classes_file.open(classes_path, std::ios::binary);
        if (!classes_file) {
            std::cerr << "error: cannot open classes file " << classes_path << "\n";
            return 1;
        }
        classes_file << "s,code,freq_graph,freq_tree,abs_diff\n";
    }

    ordered_json classes_by_depth = ordered_json::object();
    for (std::uint32_t depth = 0; depth <= s; ++depth) {
        std::vector<empirics::NeighborhoodDistribution> per_graph;
        for (std::uint32_t r = 0; r < replicas; ++r)
            per_graph.push_back(empirics::empirical_neighborhoods(graphs[r], markings[r], depth));
        empirics::NeighborhoodDistribution merged = per_graph.front();
        for (std::uint32_t r = 1; r < replicas; ++r)
            merged.merge(per_graph[r]);
        merged.provenance = "graph R=" + std::to_string(replicas) + " n=" + std::to_string(n);

        const auto law = empirics::TreeLaw::five_type(d, k, fp.p_star);
        const auto tree_dist = empirics::mc_tree_law(
            law, depth, samples, opts.seed, kTreeLawStreamBase + kTreeLawStreamStride * depth);

        const auto comparison = empirics::tv_distance(merged, tree_dist);
        double per_min = 1.0, per_max = 0.0, per_sum = 0.0;
        for (const auto& dist : per_graph) {
            const double tv = empirics::tv_distance(dist, tree_dist).tv;
            per_min = std::min(per_min, tv);
            per_max = std::max(per_max, tv);
            per_sum += tv;
        }
        report.row({std::to_string(depth), fmt(comparison.tv), fmt(comparison.mc_error_bound),
                    std::to_string(comparison.support_union), fmt(comparison.chi_square),
                    std::to_string(comparison.chi_square_dof),
                    fmt(merged.frequency(canon::kCyclicCode)), fmt(per_min), fmt(per_max),
                    fmt(per_sum / replicas)});
        if (classes_file.is_open())
            for (const auto& row : comparison.per_class)
                classes_file << depth << ',' << row.code << ',' << fmt(row.freq_a) << ','
                             << fmt(row.freq_b) << ',' << fmt(row.abs_diff) << "\n";
        if (opts.format == "json")
            classes_by_depth[std::to_string(depth)] = classes_json(comparison);
    }
    if (opts.format == "json")
        report.extra("classes_by_depth", classes_by_depth);
    return emit(report, opts);
}

int cmd_tree_sample(const std::string& variant, double d, int k, std::uint32_t s,
                    std::uint64_t samples, double p_override, int t, double tol,
                    const CommonOpts& opts) {
    Report report("tree-sample", opts.seed);
    report.set("variant", variant);
    report.set("d", d);
    report.set("k", std::to_string(k));
    report.set("s", static_cast<std::uint64_t>(s));
    report.set("samples", samples);

    double p = p_override;
    if (p < 0.0 && (variant == "five_type" || variant == "two_type_star" || variant == "boundary")) {
        try {
            p = fixedpoint::solve_p_star({d, k}, tol).p_star;
        } catch (const fixedpoint::SubcriticalError&) {
            std::cerr << "subcritical: d=" << fmt(d) << " is below the threshold d_" << k << "="
                      << fmt(fixedpoint::threshold_d_k(k)) << "; pass --p explicitly\n";
            return 1;
        }
        report.set("p", p);
    } else if (p >= 0.0) {
        report.set("p", p);
    }
    if (variant == "bottomup")
        report.set("t", static_cast<std::uint64_t>(static_cast<std::uint32_t>(t)));

    rng::Stream rng(opts.seed, kTreeEmitStream);
    report.columns({"sample", "nodes", "tree"});
    for (std::uint64_t i = 0; i < samples; ++i) {
        trees::MarkedTree tree;
        if (variant == "plain_gw") {
            tree = trees::sample_gw(d, s, rng);
        } else if (variant == "two_type_star") {
            tree = trees::sample_two_type_star(trees::BranchingSpec::two_type_star(d, k, p), s, rng);
            trees::validate_two_type_star(tree, k);
        } else if (variant == "five_type") {
            tree = trees::sample_five_type(trees::BranchingSpec::five_type(d, k, p), s, rng);
            const auto stats = trees::validate_five_type(tree, k);
            if (stats.violations != 0) {
                std::cerr << "analysis error: sampled 5-type tree failed structural validation\n";
                return 1;
            }
        } else if (variant == "boundary") {
            auto gw = trees::sample_gw(d, s, rng);
            tree = trees::tree_wp_boundary(gw, k, p, static_cast<int>(s), rng);
        } else { // bottomup
            tree = trees::sample_bottomup_message_tree(d, k, t, s, rng);
        }
        report.row({std::to_string(i), std::to_string(tree.size()), trees::serialize(tree)});
    }
    return emit(report, opts);
}

int cmd_bottomup_vs_topdown(double d, int k, std::uint32_t s, std::uint64_t samples, int t,
                            double tol, const CommonOpts& opts) {
    Report report("bottomup-vs-topdown", opts.seed);
    report.set("d", d);
    report.set("k", std::to_string(k));
    report.set("s", static_cast<std::uint64_t>(s));
    report.set("samples", samples);
    report.set("t", static_cast<std::uint64_t>(static_cast<std::uint32_t>(t)));

    fixedpoint::FixedPointResult fp;
    try {
        fp = fixedpoint::solve_p_star({d, k}, tol);
    } catch (const fixedpoint::SubcriticalError&) {
        std::cerr << "subcritical: d=" << fmt(d) << " is below the threshold d_" << k << "="
                  << fmt(fixedpoint::threshold_d_k(k)) << "\n";
        return 1;
    }
    report.set("p_star", fp.p_star);

    const auto bottomup = empirics::mc_tree_law(empirics::TreeLaw::bottomup(d, k, t), s, samples,
                                                opts.seed, kTreeLawStreamBase);
    const auto boundary =
        empirics::mc_tree_law(empirics::TreeLaw::boundary(d, k, fp.p_star), s, samples, opts.seed,
                              kTreeLawStreamBase + kTreeLawStreamStride);
    const auto star =
        empirics::mc_tree_law(empirics::TreeLaw::two_type_star(d, k, fp.p_star), s, samples,
                              opts.seed, kTreeLawStreamBase + 2 * kTreeLawStreamStride);

    // 5-type: top-down derivation from the star tree vs the direct sampler
    const auto derived = empirics::mc_tree_codes(
        [&](rng::Stream& rng) {
            const auto spec = trees::BranchingSpec::two_type_star(d, k, fp.p_star);
            return trees::derive_top_down_marks(trees::sample_two_type_star(spec, s + 1, rng), k);
        },
        s, samples, opts.seed, kTreeLawStreamBase + 3 * kTreeLawStreamStride,
        "derived five-type");
    const auto direct = empirics::mc_tree_codes(
        [&](rng::Stream& rng) {
            const auto spec = trees::BranchingSpec::five_type(d, k, fp.p_star);
            return trees::sample_five_type(spec, s, rng);
        },
        s, samples, opts.seed, kTreeLawStreamBase + 4 * kTreeLawStreamStride, "direct five-type");

    report.columns({"comparison", "s", "tv", "mc_error_bound", "support_union", "chi_square",
                    "chi_square_dof"});
    const auto add_row = [&](const std::string& name, const empirics::ComparisonReport& cmp) {
        report.row({name, std::to_string(s), fmt(cmp.tv), fmt(cmp.mc_error_bound),
                    std::to_string(cmp.support_union), fmt(cmp.chi_square),
                    std::to_string(cmp.chi_square_dof)});
    };
    add_row("bottomup_vs_boundary", empirics::tv_distance(bottomup, boundary));
    add_row("boundary_vs_two_type_star", empirics::tv_distance(boundary, star));
    add_row("derived_vs_direct_five_type", empirics::tv_distance(derived, direct));
    return emit(report, opts);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coremantle: k-core structure experiments on sparse random graphs"};
    app.require_subcommand(1);
    app.footer("Thread budget: set CORE_MANTLE_THREADS to cap Monte Carlo parallelism.\n"
               "Exit codes: 0 success, 1 subcritical/analysis error, 2 usage error.");

    // resource caps, enforced as usage errors
    const auto d_range = CLI::Range(1e-6, 64.0);
    const auto k_range = CLI::Range(3, 50);
    const auto n_range = CLI::Range(std::uint32_t{1}, std::uint32_t{5000000});
    const auto s_range = CLI::Range(std::uint32_t{0}, std::uint32_t{5});
    const auto samples_range = CLI::Range(std::uint64_t{1}, std::uint64_t{10000000});
    const auto replicas_range = CLI::Range(std::uint32_t{1}, std::uint32_t{100});

    double d = 5.0, tol = 1e-12, p_override = -1.0;
    int k = 3, t = 0;
    std::uint32_t n = 100000, s = 2, replicas = 5, trace_t = 30;
    std::uint64_t samples = 100000;
    std::string variant, classes_path;

    CommonOpts fixed_opts;
    auto* fixed = app.add_subcommand("fixed-point", "solve for p*, q, q-bar and psi_k(d)");
    fixed->add_option("--d", d, "average degree")->required()->check(d_range);
    fixed->add_option("--k", k, "core order")->required()->check(k_range);
    fixed->add_option("--tol", tol, "fixed-point tolerance")->capture_default_str();
    add_common(fixed, fixed_opts);
    fixed->callback([&]() { std::exit(cmd_fixed_point(d, k, tol, fixed_opts)); });

    CommonOpts threshold_opts;
    auto* threshold = app.add_subcommand("threshold", "core-emergence threshold d_k");
    threshold->add_option("--k", k, "core order")->required()->check(k_range);
    threshold->add_option("--tol", tol, "minimization tolerance")->capture_default_str();
    add_common(threshold, threshold_opts);
    threshold->callback([&]() { std::exit(cmd_threshold(k, tol, threshold_opts)); });

    CommonOpts core_opts;
    auto* core = app.add_subcommand("core-stats", "k-core sizes over sampled graphs");
    core->add_option("--d", d, "average degree")->required()->check(d_range);
    core->add_option("--k", k, "core order")->required()->check(k_range);
    core->add_option("--n", n, "vertex count")->required()->check(n_range);
    core->add_option("--replicas", replicas, "independent graphs")->check(replicas_range)
        ->capture_default_str();
    add_common(core, core_opts);
    core->callback([&]() { std::exit(cmd_core_stats(d, k, n, replicas, core_opts)); });

    CommonOpts trace_opts;
    auto* trace = app.add_subcommand("wp-trace", "per-round Warning Propagation densities");
    trace->add_option("--d", d, "average degree")->required()->check(d_range);
    trace->add_option("--k", k, "core order")->required()->check(k_range);
    trace->add_option("--n", n, "vertex count")->required()->check(n_range);
    trace->add_option("--t", trace_t, "rounds to trace")
        ->check(CLI::Range(std::uint32_t{0}, std::uint32_t{100000}))
        ->capture_default_str();
    add_common(trace, trace_opts);
    trace->callback([&]() { std::exit(cmd_wp_trace(d, k, n, trace_t, trace_opts)); });

    CommonOpts compare_opts;
    auto* compare = app.add_subcommand(
        "compare", "core-marked neighbourhood distribution vs the limiting tree law");
    compare->add_option("--d", d, "average degree")->required()->check(d_range);
    compare->add_option("--k", k, "core order")->required()->check(k_range);
    compare->add_option("--n", n, "vertex count")->required()->check(n_range);
    compare->add_option("--s", s, "maximum neighbourhood depth")->required()->check(s_range);
    compare->add_option("--samples", samples, "tree Monte Carlo samples")->required()
        ->check(samples_range);
    compare->add_option("--replicas", replicas, "independent graphs")->check(replicas_range)
        ->capture_default_str();
    compare->add_option("--tol", tol, "fixed-point tolerance")->capture_default_str();
    compare->add_option("--classes", classes_path, "write per-class rows to this CSV file");
    add_common(compare, compare_opts);
    compare->callback([&]() {
        std::exit(cmd_compare(d, k, n, s, samples, replicas, tol, classes_path, compare_opts));
    });

    CommonOpts tree_opts;
    auto* tree = app.add_subcommand("tree-sample", "emit serialized tree-process samples");
    tree->add_option("--variant", variant, "process to sample")
        ->required()
        ->check(CLI::IsMember({"plain_gw", "two_type_star", "five_type", "boundary", "bottomup"}));
    tree->add_option("--d", d, "average degree")->required()->check(d_range);
    tree->add_option("--k", k, "core order")->required()->check(k_range);
    tree->add_option("--s", s, "truncation depth")->required()->check(s_range);
    tree->add_option("--samples", samples, "trees to emit")->required()
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000}));
    tree->add_option("--p", p_override, "process parameter p (default: p*)")
        ->check(CLI::Range(0.0, 1.0));
    tree->add_option("--t", t, "rounds (bottomup variant)")
        ->check(CLI::Range(0, 100000))->capture_default_str();
    tree->add_option("--tol", tol, "fixed-point tolerance")->capture_default_str();
    add_common(tree, tree_opts);
    tree->callback([&]() {
        std::exit(cmd_tree_sample(variant, d, k, s, samples, p_override, t, tol, tree_opts));
    });

    CommonOpts bt_opts;
    auto* bt = app.add_subcommand("bottomup-vs-topdown",
                                  "distributional agreement of the transition tree processes");
    bt->add_option("--d", d, "average degree")->required()->check(d_range);
    bt->add_option("--k", k, "core order")->required()->check(k_range);
    bt->add_option("--s", s, "truncation depth")->required()->check(s_range);
    bt->add_option("--samples", samples, "Monte Carlo samples per law")->required()
        ->check(samples_range);
    bt->add_option("--t", t, "bottom-up rounds")->required()->check(CLI::Range(0, 100000));
    bt->add_option("--tol", tol, "fixed-point tolerance")->capture_default_str();
    add_common(bt, bt_opts);
    bt->callback([&]() { std::exit(cmd_bottomup_vs_topdown(d, k, s, samples, t, tol, bt_opts)); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return 0; // --help / --version
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
