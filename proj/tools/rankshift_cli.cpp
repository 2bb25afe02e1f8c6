// rankshift: command-line front end for the ranking-shift anomaly pipeline.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "rankshift/config.hpp"
#include "rankshift/csv.hpp"
#include "rankshift/eval.hpp"
#include "rankshift/pipeline.hpp"
#include "rankshift/rec_chart.hpp"
#include "rankshift/synth.hpp"

namespace fs = std::filesystem;
using namespace rankshift;

namespace {

struct LayerSource {
    std::string transactions;
    std::string edges;
    std::string schema;
    std::string level = "bic";
    std::string interval = "month";

    void add_options(CLI::App* cmd) {
        auto* tx = cmd->add_option("--transactions", transactions, "Transaction CSV");
        auto* ed = cmd->add_option("--edges", edges, "Edge-list CSV (interval,src,dst,weight)");
        tx->excludes(ed);
        cmd->add_option("--schema", schema, "Schema config (role=header lines)");
        cmd->add_option("--level", level, "Aggregation level: country, bic or iban")->capture_default_str();
        cmd->add_option("--interval", interval, "Interval unit: month, quarter or year")->capture_default_str();
    }

    PipelineConfig as_config() const {
        PipelineConfig c;
        c.transactions = transactions;
        c.edges = edges;
        c.schema = schema;
        c.level = parse_aggregation_level(level);
        c.interval = parse_interval_spec(interval).unit;
        return c;
    }
};

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(fmt::format("cannot write '{}'", path.string()));
    }
    return out;
}

std::ifstream open_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError(fmt::format("cannot open '{}'", path));
    }
    return in;
}

const TemporalLayer& find_layer(const std::vector<TemporalLayer>& layers, const std::string& label,
                                std::size_t fallback) {
    if (label.empty()) {
        return layers.at(fallback);
    }
    for (const auto& l : layers) {
        if (l.label() == label) {
            return l;
        }
    }
    throw ArgumentError(fmt::format("interval '{}' not found", label));
}

Binning parse_binning(const std::string& s) {
    if (s == "integer") {
        return Binning::Integer;
    }
    if (s == "linear") {
        return Binning::Linear;
    }
    if (s == "log") {
        return Binning::Log;
    }
    throw ArgumentError(fmt::format("unknown binning '{}'", s));
}

// ---------------------------------------------------------------------------

struct IngestStats {
    LayerSource source;
    std::string stats_out;
    std::string layers_out;
    std::string rejections_out;
    std::string distributions_out;
    std::string binning = "log";
    std::size_t bins = 5;
    unsigned threads = 1;

    int run() const {
        const auto config = source.as_config();
        const auto inputs = load_inputs(config);
        std::cerr << fmt::format("{} layers, {} nodes, {} rejected rows\n", inputs.layers.size(),
                                 inputs.layers.empty() ? 0 : inputs.layers.front().node_count(),
                                 inputs.rejected_rows);
        if (!rejections_out.empty() && !source.transactions.empty()) {
            auto in = open_file(source.transactions);
            SchemaConfig schema;
            if (!source.schema.empty()) {
                auto s = open_file(source.schema);
                schema = load_schema_config(s);
            }
            const auto parsed = parse_transactions(in, schema);
            auto out = open_output(rejections_out);
            out << "line,reason\n";
            for (const auto& r : parsed.rejections) {
                csv::write_row(out, {std::to_string(r.line), r.reason});
            }
        }
        std::ofstream file;
        std::ostream* out = &std::cout;
        if (!stats_out.empty()) {
            file = open_output(stats_out);
            out = &file;
        }
        write_stats_header(*out);
        for (const auto& layer : inputs.layers) {
            write_stats_row(*out, layer.label(), layer_stats(layer, threads));
        }
        if (!layers_out.empty()) {
            auto o = open_output(layers_out);
            write_edge_list(o, inputs.layers);
        }
        if (!distributions_out.empty()) {
            auto o = open_output(distributions_out);
            bool header = true;
            for (const auto& layer : inputs.layers) {
                distribution_export(o, layer, parse_binning(binning), bins, header);
                header = false;
            }
        }
        return exit_ok;
    }
};

struct SynthBa {
    std::size_t nodes = 5000;
    std::size_t m = 5;
    std::uint64_t seed = 1;
    double reshuffle = 0.1;
    std::uint64_t reshuffle_seed = 2;
    std::string out = "ba.csv";

    int run() const {
        std::vector<TemporalLayer> layers;
        layers.push_back(barabasi_albert(nodes, m, seed, "T0"));
        if (reshuffle > 0.0) {
            layers.push_back(reshuffle_edges(layers.front(), reshuffle, reshuffle_seed, "T1"));
        }
        auto o = open_output(out);
        write_edge_list(o, layers);
        return exit_ok;
    }
};

struct SynthTx {
    SynthProfile profile;
    std::size_t injections = 5;
    std::uint64_t seed = 1;
    std::string out_dir = "synth";

    int run() {
        profile.injections = random_injections(profile, injections, seed + 1);
        const auto data = synth_transactions(profile, seed);
        const fs::path dir(out_dir);
        {
            auto o = open_output(dir / "transactions.csv");
            write_transactions(o, data.transactions);
        }
        {
            auto o = open_output(dir / "ground_truth.csv");
            write_ground_truth(o, data.truth);
        }
        {
            auto o = open_output(dir / "risk.csv");
            write_risk_table(o, data.risk);
        }
        {
            std::set<std::string> injected;
            for (const auto& g : data.truth) {
                injected.insert(g.node_id);
            }
            auto o = open_output(dir / "labels.csv");
            o << "node_id,relevant\n";
            for (const auto& id : data.node_ids) {
                csv::write_row(o, {id, injected.count(id) != 0 ? "1" : "0"});
            }
        }
        std::cerr << fmt::format("{} transactions, {} injections written to {}\n", data.transactions.size(),
                                 data.truth.size(), dir.string());
        return exit_ok;
    }
};

struct Run {
    std::string config_file;
    std::map<std::string, std::string> overrides;

    void add_options(CLI::App* cmd) {
        cmd->add_option("-c,--config", config_file, "Config file ([section] key = value)");
        for (const auto& key : config_keys()) {
            cmd->add_option_function<std::string>(
                "--" + key, [this, key](const std::string& v) { overrides[key] = v; },
                fmt::format("Override {}", key));
        }
    }

    int run() const {
        PipelineConfig config;
        if (!config_file.empty()) {
            auto in = open_file(config_file);
            apply_settings(config, parse_config(in));
        }
        for (const auto& [key, value] : overrides) {
            apply_setting(config, key, value);
        }
        const auto result = run_pipeline(config);
        if (result.exit_code == exit_ok) {
            std::cerr << fmt::format("{} vs {}: {} metrics, {} nodes in the final lists, artifacts in {}\n",
                                     result.interval_x, result.interval_y, result.used_metrics.size(),
                                     result.stratified.size(), config.dir);
        } else {
            std::cerr << "stability gate failed for every metric\n";
        }
        return result.exit_code;
    }
};

struct Rec {
    LayerSource source;
    std::string metric = "pagerank";
    std::string interval_x;
    std::string interval_y;
    std::string strategy = "split";
    std::size_t k = 30;
    std::size_t k_pos = 15;
    std::size_t k_neg = 15;
    bool unweighted = false;
    std::string out = "rec";

    int run() const {
        const auto inputs = load_inputs(source.as_config());
        const auto& layers = inputs.layers;
        if (layers.size() < 2) {
            throw ArgumentError("need at least two layers");
        }
        const auto& lx = find_layer(layers, interval_x, layers.size() - 2);
        const auto& ly = find_layer(layers, interval_y, layers.size() - 1);
        CentralityParams params;
        params.pagerank_weighted = !unweighted;
        const Metric m = parse_metric(metric);
        const auto sx = compute_metric(lx, m, params);
        const auto sy = compute_metric(ly, m, params);
        const auto rx = rank_nodes(sx);
        const auto ry = rank_nodes(sy);
        const auto live = drop_silent(residuals(rx, ry), sx.scores, sy.scores);
        const auto picked = parse_selection_strategy(strategy) == SelectionStrategy::Split
                                ? select_topk_split(live, k_pos, k_neg)
                                : select_topk_abs(live, k);
        std::vector<NodeIndex> flagged;
        for (const auto& r : picked) {
            flagged.push_back(r.node);
        }
        const auto& nodes = *lx.nodes();
        {
            auto o = open_output(out + ".csv");
            write_rec_data(o, rx, ry, flagged, nodes);
        }
        {
            auto o = open_output(out + ".svg");
            write_rec_svg(o, rx, ry, flagged, nodes, fmt::format("{}: {} vs {}", metric, lx.label(), ly.label()));
        }
        const auto rho = spearman(rx, ry);
        const auto tau = kendall(rx, ry);
        std::cout << fmt::format("rho={} tau={} outliers={}\n", rho ? csv::format_number(*rho) : "undefined",
                                 tau ? csv::format_number(*tau) : "undefined", picked.size());
        return exit_ok;
    }
};

struct Eval {
    std::vector<std::string> lists;
    std::string labels;
    std::size_t tp_star = 0;
    std::string csv_out;

    int run() const {
        auto in = open_file(labels);
        const auto label_set = load_labels(in);
        std::vector<NamedList> named;
        for (const auto& spec : lists) {
            const auto eq = spec.find('=');
            NamedList nl;
            nl.name = eq == std::string::npos ? fs::path(spec).stem().string() : spec.substr(0, eq);
            const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
            auto f = open_file(path);
            std::string line;
            bool header = true;
            while (csv::next_line(f, line)) {
                const auto fields = csv::split(line);
                if (header) {
                    header = false;
                    if (!fields.empty() && (fields[0] == "node_id" || fields[0] == "node")) {
                        continue;
                    }
                }
                if (!fields.empty()) {
                    nl.ids.push_back(fields[0]);
                }
            }
            named.push_back(std::move(nl));
        }
        const auto report =
            evaluate(named, label_set, {}, tp_star > 0 ? std::optional<std::size_t>(tp_star) : std::nullopt);
        write_eval_table(std::cout, report);
        if (!csv_out.empty()) {
            auto o = open_output(csv_out);
            write_eval_csv(o, report);
        }
        return exit_ok;
    }
};

struct Expand {
    LayerSource source;
    std::vector<std::string> seeds;
    std::string seed_prefix;
    std::string out = "subnetwork.csv";
    std::string rings_out;

    int run() const {
        const auto inputs = load_inputs(source.as_config());
        if (inputs.layers.empty()) {
            throw ArgumentError("no layers in the input");
        }
        const auto& nodes = *inputs.layers.front().nodes();
        std::vector<NodeIndex> seed_index;
        for (const auto& s : seeds) {
            seed_index.push_back(nodes.index_of(s));
        }
        if (!seed_prefix.empty()) {
            for (NodeIndex i = 0; i < nodes.size(); ++i) {
                if (nodes.id(i).rfind(seed_prefix, 0) == 0) {
                    seed_index.push_back(i);
                }
            }
        }
        if (seed_index.empty()) {
            throw ArgumentError("the seed group is empty");
        }
        std::vector<TemporalLayer> subs;
        std::ofstream rings_file;
        if (!rings_out.empty()) {
            rings_file = open_output(rings_out);
            rings_file << "interval,node_id,ring\n";
        }
        for (const auto& layer : inputs.layers) {
            auto sub = expand_subnetwork(layer, seed_index);
            if (rings_file.is_open()) {
                for (std::size_t k = 0; k < sub.members.size(); ++k) {
                    csv::write_row(rings_file, {layer.label(), nodes.id(sub.members[k]), std::to_string(sub.ring[k])});
                }
            }
            std::cerr << fmt::format("{}: {} members, {} edges\n", layer.label(), sub.members.size(),
                                     sub.layer.edge_count());
            subs.push_back(std::move(sub.layer));
        }
        auto o = open_output(out);
        write_edge_list(o, subs);
        return exit_ok;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anomalous-node detection from centrality ranking shifts in temporal networks"};
    app.require_subcommand(1);

    IngestStats ingest;
    auto* ingest_cmd = app.add_subcommand("ingest-stats", "Aggregate input into layers and print layer statistics");
    ingest.source.add_options(ingest_cmd);
    ingest_cmd->add_option("--stats", ingest.stats_out, "Write statistics CSV here instead of stdout");
    ingest_cmd->add_option("--layers", ingest.layers_out, "Write the aggregated edge list");
    ingest_cmd->add_option("--rejections", ingest.rejections_out, "Write rejected rows (line,reason)");
    ingest_cmd->add_option("--distributions", ingest.distributions_out, "Write degree/strength/amount histograms");
    ingest_cmd->add_option("--binning", ingest.binning, "integer, linear or log")->capture_default_str();
    ingest_cmd->add_option("--bins", ingest.bins, "Bins (per decade for log)")->capture_default_str();
    ingest_cmd->add_option("--threads", ingest.threads, "Worker threads")->capture_default_str();

    auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic data");
    synth_cmd->require_subcommand(1);
    SynthBa ba;
    auto* ba_cmd = synth_cmd->add_subcommand("ba", "Preferential-attachment graph plus a reshuffled copy");
    ba_cmd->add_option("--nodes", ba.nodes)->capture_default_str();
    ba_cmd->add_option("--m", ba.m, "Edges per arriving node")->capture_default_str();
    ba_cmd->add_option("--seed", ba.seed)->capture_default_str();
    ba_cmd->add_option("--reshuffle", ba.reshuffle, "Fraction of edges rewired in T1 (0: no T1)")
        ->capture_default_str();
    ba_cmd->add_option("--reshuffle-seed", ba.reshuffle_seed)->capture_default_str();
    ba_cmd->add_option("-o,--out", ba.out)->capture_default_str();
    SynthTx tx;
    auto* tx_cmd = synth_cmd->add_subcommand("transactions", "Transaction stream with injected anomalies");
    tx_cmd->add_option("--nodes", tx.profile.nodes)->capture_default_str();
    tx_cmd->add_option("--months", tx.profile.months)->capture_default_str();
    tx_cmd->add_option("--countries", tx.profile.countries)->capture_default_str();
    tx_cmd->add_option("--partners", tx.profile.partners)->capture_default_str();
    tx_cmd->add_option("--noise", tx.profile.monthly_noise)->capture_default_str();
    tx_cmd->add_option("--injections", tx.injections, "Anomalies injected in the last month")->capture_default_str();
    tx_cmd->add_option("--seed", tx.seed)->capture_default_str();
    tx_cmd->add_option("-o,--out-dir", tx.out_dir)->capture_default_str();

    Run run;
    auto* run_cmd = app.add_subcommand("run", "Run the full pipeline; every config key is also a flag");
    run.add_options(run_cmd);

    Rec rec;
    auto* rec_cmd = app.add_subcommand("rec", "Ranking evolution chart for one metric and interval pair");
    rec.source.add_options(rec_cmd);
    rec_cmd->add_option("--metric", rec.metric)->capture_default_str();
    rec_cmd->add_option("--x", rec.interval_x, "Earlier interval (default: second to last)");
    rec_cmd->add_option("--y", rec.interval_y, "Later interval (default: last)");
    rec_cmd->add_option("--strategy", rec.strategy, "split or abs")->capture_default_str();
    rec_cmd->add_option("--k", rec.k)->capture_default_str();
    rec_cmd->add_option("--k-pos", rec.k_pos)->capture_default_str();
    rec_cmd->add_option("--k-neg", rec.k_neg)->capture_default_str();
    rec_cmd->add_flag("--unweighted", rec.unweighted, "Unweighted PageRank transitions");
    rec_cmd->add_option("-o,--out", rec.out, "Output prefix for .csv and .svg")->capture_default_str();

    Eval ev;
    auto* eval_cmd = app.add_subcommand("eval", "Precision/recall of ordered lists against labels");
    eval_cmd->add_option("--list", ev.lists, "[name=]path of a CSV whose first column holds node ids")->required();
    eval_cmd->add_option("--labels", ev.labels, "Label CSV id,flag")->required();
    eval_cmd->add_option("--tp-star", ev.tp_star, "Total relevant count (default: union of the lists)");
    eval_cmd->add_option("--csv", ev.csv_out, "Also write the report as CSV");

    Expand ex;
    auto* expand_cmd = app.add_subcommand("expand", "Two-ring subnetwork around a seed group");
    ex.source.level = "iban";
    ex.source.add_options(expand_cmd);
    expand_cmd->add_option("--seed", ex.seeds, "Seed node id (repeatable)");
    expand_cmd->add_option("--seed-prefix", ex.seed_prefix, "Every node id with this prefix is a seed");
    expand_cmd->add_option("-o,--out", ex.out)->capture_default_str();
    expand_cmd->add_option("--rings", ex.rings_out, "Write interval,node_id,ring");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_error;
    }

    try {
        if (*ingest_cmd) {
            return ingest.run();
        }
        if (*ba_cmd) {
            return ba.run();
        }
        if (*tx_cmd) {
            return tx.run();
        }
        if (*run_cmd) {
            return run.run();
        }
        if (*rec_cmd) {
            return rec.run();
        }
        if (*eval_cmd) {
            return ev.run();
        }
        if (*expand_cmd) {
            return ex.run();
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_error;
    }
    return exit_error;
}
