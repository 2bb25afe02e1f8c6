#include "rankshift/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <thread>

#include "rankshift/csv.hpp"
#include "rankshift/rec_chart.hpp"

namespace rankshift {

namespace {

std::ifstream open_input(const std::string& path, std::string_view what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError(fmt::format("cannot open {} '{}'", what, path));
    }
    return in;
}

/// Runs fn(0..count-1) on up to `threads` workers. Results must go to
/// per-index slots; any exception is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(1U, threads), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

class Artifacts {
public:
    Artifacts(const std::optional<std::filesystem::path>& root, std::vector<ManifestEntry>& manifest)
        : root_(root), manifest_(manifest) {}

    template <typename Fn>
    void write(const std::string& rel, const std::string& step, Fn&& fn) {
        if (!root_) {
            return;
        }
        const auto path = *root_ / rel;
        std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw Error(fmt::format("cannot write '{}'", path.string()));
        }
        fn(out);
        out.flush();
        if (!out) {
            throw Error(fmt::format("write failed for '{}'", path.string()));
        }
        manifest_.push_back({rel, step});
    }

    void finish() {
        if (!root_) {
            return;
        }
        manifest_.push_back({"manifest.csv", "manifest"});
        write_manifest();
    }

private:
    void write_manifest() {
        std::ofstream out(*root_ / "manifest.csv", std::ios::binary);
        out << "file,step\n";
        for (const auto& e : manifest_) {
            csv::write_row(out, {e.file, e.step});
        }
        if (!out) {
            throw Error("cannot write manifest.csv");
        }
    }

    std::optional<std::filesystem::path> root_;
    std::vector<ManifestEntry>& manifest_;
};

std::size_t layer_index(const std::vector<TemporalLayer>& layers, const std::string& label) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].label() == label) {
            return i;
        }
    }
    throw ArgumentError(fmt::format("interval '{}' not found among the layers", label));
}

std::vector<std::string> ids_of(std::span<const FinalEntry> entries, const NodeSet& nodes) {
    std::vector<std::string> out;
    for (const auto& e : entries) {
        out.push_back(nodes.id(e.node));
    }
    return out;
}

}  // namespace

PipelineInputs load_inputs(const PipelineConfig& config) {
    if (config.transactions.empty() == config.edges.empty()) {
        throw ArgumentError("exactly one of input.transactions and input.edges must be set");
    }
    PipelineInputs inputs;
    std::optional<RiskTable> risk;
    if (!config.risk_table.empty()) {
        auto in = open_input(config.risk_table, "risk table");
        risk = load_risk_table(in, config.risk_default);
    }
    if (!config.labels.empty()) {
        auto in = open_input(config.labels, "label file");
        inputs.labels = load_labels(in);
    }

    if (!config.edges.empty()) {
        auto in = open_input(config.edges, "edge list");
        inputs.layers = read_edge_list(in);
        if (risk && !inputs.layers.empty()) {
            const auto& nodes = *inputs.layers.front().nodes();
            for (const auto& id : nodes.ids()) {
                inputs.node_risk.emplace_back(risk->lookup(id));
            }
        }
        return inputs;
    }

    SchemaConfig schema;
    if (!config.schema.empty()) {
        auto in = open_input(config.schema, "schema config");
        schema = load_schema_config(in);
    }
    auto in = open_input(config.transactions, "transaction file");
    auto parsed = parse_transactions(in, schema);
    inputs.rejected_rows = parsed.rejections.size();
    for (const auto& r : parsed.rejections) {
        warn(fmt::format("{}: line {}: {}", config.transactions, r.line, r.reason));
    }
    inputs.layers = aggregate(parsed.transactions, config.level, IntervalSpec{config.interval});
    if (risk && !inputs.layers.empty()) {
        const auto countries =
            node_countries(parsed.transactions, config.level, *inputs.layers.front().nodes(), *risk);
        inputs.node_risk = node_risk_levels(countries, *risk);
    }
    return inputs;
}

PipelineResult run_pipeline(const PipelineConfig& config, const PipelineInputs& inputs,
                            const std::optional<std::filesystem::path>& out_dir) {
    config.validate();
    const auto& layers = inputs.layers;
    if (layers.size() < 2) {
        throw ArgumentError(fmt::format("need at least two layers, got {}", layers.size()));
    }
    const NodeSet& nodes = *layers.front().nodes();

    PipelineResult result;
    Artifacts art(out_dir, result.manifest);
    art.write("config.ini", "config", [&](std::ostream& o) { write_config(o, config); });

    // Layers and their descriptive statistics.
    {
        std::vector<std::optional<GraphStats>> stats(layers.size());
        parallel_for(layers.size(), config.centrality.threads, [&](std::size_t i) {
            if (layers[i].node_count() >= 2) {
                stats[i] = layer_stats(layers[i]);
            }
        });
        art.write("layer_stats.csv", "layer statistics", [&](std::ostream& o) {
            write_stats_header(o);
            for (std::size_t i = 0; i < layers.size(); ++i) {
                if (stats[i]) {
                    write_stats_row(o, layers[i].label(), *stats[i]);
                }
            }
        });
    }

    // Centralities and rankings for every (metric, layer).
    const auto& metrics = config.metrics;
    const std::size_t L = layers.size();
    std::vector<std::vector<std::optional<CentralityVector>>> scores(metrics.size(),
                                                                     std::vector<std::optional<CentralityVector>>(L));
    std::vector<std::string> failures(metrics.size() * L);
    parallel_for(metrics.size() * L, config.centrality.threads, [&](std::size_t task) {
        const std::size_t m = task / L;
        const std::size_t l = task % L;
        try {
            scores[m][l] = compute_metric(layers[l], metrics[m], config.centrality);
        } catch (const Error& e) {
            failures[task] = e.what();
        }
    });

    std::vector<Metric> computed;
    std::vector<std::vector<Ranking>> rankings;
    for (std::size_t m = 0; m < metrics.size(); ++m) {
        std::string failure;
        for (std::size_t l = 0; l < L && failure.empty(); ++l) {
            if (!failures[m * L + l].empty()) {
                failure = fmt::format("{} on {}: {}", to_string(metrics[m]), layers[l].label(), failures[m * L + l]);
            }
        }
        if (!failure.empty()) {
            warn(fmt::format("metric skipped, centrality failed: {}", failure));
            continue;
        }
        computed.push_back(metrics[m]);
        auto& seq = rankings.emplace_back();
        for (std::size_t l = 0; l < L; ++l) {
            seq.push_back(rank_nodes(*scores[m][l]));
        }
        const std::string name(to_string(metrics[m]));
        art.write("centrality/" + name + ".csv", "centrality", [&](std::ostream& o) {
            o << "node_id,metric,score,interval\n";
            for (std::size_t l = 0; l < L; ++l) {
                const auto& v = *scores[m][l];
                for (NodeIndex i = 0; i < v.scores.size(); ++i) {
                    csv::write_row(o, {nodes.id(i), name, csv::format_number(v.scores[i]), v.interval});
                }
            }
        });
        art.write("rankings/" + name + ".csv", "ranking", [&](std::ostream& o) {
            for (std::size_t l = 0; l < L; ++l) {
                write_ranking(o, seq[l], nodes, l == 0);
            }
        });
    }
    if (computed.empty()) {
        throw Error("no metric could be computed on every layer");
    }

    // Stability gate.
    result.stability = stability_check(rankings, config.theta, config.repetitions, config.seed);
    for (std::size_t s = 0; s < computed.size(); ++s) {
        result.stability.metrics[s].metric = computed[s];
    }
    art.write("stability.csv", "stability gate", [&](std::ostream& o) { write_stability_report(o, result.stability); });
    if (!result.stability.any_valid()) {
        warn("stability gate failed for every metric; no outliers produced");
        result.exit_code = exit_stability_failed;
        art.finish();
        return result;
    }

    const std::size_t ix = config.interval_x.empty() ? L - 2 : layer_index(layers, config.interval_x);
    const std::size_t iy = config.interval_y.empty() ? L - 1 : layer_index(layers, config.interval_y);
    if (ix == iy) {
        throw ArgumentError("detection.interval_x and detection.interval_y name the same layer");
    }
    result.interval_x = layers[ix].label();
    result.interval_y = layers[iy].label();

    const bool filtering = config.t_hr > 0.0;
    if (filtering && inputs.node_risk.empty()) {
        warn("filter enabled without a risk table: every node is kept as unresolved-risk");
    }
    const auto dhra = delta_hra(layers[ix], layers[iy], inputs.node_risk);

    // Residuals, selection and filtering per valid metric.
    std::vector<std::size_t> slots;
    for (std::size_t s = 0; s < computed.size(); ++s) {
        if (result.stability.metrics[s].valid) {
            slots.push_back(s);
        } else {
            warn(fmt::format("metric {} failed the stability gate and is skipped", to_string(computed[s])));
        }
    }
    std::vector<std::vector<OutlierRecord>> lists(slots.size());
    std::vector<FilterResult> filtered(slots.size());
    parallel_for(slots.size(), config.centrality.threads, [&](std::size_t k) {
        const std::size_t s = slots[k];
        const std::size_t m = static_cast<std::size_t>(std::find(metrics.begin(), metrics.end(), computed[s]) -
                                                       metrics.begin());
        const auto& rx = rankings[s][ix];
        const auto& ry = rankings[s][iy];
        const auto all = residuals(rx, ry);
        const auto live = drop_silent(all, scores[m][ix]->scores, scores[m][iy]->scores);
        const auto picked = config.strategy == SelectionStrategy::Split
                                ? select_topk_split(live, config.k_pos, config.k_neg)
                                : select_topk_abs(live, config.k);
        lists[k] = make_outliers(picked, rx, ry);
        for (auto& r : lists[k]) {
            r.delta_hra = dhra[r.node];
        }
        if (filtering) {
            filtered[k] = threshold_filter(lists[k], layers[ix], layers[iy], inputs.node_risk, config.t_hr,
                                           config.multiplier);
        } else {
            filtered[k].kept = lists[k];
        }
    });

    std::vector<std::vector<OutlierRecord>> final_inputs;
    for (std::size_t k = 0; k < slots.size(); ++k) {
        const std::size_t s = slots[k];
        const Metric metric = computed[s];
        const std::string name(to_string(metric));
        std::vector<NodeIndex> flagged;
        for (const auto& r : lists[k]) {
            flagged.push_back(r.node);
        }
        const auto& rx = rankings[s][ix];
        const auto& ry = rankings[s][iy];
        art.write("rec/" + name + ".csv", "REC chart data",
                  [&](std::ostream& o) { write_rec_data(o, rx, ry, flagged, nodes); });
        art.write("rec/" + name + ".svg", "REC chart", [&](std::ostream& o) {
            write_rec_svg(o, rx, ry, flagged, nodes,
                          fmt::format("{}: {} vs {}", name, result.interval_x, result.interval_y));
        });
        art.write("outliers/" + name + ".csv", "top-K selection",
                  [&](std::ostream& o) { write_outliers(o, lists[k], nodes); });
        if (filtering) {
            art.write("filtered/" + name + ".csv", "threshold filter",
                      [&](std::ostream& o) { write_outliers(o, filtered[k].kept, nodes); });
            art.write("filtered/" + name + "_removed.csv", "threshold filter",
                      [&](std::ostream& o) { write_removal_log(o, filtered[k].removed, nodes); });
        }
        result.used_metrics.push_back(metric);
        result.outliers[metric] = filtered[k].kept;
        final_inputs.push_back(filtered[k].kept);
    }

    // Merged final lists.
    result.mixed = mixed_sort(final_inputs, dhra);
    result.stratified = stratified_sort(final_inputs, dhra);
    art.write("final_mixed.csv", "mixed sort", [&](std::ostream& o) { write_final_list(o, result.mixed, nodes); });
    art.write("final_stratified.csv", "stratified sort",
              [&](std::ostream& o) { write_final_list(o, result.stratified, nodes); });

    if (inputs.labels) {
        std::vector<NamedList> named;
        for (const auto& [metric, records] : result.outliers) {
            auto& nl = named.emplace_back();
            nl.name = std::string(to_string(metric));
            for (const auto& r : records) {
                nl.ids.push_back(nodes.id(r.node));
            }
        }
        named.push_back({"mixed", ids_of(result.mixed, nodes)});
        named.push_back({"stratified", ids_of(result.stratified, nodes)});
        result.eval = evaluate(named, *inputs.labels);
        art.write("eval.csv", "evaluation", [&](std::ostream& o) { write_eval_csv(o, *result.eval); });
        art.write("eval.txt", "evaluation", [&](std::ostream& o) { write_eval_table(o, *result.eval); });
    }

    art.finish();
    return result;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
    config.validate();
    const auto inputs = load_inputs(config);
    return run_pipeline(config, inputs, std::filesystem::path(config.dir));
}

}  // namespace rankshift
