#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rankshift/config.hpp"
#include "rankshift/detection.hpp"
#include "rankshift/eval.hpp"

namespace rankshift {

/// Exit statuses shared by the pipeline and the command-line tool.
inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_stability_failed = 2;

/// Everything a run reads, already parsed.
struct PipelineInputs {
    std::vector<TemporalLayer> layers;
    std::vector<std::optional<RiskLevel>> node_risk;  // per node; empty = unknown everywhere
    std::optional<LabelSet> labels;
    std::size_t rejected_rows = 0;
};

/// Reads the files named in the config. Edge-list inputs resolve node risk by
/// looking node ids up in the risk table directly (country-level ids).
PipelineInputs load_inputs(const PipelineConfig& config);

struct ManifestEntry {
    std::string file;  // relative to the artifact directory
    std::string step;
};

struct PipelineResult {
    int exit_code = exit_ok;
    StabilityReport stability;
    std::string interval_x;
    std::string interval_y;
    std::vector<Metric> used_metrics;                          // passed the gate and produced a list
    std::map<Metric, std::vector<OutlierRecord>> outliers;     // after filtering
    std::vector<FinalEntry> mixed;
    std::vector<FinalEntry> stratified;
    std::optional<EvalReport> eval;
    std::vector<ManifestEntry> manifest;
};

/// Runs the whole pipeline on parsed inputs. When `out_dir` is set every
/// artifact is written there along with manifest.csv and a config snapshot.
/// Per-metric work (centralities, rankings, selections) is fanned out to
/// `config.centrality.threads` workers; outputs do not depend on the count.
PipelineResult run_pipeline(const PipelineConfig& config, const PipelineInputs& inputs,
                            const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// load_inputs + run_pipeline into config.dir.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace rankshift
