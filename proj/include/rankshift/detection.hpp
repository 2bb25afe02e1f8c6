#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankshift/ingest.hpp"
#include "rankshift/ranking.hpp"

namespace rankshift {

// ---------------------------------------------------------------------------
// Stability gate
// ---------------------------------------------------------------------------

/// Correlations of one consecutive interval pair for one metric.
struct PairStability {
    std::string from;
    std::string to;
    std::optional<double> rho;  // nullopt = undefined (constant ranking)
    std::optional<double> tau;
    double all_equals = 1.0;    // correlation of a ranking with itself
    double random_rho = 0.0;    // mean over the shuffled baselines
    double random_tau = 0.0;
    bool passes = false;        // max(rho, tau) > theta, both defined or not
};

struct MetricStability {
    Metric metric = Metric::InDegree;
    std::vector<PairStability> pairs;
    bool valid = false;         // every pair passes
};

struct StabilityReport {
    double theta = 0.5;
    int repetitions = 20;
    std::uint64_t seed = 0;
    std::vector<MetricStability> metrics;

    const MetricStability* find(Metric metric) const;
    bool any_valid() const;
};

/// `rankings[m]` is the sequence of rankings of one metric over consecutive
/// layers. Each consecutive pair gets rho and tau, the all-equals baseline and
/// the mean of `repetitions` random reshuffles of the later ranking. The
/// shuffle stream is derived from (seed, metric slot, pair index).
StabilityReport stability_check(std::span<const std::vector<Ranking>> rankings, double theta = 0.5,
                                int repetitions = 20, std::uint64_t seed = 0);

/// Convenience form that computes the metrics and rankings from layers.
StabilityReport stability_check(std::span<const TemporalLayer> layers, std::span<const Metric> metrics,
                                double theta = 0.5, int repetitions = 20, std::uint64_t seed = 0,
                                const CentralityParams& params = {});

void write_stability_report(std::ostream& out, const StabilityReport& report);

// ---------------------------------------------------------------------------
// Residuals and selection
// ---------------------------------------------------------------------------

struct Residual {
    NodeIndex node = 0;
    std::int64_t delta = 0;  // r_x - r_y; positive = moved towards position 1

    friend bool operator==(const Residual&, const Residual&) = default;
};

/// One entry per node, in node order.
std::vector<Residual> residuals(const Ranking& x, const Ranking& y);

/// Drops nodes whose score is zero in both intervals. Their positions only
/// reflect tie-breaking among all-zero blocks.
std::vector<Residual> drop_silent(std::span<const Residual> residuals, std::span<const double> scores_x,
                                  std::span<const double> scores_y);

/// Top-K by |delta| descending; ties by delta descending, then node id.
/// delta = 0 is never selected.
std::vector<Residual> select_topk_abs(std::span<const Residual> residuals, std::size_t k);

/// Top-K_pos gainers (delta descending) followed by top-K_neg losers
/// (delta ascending). Ties by node id. delta = 0 is never selected.
std::vector<Residual> select_topk_split(std::span<const Residual> residuals, std::size_t k_pos, std::size_t k_neg);

enum class Direction { Gained, Lost };
std::string_view to_string(Direction d);

enum class FilterStatus { Unfiltered, Kept, KeptUnresolvedRisk, Removed };
std::string_view to_string(FilterStatus s);

struct OutlierRecord {
    NodeIndex node = 0;
    Metric metric = Metric::InDegree;
    std::uint32_t r_x = 0;
    std::uint32_t r_y = 0;
    std::int64_t delta = 0;
    FilterStatus filter = FilterStatus::Unfiltered;
    double delta_hra = 0.0;
    std::size_t list_position = 0;  // 1-based position in its own list

    Direction direction() const noexcept { return delta > 0 ? Direction::Gained : Direction::Lost; }
    std::uint64_t magnitude() const noexcept {
        return static_cast<std::uint64_t>(delta < 0 ? -delta : delta);
    }
};

/// Attaches ranks and list positions to a selection.
std::vector<OutlierRecord> make_outliers(std::span<const Residual> selection, const Ranking& x, const Ranking& y);

// ---------------------------------------------------------------------------
// Filtering
// ---------------------------------------------------------------------------

struct RemovedOutlier {
    OutlierRecord record;
    std::string reason;
};

struct FilterResult {
    std::vector<OutlierRecord> kept;     // input order, list positions renumbered
    std::vector<RemovedOutlier> removed;
};

/// Keeps a node iff its total strength (in + out) exceeds `multiplier * t_hr`
/// (low / medium risk) or `t_hr` (high risk) in at least one of the two
/// layers. Nodes with unknown risk are kept and flagged.
FilterResult threshold_filter(std::span<const OutlierRecord> outliers, const TemporalLayer& layer_x,
                              const TemporalLayer& layer_y, std::span<const std::optional<RiskLevel>> node_risk,
                              double t_hr, double multiplier = 5.0);

/// Per node: volume sent to plus received from high-risk counterparties in
/// layer_y, minus the same in layer_x.
std::vector<double> delta_hra(const TemporalLayer& layer_x, const TemporalLayer& layer_y,
                              std::span<const std::optional<RiskLevel>> node_risk);

// ---------------------------------------------------------------------------
// Final lists
// ---------------------------------------------------------------------------

struct FinalEntry {
    NodeIndex node = 0;
    std::vector<Metric> sources;  // metrics whose list contains the node, in enum order
    OutlierRecord record;         // earliest occurrence (list position, then metric)
    double delta_hra = 0.0;
    std::size_t final_position = 0;
};

/// Union of all lists, one entry per node, sorted by delta_hra descending
/// (signed), ties by node id.
std::vector<FinalEntry> mixed_sort(std::span<const std::vector<OutlierRecord>> lists, std::span<const double> dhra);

/// Groups entries by their position in their own list, concatenates the
/// groups by ascending position, sorts each group by delta_hra descending
/// (ties by node id, then metric) and keeps the first occurrence of each node.
std::vector<FinalEntry> stratified_sort(std::span<const std::vector<OutlierRecord>> lists,
                                        std::span<const double> dhra);

/// node_id,metric,r_x,r_y,delta,direction,delta_hra,final_position
void write_outliers(std::ostream& out, std::span<const OutlierRecord> records, const NodeSet& nodes);
void write_final_list(std::ostream& out, std::span<const FinalEntry> entries, const NodeSet& nodes);
/// node_id,metric,r_x,r_y,delta,reason
void write_removal_log(std::ostream& out, std::span<const RemovedOutlier> removed, const NodeSet& nodes);

}  // namespace rankshift
