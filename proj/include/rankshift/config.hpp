#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rankshift/centrality.hpp"
#include "rankshift/ingest.hpp"

namespace rankshift {

enum class SelectionStrategy { Split, Abs };

std::string_view to_string(SelectionStrategy s);
SelectionStrategy parse_selection_strategy(std::string_view text);

/// Every knob of a pipeline run. Each field has a dotted key
/// ("section.key") used both in config files and as a CLI flag.
struct PipelineConfig {
    // [input]
    std::string transactions;  // transaction CSV
    std::string edges;         // or a pre-aggregated edge list (interval,src,dst,weight)
    std::string risk_table;
    std::string labels;
    std::string schema;
    AggregationLevel level = AggregationLevel::BIC;
    IntervalUnit interval = IntervalUnit::Month;
    RiskLevel risk_default = RiskLevel::Low;

    // [centrality]
    std::vector<Metric> metrics = {Metric::InStrength, Metric::OutStrength, Metric::PageRank, Metric::Hub,
                                   Metric::Authority};
    CentralityParams centrality;

    // [stability]
    double theta = 0.5;
    int repetitions = 20;
    std::uint64_t seed = 0;

    // [detection]
    std::string interval_x;  // empty: second to last layer
    std::string interval_y;  // empty: last layer
    SelectionStrategy strategy = SelectionStrategy::Split;
    std::size_t k = 60;      // abs strategy
    std::size_t k_pos = 30;  // split strategy
    std::size_t k_neg = 30;

    // [filter]  disabled while t_hr is 0
    double t_hr = 0.0;
    double multiplier = 5.0;

    // [output]
    std::string dir = "rankshift-out";

    /// Throws ArgumentError on out-of-domain values.
    void validate() const;
};

/// Flat "section.key" -> value view of a config file. Lines are
/// "[section]" headers, "key = value" pairs or '#' comments.
using ConfigValues = std::map<std::string, std::string, std::less<>>;

ConfigValues parse_config(std::istream& in);

/// Every accepted dotted key, in snapshot order.
const std::vector<std::string>& config_keys();

/// Applies one setting; throws ArgumentError for unknown keys or bad values.
void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value);
void apply_settings(PipelineConfig& config, const ConfigValues& values);

/// Current value of a key, formatted so that apply_setting reads it back.
std::string get_setting(const PipelineConfig& config, std::string_view key);

/// Writes a complete, re-loadable snapshot with one section per module.
void write_config(std::ostream& out, const PipelineConfig& config);

}  // namespace rankshift
