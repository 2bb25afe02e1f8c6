#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rankshift/graph.hpp"
#include "rankshift/ingest.hpp"

namespace rankshift {

/// Preferential-attachment growth. Nodes 0..m-1 form a seed clique with
/// edges oriented from the higher to the lower index; each later node adds m
/// edges from itself to distinct existing nodes drawn proportionally to their
/// total degree. Edge count is m*(n-m) + m*(m-1)/2; weights are 1. Node ids
/// are "0".."n-1".
TemporalLayer barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed, std::string label = "T0");

/// Rewires floor(fraction * m) uniformly chosen edges: both endpoints are
/// redrawn uniformly, avoiding self-loops and every pair present in the input
/// or already placed. Weights travel with their edge, untouched edges are
/// copied as is. Throws Error when a rewire fails after bounded retries.
TemporalLayer reshuffle_edges(const TemporalLayer& layer, double fraction, std::uint64_t seed,
                              std::string label = {});

enum class AnomalyKind { VolumeSpike, CounterpartyShift };

std::string_view to_string(AnomalyKind kind);

struct Injection {
    std::size_t node = 0;   // index into the generated node list
    std::size_t month = 0;  // 0-based month offset
    AnomalyKind kind = AnomalyKind::VolumeSpike;
    double factor = 25.0;   // volume multiplier applied in that month
};

struct SynthProfile {
    std::size_t nodes = 200;
    std::size_t months = 4;
    Date start{2022, 1, 1};
    std::size_t countries = 20;
    double high_risk_share = 0.2;
    double medium_risk_share = 0.3;
    std::size_t partners = 5;         // outgoing counterparties per node
    double volume_log_mean = 11.0;    // log of a node's typical monthly volume
    double volume_log_sigma = 1.5;
    double monthly_noise = 0.08;      // relative jitter of each edge per month
    double edge_activity = 0.97;      // chance an edge is active in a month
    std::size_t accounts_per_node = 8;
    std::vector<Injection> injections;
};

/// `count` injections on distinct random nodes, all in the last month,
/// alternating spike and counterparty-shift kinds.
std::vector<Injection> random_injections(const SynthProfile& profile, std::size_t count, std::uint64_t seed);

struct GroundTruth {
    std::string node_id;
    std::string month;  // interval label, YYYY-MM
    AnomalyKind kind = AnomalyKind::VolumeSpike;
};

struct SynthData {
    std::vector<Transaction> transactions;
    std::vector<GroundTruth> truth;
    RiskTable risk;
    std::vector<std::string> node_ids;
    /// Intended BIC-level edge weights in cents per month label.
    std::map<std::string, std::map<std::pair<std::string, std::string>, std::int64_t>> intended;
};

SynthData synth_transactions(const SynthProfile& profile, std::uint64_t seed);

/// Writes transactions with the default schema header.
void write_transactions(std::ostream& out, std::span<const Transaction> transactions);
/// node_id,month,anomaly_kind
void write_ground_truth(std::ostream& out, std::span<const GroundTruth> truth);
/// country,level
void write_risk_table(std::ostream& out, const RiskTable& risk);

}  // namespace rankshift
