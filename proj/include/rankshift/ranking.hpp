#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankshift/centrality.hpp"

namespace rankshift {

struct TieGroup {
    std::uint32_t first_position = 1;  // integer position of the group's first member
    std::uint32_t size = 1;
};

/// Nodes ordered by descending score. `position` breaks ties by ascending
/// node id (equivalently node index), `fractional` averages the positions
/// of each tie group.
struct Ranking {
    Metric metric = Metric::InDegree;
    std::string interval;
    std::vector<std::uint32_t> position;  // indexed by NodeIndex, 1 = highest score
    std::vector<double> fractional;       // indexed by NodeIndex
    std::vector<TieGroup> ties;           // only groups of size > 1
    std::vector<NodeIndex> order;         // order[p-1] holds the node at position p

    std::size_t size() const noexcept { return position.size(); }
};

Ranking rank_nodes(const CentralityVector& scores);
/// Same as above for a bare score vector.
Ranking rank_scores(std::span<const double> scores, Metric metric = Metric::InDegree, std::string interval = {});

/// Builds a ranking straight from integer positions (1..n, a permutation).
/// Used for worked examples and fixtures that state positions directly.
Ranking ranking_from_positions(std::span<const std::uint32_t> positions);

/// Average ranks of `values` in descending order (largest value gets 1).
std::vector<double> fractional_ranks(std::span<const double> values);

/// Pearson correlation of the fractional ranks of x and y. nullopt when either
/// side has zero variance.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);
std::optional<double> spearman(const Ranking& x, const Ranking& y);

/// Kendall tau-b; reduces to (concordant - discordant) / pairs without ties.
/// nullopt when either side is constant. O(n log n).
std::optional<double> kendall(std::span<const double> x, std::span<const double> y);
std::optional<double> kendall(const Ranking& x, const Ranking& y);

/// node_id,metric,interval,position,fractional_rank
void write_ranking(std::ostream& out, const Ranking& ranking, const NodeSet& nodes, bool header = true);

}  // namespace rankshift
