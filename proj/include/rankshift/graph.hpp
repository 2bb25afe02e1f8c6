#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rankshift/common.hpp"

namespace rankshift {

/// Universal node set shared by every layer of a run. Ids are kept sorted by
/// id_less, so a node's dense index order is also its id order.
class NodeSet {
public:
    NodeSet() = default;
    /// Deduplicates and sorts the given ids.
    explicit NodeSet(std::vector<std::string> ids);

    std::size_t size() const noexcept { return ids_.size(); }
    const std::string& id(NodeIndex i) const { return ids_.at(i); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    std::optional<NodeIndex> find(std::string_view id) const;
    NodeIndex index_of(std::string_view id) const;  // throws ArgumentError

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, NodeIndex> index_;
};

using NodeSetPtr = std::shared_ptr<const NodeSet>;

NodeSetPtr make_node_set(std::vector<std::string> ids);

struct Edge {
    NodeIndex src = 0;
    NodeIndex dst = 0;
    double weight = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
    NodeIndex node = 0;
    double weight = 0.0;
};

/// Directed weighted snapshot of one time interval over a fixed node set.
///
/// Parallel edges handed to the constructor are merged by summing weights, so
/// every (src, dst) pair appears at most once. Self-loops are kept. Edges are
/// stored sorted by (src, dst) and indexed both by source and by target.
class TemporalLayer {
public:
    TemporalLayer() = default;
    TemporalLayer(std::string label, NodeSetPtr nodes, std::vector<Edge> edges);

    const std::string& label() const noexcept { return label_; }
    const NodeSetPtr& nodes() const noexcept { return nodes_; }
    std::size_t node_count() const noexcept { return nodes_ ? nodes_->size() : 0; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::span<const Edge> edges() const noexcept { return edges_; }

    std::span<const Neighbor> out_neighbors(NodeIndex i) const;
    std::span<const Neighbor> in_neighbors(NodeIndex i) const;

    std::size_t out_degree(NodeIndex i) const { return out_offsets_[i + 1] - out_offsets_[i]; }
    std::size_t in_degree(NodeIndex i) const { return in_offsets_[i + 1] - in_offsets_[i]; }
    double out_strength(NodeIndex i) const { return out_strength_[i]; }
    double in_strength(NodeIndex i) const { return in_strength_[i]; }
    double total_weight() const noexcept { return total_weight_; }

    /// Weight of src->dst, or 0 when absent.
    double weight(NodeIndex src, NodeIndex dst) const;

private:
    std::string label_;
    NodeSetPtr nodes_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> out_offsets_{0};
    std::vector<Neighbor> out_adj_;
    std::vector<std::size_t> in_offsets_{0};
    std::vector<Neighbor> in_adj_;
    std::vector<double> out_strength_;
    std::vector<double> in_strength_;
    double total_weight_ = 0.0;
};

/// Builds a layer from (src_id, dst_id, weight) triples, registering unseen
/// ids. Convenient for tests and small fixtures.
struct NamedEdge {
    std::string src;
    std::string dst;
    double weight = 1.0;
};
TemporalLayer make_layer(std::string label, const std::vector<NamedEdge>& edges,
                         std::vector<std::string> extra_nodes = {});

/// Descriptive statistics of a layer.
///
/// Density and averages are taken over the declared node set, singletons
/// included. Clustering uses the undirected projection. Diameter and average
/// path length are unweighted hop counts on the largest weakly connected
/// component of the undirected projection.
struct GraphStats {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    double density = 0.0;
    double avg_degree = 0.0;    // 2m / n
    double avg_strength = 0.0;  // mean of in + out strength
    double avg_clustering = 0.0;
    std::size_t diameter = 0;
    double avg_path_length = 0.0;
    std::size_t largest_component = 0;
};

GraphStats layer_stats(const TemporalLayer& layer, unsigned threads = 1);

/// Result of the two-ring expansion around a seed group. `ring[k]` is 0 for
/// seeds and 1 or 2 for the rings of `members[k]`.
struct Subnetwork {
    TemporalLayer layer;
    std::vector<NodeIndex> members;           // indices into the source node set, ascending
    std::vector<int> ring;                    // parallel to members
};

/// Expands the subnetwork around `seeds`:
///   1. seeds and the edges among them;
///   2. every edge touching a seed, which reaches ring 1;
///   3. edges among ring-1 nodes;
///   4. every edge touching a ring-1 node, which reaches ring 2.
/// Edges among ring-2 nodes and edges leaving ring 2 are not followed.
/// The returned layer keeps the source node set so it can be compared with
/// other layers; non-members are singletons.
Subnetwork expand_subnetwork(const TemporalLayer& layer, std::span<const NodeIndex> seeds);

/// Edge-list CSV with header interval,src,dst,weight.
void write_edge_list(std::ostream& out, std::span<const TemporalLayer> layers);
/// Reads an edge-list CSV into layers sharing one node set. Layers come out
/// in order of first appearance of their interval label.
std::vector<TemporalLayer> read_edge_list(std::istream& in, std::vector<std::string> extra_nodes = {});

void write_stats_header(std::ostream& out);
void write_stats_row(std::ostream& out, std::string_view interval, const GraphStats& stats);

}  // namespace rankshift
