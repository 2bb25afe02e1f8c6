#include "rankshift/graph.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <thread>

#include "rankshift/csv.hpp"

namespace rankshift {

NodeSet::NodeSet(std::vector<std::string> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end(), [](const auto& a, const auto& b) { return id_less(a, b); });
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    index_.reserve(ids_.size());
    for (NodeIndex i = 0; i < ids_.size(); ++i) {
        index_.emplace(ids_[i], i);
    }
}

std::optional<NodeIndex> NodeSet::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

NodeIndex NodeSet::index_of(std::string_view id) const {
    if (auto idx = find(id)) {
        return *idx;
    }
    throw ArgumentError("unknown node id '" + std::string(id) + "'");
}

NodeSetPtr make_node_set(std::vector<std::string> ids) {
    return std::make_shared<const NodeSet>(std::move(ids));
}

namespace {

void build_index(std::size_t n, std::span<const Edge> edges, bool by_source, std::vector<std::size_t>& offsets,
                 std::vector<Neighbor>& adj) {
    offsets.assign(n + 1, 0);
    for (const auto& e : edges) {
        ++offsets[(by_source ? e.src : e.dst) + 1];
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    adj.resize(edges.size());
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& e : edges) {
        const NodeIndex key = by_source ? e.src : e.dst;
        adj[cursor[key]++] = Neighbor{by_source ? e.dst : e.src, e.weight};
    }
}

}  // namespace

TemporalLayer::TemporalLayer(std::string label, NodeSetPtr nodes, std::vector<Edge> edges)
    : label_(std::move(label)), nodes_(std::move(nodes)) {
    if (!nodes_) {
        throw ArgumentError("layer requires a node set");
    }
    const std::size_t n = nodes_->size();
    for (const auto& e : edges) {
        if (e.src >= n || e.dst >= n) {
            throw ArgumentError("edge endpoint outside the node set in layer " + label_);
        }
        if (!(e.weight > 0.0)) {
            throw ArgumentError("edge weights must be positive in layer " + label_);
        }
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return a.src != b.src ? a.src < b.src : a.dst < b.dst; });
    for (const auto& e : edges) {
        if (!edges_.empty() && edges_.back().src == e.src && edges_.back().dst == e.dst) {
            edges_.back().weight += e.weight;
        } else {
            edges_.push_back(e);
        }
    }
    // Sorted by (src, dst), so each out-list ends up sorted by target and each
    // in-list by source.
    build_index(n, edges_, true, out_offsets_, out_adj_);
    build_index(n, edges_, false, in_offsets_, in_adj_);
    out_strength_.assign(n, 0.0);
    in_strength_.assign(n, 0.0);
    for (const auto& e : edges_) {
        out_strength_[e.src] += e.weight;
        in_strength_[e.dst] += e.weight;
        total_weight_ += e.weight;
    }
}

std::span<const Neighbor> TemporalLayer::out_neighbors(NodeIndex i) const {
    return std::span<const Neighbor>(out_adj_).subspan(out_offsets_[i], out_offsets_[i + 1] - out_offsets_[i]);
}

std::span<const Neighbor> TemporalLayer::in_neighbors(NodeIndex i) const {
    return std::span<const Neighbor>(in_adj_).subspan(in_offsets_[i], in_offsets_[i + 1] - in_offsets_[i]);
}

double TemporalLayer::weight(NodeIndex src, NodeIndex dst) const {
    auto out = out_neighbors(src);
    auto it = std::lower_bound(out.begin(), out.end(), dst,
                               [](const Neighbor& nb, NodeIndex target) { return nb.node < target; });
    return (it != out.end() && it->node == dst) ? it->weight : 0.0;
}

TemporalLayer make_layer(std::string label, const std::vector<NamedEdge>& edges,
                         std::vector<std::string> extra_nodes) {
    std::vector<std::string> ids = std::move(extra_nodes);
    for (const auto& e : edges) {
        ids.push_back(e.src);
        ids.push_back(e.dst);
    }
    auto nodes = make_node_set(std::move(ids));
    std::vector<Edge> out;
    out.reserve(edges.size());
    for (const auto& e : edges) {
        out.push_back(Edge{nodes->index_of(e.src), nodes->index_of(e.dst), e.weight});
    }
    return TemporalLayer(std::move(label), std::move(nodes), std::move(out));
}

namespace {

/// Undirected simple projection: sorted neighbor lists without self-loops.
std::vector<std::vector<NodeIndex>> undirected_projection(const TemporalLayer& layer) {
    const std::size_t n = layer.node_count();
    std::vector<std::vector<NodeIndex>> adj(n);
    for (const auto& e : layer.edges()) {
        if (e.src == e.dst) {
            continue;
        }
        adj[e.src].push_back(e.dst);
        adj[e.dst].push_back(e.src);
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

double average_clustering(const std::vector<std::vector<NodeIndex>>& adj) {
    const std::size_t n = adj.size();
    std::vector<char> mark(n, 0);
    double sum = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
        const auto& nb = adj[v];
        const std::size_t d = nb.size();
        if (d < 2) {
            continue;
        }
        for (NodeIndex u : nb) {
            mark[u] = 1;
        }
        std::size_t links = 0;
        for (NodeIndex u : nb) {
            for (NodeIndex w : adj[u]) {
                if (mark[w] && w > u) {
                    ++links;
                }
            }
        }
        for (NodeIndex u : nb) {
            mark[u] = 0;
        }
        sum += static_cast<double>(links) / (static_cast<double>(d) * static_cast<double>(d - 1) / 2.0);
    }
    return sum / static_cast<double>(n);
}

std::vector<NodeIndex> largest_component(const std::vector<std::vector<NodeIndex>>& adj) {
    const std::size_t n = adj.size();
    std::vector<char> seen(n, 0);
    std::vector<NodeIndex> best;
    std::vector<NodeIndex> current;
    for (NodeIndex start = 0; start < n; ++start) {
        if (seen[start]) {
            continue;
        }
        current.clear();
        current.push_back(start);
        seen[start] = 1;
        for (std::size_t head = 0; head < current.size(); ++head) {
            for (NodeIndex w : adj[current[head]]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    current.push_back(w);
                }
            }
        }
        if (current.size() > best.size()) {
            best = current;
        }
    }
    std::sort(best.begin(), best.end());
    return best;
}

struct PathTotals {
    std::size_t max_distance = 0;
    std::uint64_t distance_sum = 0;
};

PathTotals bfs_totals(const std::vector<std::vector<NodeIndex>>& adj, std::span<const NodeIndex> sources) {
    PathTotals totals;
    std::vector<std::int64_t> dist(adj.size(), -1);
    std::vector<NodeIndex> queue;
    queue.reserve(adj.size());
    for (NodeIndex s : sources) {
        queue.clear();
        queue.push_back(s);
        dist[s] = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const NodeIndex v = queue[head];
            for (NodeIndex w : adj[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        for (NodeIndex v : queue) {
            totals.max_distance = std::max<std::size_t>(totals.max_distance, static_cast<std::size_t>(dist[v]));
            totals.distance_sum += static_cast<std::uint64_t>(dist[v]);
            dist[v] = -1;
        }
    }
    return totals;
}

}  // namespace

GraphStats layer_stats(const TemporalLayer& layer, unsigned threads) {
    const std::size_t n = layer.node_count();
    if (n == 0) {
        throw ArgumentError("layer_stats: empty layer");
    }
    if (n < 2) {
        throw ArgumentError("layer_stats: layer needs at least 2 nodes");
    }
    GraphStats stats;
    stats.nodes = n;
    stats.edges = layer.edge_count();
    const double nd = static_cast<double>(n);
    stats.density = static_cast<double>(stats.edges) / (nd * (nd - 1.0));
    stats.avg_degree = 2.0 * static_cast<double>(stats.edges) / nd;
    stats.avg_strength = 2.0 * layer.total_weight() / nd;

    const auto adj = undirected_projection(layer);
    stats.avg_clustering = average_clustering(adj);

    const auto component = largest_component(adj);
    stats.largest_component = component.size();
    if (component.size() >= 2) {
        threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(component.size())));
        std::vector<PathTotals> partial(threads);
        const std::size_t chunk = (component.size() + threads - 1) / threads;
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = std::min(component.size(), t * chunk);
            const std::size_t end = std::min(component.size(), begin + chunk);
            auto work = [&, t, begin, end] {
                partial[t] = bfs_totals(adj, std::span<const NodeIndex>(component).subspan(begin, end - begin));
            };
            if (threads == 1) {
                work();
            } else {
                pool.emplace_back(work);
            }
        }
        for (auto& th : pool) {
            th.join();
        }
        PathTotals total;
        for (const auto& p : partial) {
            total.max_distance = std::max(total.max_distance, p.max_distance);
            total.distance_sum += p.distance_sum;
        }
        const double c = static_cast<double>(component.size());
        stats.diameter = total.max_distance;
        stats.avg_path_length = static_cast<double>(total.distance_sum) / (c * (c - 1.0));
    }
    return stats;
}

Subnetwork expand_subnetwork(const TemporalLayer& layer, std::span<const NodeIndex> seeds) {
    if (seeds.empty()) {
        throw ArgumentError("expand_subnetwork: empty seed group");
    }
    const std::size_t n = layer.node_count();
    constexpr int outside = -1;
    std::vector<int> ring(n, outside);
    for (NodeIndex s : seeds) {
        if (s >= n) {
            throw ArgumentError("expand_subnetwork: seed outside the node set");
        }
        ring[s] = 0;
    }

    // An edge is kept when at least one endpoint is a seed or ring-1 node.
    // That covers seed-seed edges, every edge touching a seed (ring 1), edges
    // among ring 1 and every edge touching ring 1 (ring 2).
    for (int level = 0; level < 2; ++level) {
        for (NodeIndex v = 0; v < n; ++v) {
            if (ring[v] != level) {
                continue;
            }
            auto visit = [&](NodeIndex w) {
                if (ring[w] == outside) {
                    ring[w] = level + 1;
                }
            };
            for (const auto& nb : layer.out_neighbors(v)) {
                visit(nb.node);
            }
            for (const auto& nb : layer.in_neighbors(v)) {
                visit(nb.node);
            }
        }
    }

    std::vector<Edge> kept;
    for (const auto& e : layer.edges()) {
        const int a = ring[e.src];
        const int b = ring[e.dst];
        const bool touches_inner = (a == 0 || a == 1) || (b == 0 || b == 1);
        if (touches_inner) {
            kept.push_back(e);
        }
    }

    Subnetwork sub;
    for (NodeIndex v = 0; v < n; ++v) {
        if (ring[v] != outside) {
            sub.members.push_back(v);
            sub.ring.push_back(ring[v]);
        }
    }
    sub.layer = TemporalLayer(layer.label(), layer.nodes(), std::move(kept));
    return sub;
}

void write_edge_list(std::ostream& out, std::span<const TemporalLayer> layers) {
    out << "interval,src,dst,weight\n";
    for (const auto& layer : layers) {
        const auto& nodes = *layer.nodes();
        for (const auto& e : layer.edges()) {
            csv::write_row(out, {layer.label(), nodes.id(e.src), nodes.id(e.dst), csv::format_number(e.weight)});
        }
    }
}

std::vector<TemporalLayer> read_edge_list(std::istream& in, std::vector<std::string> extra_nodes) {
    if (!in) {
        throw InputError("edge list: unreadable stream");
    }
    std::string line;
    if (!csv::next_line(in, line)) {
        throw InputError("edge list: missing header");
    }
    const auto header = csv::split(line);
    if (header.size() < 4 || header[0] != "interval" || header[1] != "src" || header[2] != "dst" ||
        header[3] != "weight") {
        throw InputError("edge list: header must be interval,src,dst,weight");
    }
    struct Row {
        std::size_t layer;
        std::string src, dst;
        double weight;
    };
    std::vector<std::string> labels;
    std::vector<Row> rows;
    std::vector<std::string> ids = std::move(extra_nodes);
    std::size_t line_no = 1;
    while (csv::next_line(in, line)) {
        ++line_no;
        auto f = csv::split(line);
        if (f.size() != 4) {
            throw InputError("edge list line " + std::to_string(line_no) + ": expected 4 fields");
        }
        double w = 0.0;
        try {
            std::size_t used = 0;
            w = std::stod(f[3], &used);
            if (used != f[3].size()) {
                throw std::invalid_argument("trailing");
            }
        } catch (const std::exception&) {
            throw InputError("edge list line " + std::to_string(line_no) + ": bad weight '" + f[3] + "'");
        }
        auto it = std::find(labels.begin(), labels.end(), f[0]);
        const std::size_t li = static_cast<std::size_t>(it - labels.begin());
        if (it == labels.end()) {
            labels.push_back(f[0]);
        }
        ids.push_back(f[1]);
        ids.push_back(f[2]);
        rows.push_back(Row{li, std::move(f[1]), std::move(f[2]), w});
    }
    auto nodes = make_node_set(std::move(ids));
    std::vector<std::vector<Edge>> edges(labels.size());
    for (const auto& r : rows) {
        edges[r.layer].push_back(Edge{nodes->index_of(r.src), nodes->index_of(r.dst), r.weight});
    }
    std::vector<TemporalLayer> layers;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        layers.emplace_back(labels[i], nodes, std::move(edges[i]));
    }
    return layers;
}

void write_stats_header(std::ostream& out) {
    out << "interval,nodes,edges,density,avg_degree,avg_strength,avg_clustering,diameter,avg_path_length,"
           "largest_component\n";
}

void write_stats_row(std::ostream& out, std::string_view interval, const GraphStats& s) {
    csv::write_row(out, {std::string(interval), std::to_string(s.nodes), std::to_string(s.edges),
                         csv::format_number(s.density), csv::format_number(s.avg_degree),
                         csv::format_number(s.avg_strength), csv::format_number(s.avg_clustering),
                         std::to_string(s.diameter), csv::format_number(s.avg_path_length),
                         std::to_string(s.largest_component)});
}

}  // namespace rankshift
